"""Sum-rate-distortion analysis for successive correlated Gauss-Markov sources.

Closed-form rate computations for an idealized DPCM encoder, a Monte Carlo
simulator of the Gaussian achievability construction, k-step prediction
after trailing frame losses, and rate-budget allocation.
"""

from .errors import ParameterError
from .source_model import (
    FrameMatrix,
    SourceParams,
    empirical_distortion,
    model_covariance,
    sample_gop,
)
from .rd_analytics import (
    DistortionTuple,
    RateReport,
    distortion_from_rates,
    innovation_schedule,
    kstep_variance,
    kstep_variance_series,
    log_plus,
    per_frame_rate,
    sum_rate,
)
from .dpcm_codec import CodecTrace, encode_decode_gop, test_channel_sample
from .erasure import (
    ErasedReconstruction,
    ErasurePattern,
    predict_lost_frames,
    usable_prefix,
)
from .allocation import (
    AllocationResult,
    allocate_common_distortion,
    allocate_min_weighted_distortion,
)
from .experiments import TrialStats, run_distortion_experiment, run_erasure_experiment

__all__ = [
    "AllocationResult",
    "CodecTrace",
    "DistortionTuple",
    "ErasedReconstruction",
    "ErasurePattern",
    "FrameMatrix",
    "ParameterError",
    "RateReport",
    "SourceParams",
    "TrialStats",
    "allocate_common_distortion",
    "allocate_min_weighted_distortion",
    "distortion_from_rates",
    "empirical_distortion",
    "encode_decode_gop",
    "innovation_schedule",
    "kstep_variance",
    "kstep_variance_series",
    "log_plus",
    "model_covariance",
    "per_frame_rate",
    "predict_lost_frames",
    "run_distortion_experiment",
    "run_erasure_experiment",
    "sample_gop",
    "sum_rate",
    "test_channel_sample",
    "usable_prefix",
]
