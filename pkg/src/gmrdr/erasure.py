"""Decoder-side reconstruction when frame descriptions are lost.

A DPCM description is only decodable when every earlier description of the
GOP arrived, so any loss pattern reduces to its usable prefix: frames past
the prefix are extrapolated from the last decodable reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dpcm_codec import CodecTrace
from .errors import ParameterError
from .rd_analytics import DistortionTuple, kstep_variance
from .source_model import FrameMatrix, SourceParams


@dataclass(frozen=True)
class ErasurePattern:
    received: tuple[bool, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "received", tuple(bool(r) for r in self.received))
        if not self.received:
            raise ParameterError("erasure pattern must cover at least one frame")

    @property
    def M(self) -> int:
        return len(self.received)

    @classmethod
    def from_bitmask(cls, mask: str) -> ErasurePattern:
        if not mask or set(mask) - {"0", "1"}:
            raise ParameterError(f"bitmask must be a non-empty string of 0/1, got {mask!r}")
        return cls(tuple(c == "1" for c in mask))

    @classmethod
    def tail(cls, M: int, k: int) -> ErasurePattern:
        """Last ``k`` of ``M`` descriptions lost."""
        if not 0 <= k <= M:
            raise ParameterError(f"tail loss count must lie in 0..{M}, got {k}")
        return cls((True,) * (M - k) + (False,) * k)

    @classmethod
    def iid(cls, M: int, p: float, rng: np.random.Generator) -> ErasurePattern:
        """Each description lost independently with probability ``p``."""
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"loss probability must lie in [0, 1], got {p}")
        return cls(tuple(bool(v) for v in rng.random(M) >= p))

    def to_bitmask(self) -> str:
        return "".join("1" if r else "0" for r in self.received)


@dataclass(frozen=True)
class ErasedReconstruction:
    frames: FrameMatrix
    k_per_frame: tuple[int, ...]
    analytic_mse: tuple[float, ...]


def usable_prefix(pattern: ErasurePattern) -> int:
    """Number of leading frames whose descriptions all arrived."""
    for j, ok in enumerate(pattern.received):
        if not ok:
            return j
    return pattern.M


def steps_per_frame(pattern: ErasurePattern) -> list[int]:
    j = usable_prefix(pattern)
    return [0] * j + list(range(1, pattern.M - j + 1))


def predict_lost_frames(
    trace: CodecTrace,
    pattern: ErasurePattern,
    params: SourceParams,
    d: DistortionTuple,
) -> ErasedReconstruction:
    if pattern.M != params.M or trace.reconstructions.shape[0] != params.M:
        raise ParameterError(
            f"pattern covers {pattern.M} frames, trace {trace.reconstructions.shape[0]}, "
            f"model M={params.M}"
        )
    xhat = trace.reconstructions.values
    j = usable_prefix(pattern)
    ks = steps_per_frame(pattern)
    out = np.empty_like(xhat)
    out[:j] = xhat[:j]
    for t in range(j + 1, params.M + 1):
        if j == 0:
            out[t - 1] = 0.0
        else:
            out[t - 1] = params.prediction_gain(t, t - j) * xhat[j - 1]
    mse = tuple(kstep_variance(params, d, t, k) for t, k in enumerate(ks, start=1))
    return ErasedReconstruction(FrameMatrix(out, params), tuple(ks), mse)


def patterns_for_trials(
    patterns: ErasurePattern | Sequence[ErasurePattern], trials: int
) -> list[ErasurePattern]:
    if isinstance(patterns, ErasurePattern):
        return [patterns] * trials
    patterns = list(patterns)
    if len(patterns) != trials:
        raise ParameterError(f"expected {trials} per-trial patterns, got {len(patterns)}")
    return patterns
