"""Seeded Monte Carlo runs of the codec, gated against analytic targets.

A Gaussian error of variance v has squared values with variance 2 v**2, so
the pooled MSE over N = n * trials pixels has standard error v * sqrt(2 / N).
Each frame's z-score is (MSE - target) / se and a run passes when every
|z| <= z_gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._rng import ERASURE, check_seed, derive_seed, make_rng
from .dpcm_codec import encode_decode_gop
from .erasure import ErasurePattern, patterns_for_trials, predict_lost_frames
from .errors import ParameterError
from .rd_analytics import DistortionTuple, innovation_schedule
from .source_model import SourceParams, sample_gop

DEFAULT_Z_GATE = 4.0


@dataclass(frozen=True)
class TrialStats:
    per_frame_mse: tuple[float, ...]
    per_frame_target: tuple[float, ...]
    standard_errors: tuple[float, ...]
    z_scores: tuple[float, ...]
    trials: int
    n: int
    seed: int
    z_gate: float
    passed: bool
    # erasure runs only
    k_per_frame: Optional[tuple[int, ...]] = None
    k_per_frame_by_trial: Optional[tuple[tuple[int, ...], ...]] = None

    def to_dict(self) -> dict:
        return {
            "per_frame_mse": list(self.per_frame_mse),
            "per_frame_target": list(self.per_frame_target),
            "standard_errors": list(self.standard_errors),
            "z_scores": list(self.z_scores),
            "trials": self.trials,
            "n": self.n,
            "seed": self.seed,
            "z_gate": self.z_gate,
            "passed": self.passed,
        }


def _check_run(trials: int, z_gate: float) -> None:
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials!r}")
    if not (z_gate > 0.0 and math.isfinite(z_gate)):
        raise ParameterError(f"z_gate must be finite and > 0, got {z_gate!r}")


def _run(
    params: SourceParams,
    d: DistortionTuple,
    trials: int,
    seed: int,
    z_gate: float,
    patterns: Optional[list[ErasurePattern]],
) -> TrialStats:
    _check_run(trials, z_gate)
    seed = check_seed(seed)
    innovation_schedule(params, d)

    sse = np.zeros(params.M)
    target_sum = np.zeros(params.M)
    target_sq_sum = np.zeros(params.M)
    steps: list[tuple[int, ...]] = []
    for i in range(trials):
        trial_seed = derive_seed(seed, i)
        x = sample_gop(params, trial_seed)
        trace = encode_decode_gop(x, params, d, trial_seed)
        if patterns is None:
            xt = trace.reconstructions.values
            target = np.asarray(d.effective)
        else:
            rec = predict_lost_frames(trace, patterns[i], params, d)
            xt = rec.frames.values
            target = np.asarray(rec.analytic_mse)
            steps.append(rec.k_per_frame)
        err = x.values - xt
        sse += np.sum(err * err, axis=1)
        target_sum += target
        target_sq_sum += target * target

    count = params.n * trials
    mse = sse / count
    mean_target = target_sum / trials
    # reduces to target * sqrt(2 / count) when every trial shares one target
    se = np.sqrt(2.0 * (target_sq_sum / trials) / count)
    z = (mse - mean_target) / se
    passed = bool(np.all(np.abs(z) <= z_gate))

    k_flat = k_by_trial = None
    if patterns is not None:
        if all(s == steps[0] for s in steps):
            k_flat = steps[0]
        else:
            k_by_trial = tuple(steps)
    return TrialStats(
        per_frame_mse=tuple(float(v) for v in mse),
        per_frame_target=tuple(float(v) for v in mean_target),
        standard_errors=tuple(float(v) for v in se),
        z_scores=tuple(float(v) for v in z),
        trials=trials,
        n=params.n,
        seed=seed,
        z_gate=float(z_gate),
        passed=passed,
        k_per_frame=k_flat,
        k_per_frame_by_trial=k_by_trial,
    )


def run_distortion_experiment(
    params: SourceParams,
    d: DistortionTuple,
    trials: int,
    seed: int,
    z_gate: float = DEFAULT_Z_GATE,
) -> TrialStats:
    """Encode ``trials`` independent GOPs and compare per-frame MSE with D_t^eff."""
    return _run(params, d, trials, seed, z_gate, None)


def run_erasure_experiment(
    params: SourceParams,
    d: DistortionTuple,
    pattern: ErasurePattern | Sequence[ErasurePattern],
    trials: int,
    seed: int,
    z_gate: float = DEFAULT_Z_GATE,
) -> TrialStats:
    """Like :func:`run_distortion_experiment`, but decode through a loss pattern.

    ``pattern`` is either one pattern shared by all trials or one per trial.
    Targets are the k-step prediction variances implied by each pattern's
    usable prefix.
    """
    _check_run(trials, z_gate)
    patterns = patterns_for_trials(pattern, trials)
    for p in patterns:
        if p.M != params.M:
            raise ParameterError(f"pattern covers {p.M} frames, model has M={params.M}")
    return _run(params, d, trials, seed, z_gate, patterns)


def iid_patterns(M: int, p: float, trials: int, seed: int) -> list[ErasurePattern]:
    """One i.i.d. loss pattern per trial, drawn from the erasure sub-stream of ``seed``."""
    return [ErasurePattern.iid(M, p, make_rng(seed, ERASURE, i)) for i in range(trials)]


__all__ = [
    "DEFAULT_Z_GATE",
    "TrialStats",
    "iid_patterns",
    "run_distortion_experiment",
    "run_erasure_experiment",
]
