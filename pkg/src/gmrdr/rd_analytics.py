"""Closed-form sum-rate and k-step distortion computations.

All rates are in bits per source symbol. When a target D_t is at or above the
innovation variance of its frame, the rate clips to zero and the distortion
actually achieved is the innovation variance itself; the recursion for the
next frame uses that effective value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ParameterError
from .source_model import SourceParams


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass
class DistortionTuple:
    """Target per-frame distortions and, once scheduled, the effective ones."""

    targets: tuple[float, ...]
    effective: Optional[list[float]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        self.targets = tuple(_positive("distortion target", d) for d in self.targets)
        if not self.targets:
            raise ParameterError("at least one distortion target is required")

    @classmethod
    def common(cls, M: int, d: float) -> DistortionTuple:
        return cls((d,) * M)

    def __len__(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class RateReport:
    innovation_variances: tuple[float, ...]
    target_distortions: tuple[float, ...]
    effective_distortions: tuple[float, ...]
    rates_bits: tuple[float, ...]
    sum_rate_bits: float

    def to_dict(self) -> dict:
        return {
            "innovation_variances": list(self.innovation_variances),
            "target_distortions": list(self.target_distortions),
            "effective_distortions": list(self.effective_distortions),
            "rates_bits": list(self.rates_bits),
            "sum_rate_bits": self.sum_rate_bits,
        }


def log_plus(x: float) -> float:
    """max(0, log2(x))."""
    x = _positive("log_plus argument", x)
    return max(0.0, math.log2(x))


def per_frame_rate(sigma2_w: float, d_target: float) -> float:
    return 0.5 * log_plus(_positive("sigma2_w", sigma2_w) / _positive("d_target", d_target))


def _check_lengths(params: SourceParams, d: DistortionTuple) -> None:
    if len(d.targets) != params.M:
        raise ParameterError(
            f"distortion tuple has {len(d.targets)} entries, model has M={params.M}"
        )


def innovation_schedule(params: SourceParams, d: DistortionTuple) -> list[float]:
    """Innovation variances sigma^2_{W_t}; also fills ``d.effective``."""
    _check_lengths(params, d)
    var = params.variances
    r2 = params.rho**2
    sigma2_w = [var[0]]
    effective = [min(d.targets[0], var[0])]
    for t in range(1, params.M):
        s = r2 * (var[t] / var[t - 1]) * effective[t - 1] + (1.0 - r2) * var[t]
        sigma2_w.append(s)
        effective.append(min(d.targets[t], s))
    d.effective = effective
    return sigma2_w


def sum_rate(params: SourceParams, d: DistortionTuple) -> RateReport:
    sigma2_w = innovation_schedule(params, d)
    rates = [per_frame_rate(s, dt) for s, dt in zip(sigma2_w, d.effective)]
    return RateReport(
        innovation_variances=tuple(sigma2_w),
        target_distortions=d.targets,
        effective_distortions=tuple(d.effective),
        rates_bits=tuple(rates),
        sum_rate_bits=sum(rates),
    )


def _check_step(params: SourceParams, t: int, k: int) -> tuple[int, int]:
    t = params.check_frame(t)
    if isinstance(k, bool) or not isinstance(k, int) or not 0 <= k <= t:
        raise ParameterError(f"step count must lie in 0..{t} for frame {t}, got {k!r}")
    return t, k


def kstep_variance(params: SourceParams, d: DistortionTuple, t: int, k: int) -> float:
    """MSE of predicting frame t from the reconstruction of frame t-k.

    k = 0 is the frame's own effective distortion; k = t means nothing was
    received and the zero predictor leaves the full variance sigma_t**2.
    """
    t, k = _check_step(params, t, k)
    innovation_schedule(params, d)
    var = params.variances
    if k == t:
        return var[t - 1]
    if k == 0:
        return d.effective[t - 1]
    r2k = (params.rho**2) ** k
    return r2k * (var[t - 1] / var[t - k - 1]) * d.effective[t - k - 1] + (1.0 - r2k) * var[t - 1]


def kstep_variance_series(params: SourceParams, d: DistortionTuple, t: int, k: int) -> float:
    """Term-by-term variance of the k-step error, before summing the geometric series.

    Adds the propagated reconstruction error of frame t-k to each innovation
    N_{t-k+j}, scaled by rho**(k-j) * sigma_t / sigma_{t-k+j}. For k = t the
    first frame counts as an undescribed frame with error variance sigma_1**2.
    """
    t, k = _check_step(params, t, k)
    innovation_schedule(params, d)
    var = params.variances
    r2 = params.rho**2
    if k == t:
        base, k_eff = var[0], t - 1
    else:
        base, k_eff = d.effective[t - k - 1], k
    total = r2**k_eff * (var[t - 1] / var[t - k_eff - 1]) * base
    for j in range(1, k_eff + 1):
        frame = t - k_eff + j
        total += r2 ** (k_eff - j) * (var[t - 1] / var[frame - 1]) * (1.0 - r2) * var[frame - 1]
    return total


def distortion_from_rates(params: SourceParams, rates_bits: Sequence[float]) -> DistortionTuple:
    """Invert the per-frame rates sequentially: D_t = sigma^2_{W_t} * 2**(-2 R_t)."""
    rates = [float(r) for r in rates_bits]
    if len(rates) != params.M:
        raise ParameterError(f"expected {params.M} rates, got {len(rates)}")
    if not all(math.isfinite(r) and r >= 0.0 for r in rates):
        raise ParameterError("rates must be finite and >= 0")
    var = params.variances
    r2 = params.rho**2
    out: list[float] = []
    for t, rate in enumerate(rates):
        if t == 0:
            s = var[0]
        else:
            s = r2 * (var[t] / var[t - 1]) * out[t - 1] + (1.0 - r2) * var[t]
        out.append(s * 2.0 ** (-2.0 * rate))
    return DistortionTuple(tuple(out), effective=list(out))
