"""Spatially memoryless, temporally AR(1) Gaussian frame sources.

Each pixel position evolves independently across frames as

    X_t = rho * (sigma_t / sigma_{t-1}) * X_{t-1} + N_t,
    N_t ~ N(0, (1 - rho**2) * sigma_t**2),

with X_1 ~ N(0, sigma_1**2). Frame indices in the public API are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import SOURCE, make_rng
from .errors import ParameterError


@dataclass(frozen=True)
class SourceParams:
    M: int
    n: int
    rho: float
    variances: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variances", tuple(float(v) for v in self.variances))
        if isinstance(self.M, bool) or not isinstance(self.M, (int, np.integer)) or self.M < 1:
            raise ParameterError(f"M must be a positive integer, got {self.M!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        if not math.isfinite(self.rho) or abs(self.rho) > 1.0:
            raise ParameterError(f"rho must satisfy |rho| <= 1, got {self.rho!r}")
        if len(self.variances) != self.M:
            raise ParameterError(
                f"expected {self.M} variances, got {len(self.variances)}"
            )
        if not all(math.isfinite(v) and v > 0.0 for v in self.variances):
            raise ParameterError("all frame variances must be finite and > 0")

    @classmethod
    def constant(cls, M: int, n: int, rho: float, variance: float = 1.0) -> SourceParams:
        return cls(M=M, n=n, rho=rho, variances=(variance,) * M)

    def with_n(self, n: int) -> SourceParams:
        return SourceParams(M=self.M, n=n, rho=self.rho, variances=self.variances)

    def check_frame(self, t: int) -> int:
        if isinstance(t, bool) or not isinstance(t, (int, np.integer)) or not 1 <= t <= self.M:
            raise ParameterError(f"frame index must lie in 1..{self.M}, got {t!r}")
        return int(t)

    def prediction_gain(self, t: int, k: int = 1) -> float:
        """Signed gain rho**k * sigma_t / sigma_{t-k} of the k-step predictor."""
        return self.rho**k * math.sqrt(self.variances[t - 1] / self.variances[t - k - 1])


@dataclass(frozen=True)
class FrameMatrix:
    """M x n array of pixel values tagged with the model that produced it."""

    values: np.ndarray
    params: SourceParams

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.params.M, self.params.n):
            raise ParameterError(
                f"frame matrix shape {values.shape} does not match "
                f"(M, n) = ({self.params.M}, {self.params.n})"
            )
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def frame(self, t: int) -> np.ndarray:
        return self.values[self.params.check_frame(t) - 1]


def sample_gop(params: SourceParams, seed: int) -> FrameMatrix:
    """Draw one group of pictures. Bit-reproducible for a fixed (params, seed)."""
    rng = make_rng(seed, SOURCE)
    noise = rng.standard_normal((params.M, params.n))
    var = params.variances
    x = np.empty_like(noise)
    x[0] = math.sqrt(var[0]) * noise[0]
    innovation_scale = 1.0 - params.rho**2
    for t in range(1, params.M):
        gain = params.rho * math.sqrt(var[t] / var[t - 1])
        x[t] = gain * x[t - 1] + math.sqrt(innovation_scale * var[t]) * noise[t]
    return FrameMatrix(x, params)


def empirical_distortion(x: FrameMatrix, xhat: FrameMatrix) -> list[float]:
    """Per-frame mean squared error (1/n) sum_i (X_t(i) - Xhat_t(i))**2."""
    if x.shape != xhat.shape:
        raise ParameterError(f"shape mismatch: {x.shape} vs {xhat.shape}")
    err = x.values - xhat.values
    return [float(v) for v in np.mean(err * err, axis=1)]


def model_covariance(params: SourceParams, t: int, s: int) -> float:
    """Cov(X_t(i), X_s(i)) = rho**|t-s| * sigma_t * sigma_s."""
    t = params.check_frame(t)
    s = params.check_frame(s)
    if t == s:
        return params.variances[t - 1]
    return params.rho ** abs(t - s) * math.sqrt(params.variances[t - 1] * params.variances[s - 1])
