"""Idealized DPCM encoder/decoder driven by a Gaussian test channel.

There is no quantizer or bitstream. Each frame's residual against the
prediction from the previous reconstruction is "described" by a draw from the
exact Gaussian conditional of the rate-distortion test channel, and rates are
accounted analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import DESCRIPTION, derive_seed, make_rng
from .errors import ParameterError
from .rd_analytics import DistortionTuple, RateReport, sum_rate
from .source_model import FrameMatrix, SourceParams


@dataclass(frozen=True)
class CodecTrace:
    reconstructions: FrameMatrix
    residuals: FrameMatrix
    descriptions: FrameMatrix
    residual_variances_used: tuple[float, ...]
    report: RateReport

    @property
    def errors(self) -> np.ndarray:
        """Per-pixel reconstruction error Z_t = W_t - What_t."""
        return self.residuals.values - self.descriptions.values


def test_channel_sample(
    w: np.ndarray, sigma2_w: float, d_eff: float, seed: int
) -> np.ndarray:
    """Draw What | W for the test channel W = What + Z, What independent of Z.

    What = a * W + V with a = (sigma2_w - d_eff) / sigma2_w and
    V ~ N(0, a * d_eff), which gives E[(W - What)^2] = d_eff and
    Var(What) = sigma2_w - d_eff.
    """
    w = np.asarray(w, dtype=float)
    if not (sigma2_w > 0.0 and math.isfinite(sigma2_w)):
        raise ParameterError(f"sigma2_w must be finite and > 0, got {sigma2_w!r}")
    if not d_eff > 0.0:
        raise ParameterError(f"d_eff must be > 0, got {d_eff!r}")
    if d_eff > sigma2_w:
        raise ParameterError(
            f"d_eff={d_eff!r} exceeds sigma2_w={sigma2_w!r}; clip before sampling"
        )
    a = (sigma2_w - d_eff) / sigma2_w
    if a == 0.0:
        return np.zeros_like(w)
    rng = make_rng(seed, DESCRIPTION)
    return a * w + math.sqrt(a * d_eff) * rng.standard_normal(w.shape)


# pytest would otherwise collect the public name above as a test
test_channel_sample.__test__ = False


def encode_decode_gop(
    x: FrameMatrix, params: SourceParams, d: DistortionTuple, seed: int
) -> CodecTrace:
    if x.shape != (params.M, params.n):
        raise ParameterError(
            f"frame matrix shape {x.shape} does not match (M, n) = ({params.M}, {params.n})"
        )
    report = sum_rate(params, d)
    sigma2_w = report.innovation_variances
    d_eff = report.effective_distortions

    xhat = np.empty_like(x.values)
    resid = np.empty_like(x.values)
    desc = np.empty_like(x.values)
    for t in range(params.M):
        if t == 0:
            pred = np.zeros(params.n)
        else:
            pred = params.prediction_gain(t + 1) * xhat[t - 1]
        resid[t] = x.values[t] - pred
        if d_eff[t] >= sigma2_w[t]:
            desc[t] = 0.0
        else:
            desc[t] = test_channel_sample(
                resid[t], sigma2_w[t], d_eff[t], derive_seed(seed, DESCRIPTION, t)
            )
        xhat[t] = pred + desc[t]

    return CodecTrace(
        reconstructions=FrameMatrix(xhat, params),
        residuals=FrameMatrix(resid, params),
        descriptions=FrameMatrix(desc, params),
        residual_variances_used=sigma2_w,
        report=report,
    )
