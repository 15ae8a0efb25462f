import math

import numpy as np
import pytest

from gmrdr import (
    DistortionTuple,
    ErasurePattern,
    ParameterError,
    SourceParams,
    empirical_distortion,
    encode_decode_gop,
    kstep_variance,
    predict_lost_frames,
    sample_gop,
    usable_prefix,
)
from gmrdr.erasure import steps_per_frame


@pytest.mark.parametrize(
    "mask, expected",
    [("1101", 2), ("1111", 4), ("0111", 0), ("1", 1), ("0", 0), ("11100", 3)],
)
def test_usable_prefix(mask, expected):
    assert usable_prefix(ErasurePattern.from_bitmask(mask)) == expected


def test_steps_per_frame():
    assert steps_per_frame(ErasurePattern.from_bitmask("11100")) == [0, 0, 0, 1, 2]
    assert steps_per_frame(ErasurePattern.from_bitmask("00000")) == [1, 2, 3, 4, 5]
    assert steps_per_frame(ErasurePattern.tail(4, 0)) == [0, 0, 0, 0]


def test_pattern_constructors():
    assert ErasurePattern.tail(5, 2).to_bitmask() == "11100"
    with pytest.raises(ParameterError):
        ErasurePattern.tail(3, 4)
    with pytest.raises(ParameterError):
        ErasurePattern.from_bitmask("1x0")
    with pytest.raises(ParameterError):
        ErasurePattern.iid(3, 1.5, np.random.default_rng(0))
    assert ErasurePattern.iid(6, 0.0, np.random.default_rng(0)).received == (True,) * 6
    assert ErasurePattern.iid(6, 1.0, np.random.default_rng(0)).received == (False,) * 6


def _trace(p, d, seed=0):
    x = sample_gop(p, seed)
    return x, encode_decode_gop(x, p, d, seed)


def test_nothing_lost_returns_reconstruction():
    p = SourceParams.constant(4, 32, 0.9)
    d = DistortionTuple.common(4, 0.1)
    _, trace = _trace(p, d)
    rec = predict_lost_frames(trace, ErasurePattern.tail(4, 0), p, d)
    assert np.array_equal(rec.frames.values, trace.reconstructions.values)
    assert rec.k_per_frame == (0, 0, 0, 0)
    assert rec.analytic_mse == pytest.approx([0.1] * 4)


def test_perfect_correlation_repeats_last_reconstruction():
    p = SourceParams.constant(4, 32, 1.0)
    d = DistortionTuple.common(4, 0.1)
    _, trace = _trace(p, d)
    rec = predict_lost_frames(trace, ErasurePattern.tail(4, 1), p, d)
    assert np.array_equal(rec.frames.values[3], trace.reconstructions.values[2])
    assert rec.analytic_mse[3] == d.effective[2]


def test_received_after_loss_is_ignored():
    p = SourceParams(M=4, n=16, rho=-0.7, variances=(1.0, 2.0, 0.5, 3.0))
    d = DistortionTuple((0.2, 0.2, 0.2, 0.2))
    _, trace = _trace(p, d)
    rec = predict_lost_frames(trace, ErasurePattern.from_bitmask("1101"), p, d)
    xhat = trace.reconstructions.values
    assert rec.k_per_frame == (0, 0, 1, 2)
    # signed gain rho**k * sigma_t / sigma_{t-k}
    assert np.allclose(rec.frames.values[3], (-0.7) ** 2 * math.sqrt(3.0 / 2.0) * xhat[1], rtol=1e-15)
    assert rec.analytic_mse[3] == kstep_variance(p, d, 4, 2)


def test_full_loss_is_zero_predictor():
    p = SourceParams.constant(3, 16, 0.9, 2.0)
    d = DistortionTuple.common(3, 0.1)
    _, trace = _trace(p, d)
    rec = predict_lost_frames(trace, ErasurePattern.from_bitmask("000"), p, d)
    assert np.array_equal(rec.frames.values, np.zeros((3, 16)))
    assert rec.analytic_mse == (2.0, 2.0, 2.0)


def test_length_mismatch():
    p = SourceParams.constant(3, 16, 0.9)
    d = DistortionTuple.common(3, 0.1)
    _, trace = _trace(p, d)
    with pytest.raises(ParameterError):
        predict_lost_frames(trace, ErasurePattern.tail(4, 1), p, d)


def test_tail_loss_mse_matches_kstep_variance():
    n = 262_144
    p = SourceParams.constant(5, n, 0.9)
    d = DistortionTuple.common(5, 0.1)
    x, trace = _trace(p, d, seed=4)
    rec = predict_lost_frames(trace, ErasurePattern.tail(5, 2), p, d)
    mse = empirical_distortion(x, rec.frames)
    assert rec.analytic_mse[4] == pytest.approx(0.40951, rel=1e-14)
    for t in range(5):
        v = rec.analytic_mse[t]
        assert abs(mse[t] - v) <= 4 * v * math.sqrt(2 / n)


def test_kstep_error_decomposition():
    """The k-step error equals propagated Z_{t-k} plus scaled innovations, sample by sample."""
    p = SourceParams(M=4, n=64, rho=0.8, variances=(1.0, 2.0, 0.5, 1.5))
    d = DistortionTuple.common(4, 0.1)
    x, trace = _trace(p, d, seed=2)
    rec = predict_lost_frames(trace, ErasurePattern.tail(4, 3), p, d)
    xv = x.values
    sig = np.sqrt(p.variances)
    z1 = xv[0] - trace.reconstructions.values[0]
    # innovations N_s = X_s - rho * sigma_s / sigma_{s-1} * X_{s-1}
    innov = [xv[s] - p.rho * sig[s] / sig[s - 1] * xv[s - 1] for s in range(1, 4)]
    t, k = 4, 3
    phi = p.rho**k * sig[t - 1] / sig[t - k - 1] * z1
    for j in range(1, k + 1):
        phi = phi + p.rho ** (k - j) * sig[t - 1] / sig[t - k + j - 1] * innov[j - 1]
    assert np.allclose(xv[3] - rec.frames.values[3], phi, atol=1e-12)
