import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmrdr import (
    DistortionTuple,
    ParameterError,
    SourceParams,
    distortion_from_rates,
    innovation_schedule,
    kstep_variance,
    kstep_variance_series,
    log_plus,
    per_frame_rate,
    sum_rate,
)

from oracles import hp_kstep, hp_schedule, hp_sum_rate

# frozen from oracles.py (50-digit evaluation with the float inputs rho=0.9, D=0.1)
SIGMA2_W2 = 0.27099999999999996852517725187681
RATE_2 = 0.71914642578957330865603477684306
SUM_RATE_M3 = 3.0992568990228277512043979707444
KSTEP_2 = 0.40950999999999994536870051575761


def test_log_plus():
    assert log_plus(1.0) == 0.0
    assert log_plus(0.5) == 0.0
    assert log_plus(8.0) == 3.0
    for bad in (0.0, -1.0, float("nan")):
        with pytest.raises(ParameterError):
            log_plus(bad)


def test_per_frame_rate():
    assert per_frame_rate(0.3, 0.3) == 0.0
    assert per_frame_rate(1.0, 0.25) == 1.0
    assert per_frame_rate(0.2, 0.4) == 0.0
    assert per_frame_rate(SIGMA2_W2, 0.1) == pytest.approx(RATE_2, rel=1e-14)
    with pytest.raises(ParameterError):
        per_frame_rate(0.0, 1.0)
    with pytest.raises(ParameterError):
        per_frame_rate(1.0, -1.0)


def test_schedule_first_frame_and_worked_value():
    p = SourceParams.constant(3, 1, 0.9)
    d = DistortionTuple.common(3, 0.1)
    sw = innovation_schedule(p, d)
    assert sw[0] == 1.0
    assert sw[1] == pytest.approx(SIGMA2_W2, rel=1e-14)
    assert d.effective == [0.1, 0.1, 0.1]


def test_schedule_rho_zero_is_frame_variance():
    p = SourceParams(M=3, n=1, rho=0.0, variances=(2.0, 0.5, 7.0))
    assert innovation_schedule(p, DistortionTuple((0.1, 0.1, 0.1))) == [2.0, 0.5, 7.0]


def test_schedule_length_mismatch():
    with pytest.raises(ParameterError):
        innovation_schedule(SourceParams.constant(3, 1, 0.5), DistortionTuple.common(2, 0.1))


def test_distortion_tuple_rejects_nonpositive():
    with pytest.raises(ParameterError):
        DistortionTuple((0.1, 0.0))
    with pytest.raises(ParameterError):
        DistortionTuple(())


def test_sum_rate_worked_examples():
    single = sum_rate(SourceParams.constant(1, 1, 0.3), DistortionTuple((0.25,)))
    assert single.sum_rate_bits == 1.0
    report = sum_rate(SourceParams.constant(3, 1, 0.9), DistortionTuple.common(3, 0.1))
    assert report.sum_rate_bits == pytest.approx(SUM_RATE_M3, rel=1e-14)
    assert abs(report.sum_rate_bits - 3.0992) < 1e-4


def test_sum_rate_independent_sources():
    var = (1.0, 3.0, 0.5)
    targets = (0.2, 0.5, 1.0)
    report = sum_rate(SourceParams(M=3, n=1, rho=0.0, variances=var), DistortionTuple(targets))
    expected = [0.5 * max(0.0, math.log2(v / d)) for v, d in zip(var, targets)]
    assert list(report.rates_bits) == pytest.approx(expected, rel=1e-15)


def test_clipping_propagates_effective_distortion():
    p = SourceParams.constant(4, 1, 0.9)
    d = DistortionTuple((0.1, 0.5, 0.1, 0.1))
    report = sum_rate(p, d)
    sw, eff, rates = hp_schedule(0.9, (1.0,) * 4, d.targets)
    assert report.rates_bits[1] == 0.0
    assert report.effective_distortions[1] == report.innovation_variances[1]
    assert report.innovation_variances[2] == pytest.approx(float(sw[2]), rel=1e-14)
    assert report.innovation_variances[2] == pytest.approx(KSTEP_2, rel=1e-14)
    assert list(report.rates_bits) == pytest.approx([float(r) for r in rates], rel=1e-14)


def test_kstep_worked_values():
    p = SourceParams.constant(5, 1, 0.9)
    d = DistortionTuple.common(5, 0.1)
    assert kstep_variance(p, d, 3, 2) == pytest.approx(KSTEP_2, rel=1e-14)
    assert kstep_variance(p, d, 4, 0) == 0.1
    assert kstep_variance(p, d, 4, 1) == innovation_schedule(p, d)[3]
    assert kstep_variance(p, d, 4, 4) == 1.0
    for t in range(1, 6):
        for k in range(t + 1):
            expected = float(hp_kstep(0.9, (1.0,) * 5, (0.1,) * 5, t, k))
            assert kstep_variance(p, d, t, k) == pytest.approx(expected, rel=1e-13)


def test_kstep_argument_checks():
    p = SourceParams.constant(3, 1, 0.9)
    d = DistortionTuple.common(3, 0.1)
    with pytest.raises(ParameterError):
        kstep_variance(p, d, 2, 3)
    with pytest.raises(ParameterError):
        kstep_variance(p, d, 4, 0)
    with pytest.raises(ParameterError):
        kstep_variance(p, d, 2, -1)


def test_kstep_full_loss_series_agrees():
    p = SourceParams(M=4, n=1, rho=0.8, variances=(1.0, 2.0, 0.5, 4.0))
    d = DistortionTuple((0.3, 0.2, 0.1, 0.5))
    for t in range(1, 5):
        assert kstep_variance_series(p, d, t, t) == pytest.approx(p.variances[t - 1], rel=1e-13)


def test_kstep_monotone_in_k_and_saturates():
    p = SourceParams.constant(30, 1, 0.95)
    d = DistortionTuple.common(30, 0.05)
    values = [kstep_variance(p, d, 30, k) for k in range(30)]
    assert all(b > a for a, b in zip(values, values[1:]))
    for k, v in enumerate(values):
        gap = 1.0 - v
        assert gap <= 0.95 ** (2 * k) * (1.0 - 0.05) * (1 + 1e-12)


def test_distortion_from_rates_examples():
    assert distortion_from_rates(SourceParams.constant(1, 1, 0.0), [1.0]).targets == (0.25,)
    p = SourceParams.constant(3, 1, 0.9)
    zero = distortion_from_rates(p, [0.0, 0.0, 0.0])
    assert zero.targets == (1.0, 1.0, 1.0)
    d = distortion_from_rates(SourceParams.constant(2, 1, 0.9), [1.6610, 0.7191])
    assert d.targets == pytest.approx((0.1, 0.1), abs=1e-4)
    with pytest.raises(ParameterError):
        distortion_from_rates(p, [0.1, -0.1, 0.0])
    with pytest.raises(ParameterError):
        distortion_from_rates(p, [0.1])


def test_zero_rates_give_zero_coding_gain_schedule():
    p = SourceParams(M=3, n=1, rho=0.6, variances=(1.0, 2.0, 3.0))
    d = distortion_from_rates(p, [0.0, 0.0, 0.0])
    assert d.targets == pytest.approx(p.variances, rel=1e-15)


# ---------------------------------------------------------------- properties

variances_st = st.floats(0.1, 10.0)


@st.composite
def models(draw, max_m=8):
    M = draw(st.integers(1, max_m))
    rho = draw(st.floats(-0.999, 0.999))
    var = draw(st.lists(variances_st, min_size=M, max_size=M))
    fracs = draw(st.lists(st.floats(1e-3, 2.0), min_size=M, max_size=M))
    return SourceParams(M=M, n=1, rho=rho, variances=tuple(var)), DistortionTuple(
        tuple(f * v for f, v in zip(fracs, var))
    )


@settings(max_examples=200, deadline=None)
@given(models())
def test_schedule_bounded_by_frame_variance(model):
    p, d = model
    sw = innovation_schedule(p, d)
    assert sw[0] == p.variances[0]
    for s, v, e, target in zip(sw, p.variances, d.effective, d.targets):
        assert s <= v * (1 + 1e-12)
        assert e <= target and e <= s


@settings(max_examples=200, deadline=None)
@given(models())
def test_sum_rate_matches_high_precision(model):
    p, d = model
    report = sum_rate(p, d)
    expected = float(hp_sum_rate(p.rho, p.variances, d.targets))
    assert report.sum_rate_bits == pytest.approx(expected, rel=1e-11, abs=1e-12)
    assert all(r >= 0 for r in report.rates_bits)


@settings(max_examples=100, deadline=None)
@given(models(max_m=6), st.integers(0, 5), st.floats(1.001, 1.5))
def test_sum_rate_nonincreasing_in_each_target(model, idx, factor):
    p, d = model
    idx %= p.M
    base = sum_rate(p, d).sum_rate_bits
    bumped = list(d.targets)
    bumped[idx] *= factor
    assert sum_rate(p, DistortionTuple(tuple(bumped))).sum_rate_bits <= base + 1e-12


@settings(max_examples=200, deadline=None)
@given(models())
def test_clipped_frames_have_zero_rate(model):
    p, d = model
    report = sum_rate(p, d)
    for s, target, e, r in zip(
        report.innovation_variances, d.targets, report.effective_distortions, report.rates_bits
    ):
        if target >= s:
            assert r == 0.0 and e == s


@settings(max_examples=200, deadline=None)
@given(models(), st.data())
def test_kstep_between_own_distortion_and_variance(model, data):
    p, d = model
    t = data.draw(st.integers(1, p.M))
    k = data.draw(st.integers(0, t))
    v = kstep_variance(p, d, t, k)
    innovation_schedule(p, d)
    if k < t:
        lower = d.effective[t - k - 1] * p.rho ** (2 * k) * p.variances[t - 1] / p.variances[t - k - 1]
        assert v >= lower * (1 - 1e-12)
    assert v <= p.variances[t - 1] * (1 + 1e-12)
    assert kstep_variance_series(p, d, t, k) == pytest.approx(v, rel=1e-12)
