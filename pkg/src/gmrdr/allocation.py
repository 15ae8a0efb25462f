"""Distortion tuples that spend a given sum-rate budget.

Two policies:

* common distortion: one D for every frame, found by bisection on log2 D;
* minimum weighted distortion: minimize sum_t w_t D_t subject to
  R_sum(D) <= budget.

The weighted problem is solved in rate coordinates. With D_t written as
sigma^2_{W_t} * 2**(-2 R_t), every D_t is a positive combination of
exponentials of linear forms in the rates, so the objective is smooth and
convex over the box R_t >= 0 (the zero-rate caps become the box bounds).
For a fixed multiplier lam, projected coordinate descent minimizes
objective + lam * sum(R) with a closed-form step per frame; bisection on lam
then matches the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ParameterError
from .rd_analytics import DistortionTuple, RateReport, distortion_from_rates, sum_rate
from .source_model import SourceParams

BUDGET_TOL = 1e-9
MAX_BISECTION = 200
_LN4 = 2.0 * math.log(2.0)


@dataclass(frozen=True)
class AllocationResult:
    policy: str
    budget_bits: float
    distortions: DistortionTuple
    report: RateReport
    objective_value: float
    iterations: int
    weights: tuple[float, ...]
    residual_history: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "budget_bits": self.budget_bits,
            "weights": list(self.weights),
            "target_distortions": list(self.distortions.targets),
            "effective_distortions": list(self.report.effective_distortions),
            "innovation_variances": list(self.report.innovation_variances),
            "rates_bits": list(self.report.rates_bits),
            "sum_rate_bits": self.report.sum_rate_bits,
            "objective_value": self.objective_value,
            "iterations": self.iterations,
        }


def _check_budget(budget_bits: float) -> float:
    budget_bits = float(budget_bits)
    if not (budget_bits >= 0.0 and math.isfinite(budget_bits)):
        raise ParameterError(f"budget must be finite and >= 0, got {budget_bits!r}")
    return budget_bits


def _common_rate(params: SourceParams, log2_d: float) -> float:
    return sum_rate(params, DistortionTuple.common(params.M, 2.0**log2_d)).sum_rate_bits


def allocate_common_distortion(
    params: SourceParams, budget_bits: float, tol: float = BUDGET_TOL
) -> AllocationResult:
    """Common D for the whole GOP whose sum-rate meets ``budget_bits``.

    The returned point is always on the feasible side (sum-rate <= budget);
    ``residual_history`` records budget - sum-rate at that side after each
    bisection step and never increases.
    """
    budget = _check_budget(budget_bits)
    weights = (1.0,) * params.M
    hi = math.log2(max(params.variances))
    history: list[float] = []
    iterations = 0
    if budget > 0.0:
        # frame 1 alone needs more than the budget below sigma_1^2 * 2**(-2B)
        lo = math.log2(params.variances[0]) - 2.0 * budget - 1.0
        if 2.0**lo == 0.0:
            raise ParameterError(f"budget of {budget} bits is beyond double precision range")
        rate_hi = 0.0
        while budget - rate_hi > tol and iterations < MAX_BISECTION:
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            iterations += 1
            rate = _common_rate(params, mid)
            if rate <= budget:
                hi, rate_hi = mid, rate
            else:
                lo = mid
            history.append(budget - rate_hi)
    d = DistortionTuple.common(params.M, 2.0**hi)
    report = sum_rate(params, d)
    return AllocationResult(
        policy="common",
        budget_bits=budget,
        distortions=d,
        report=report,
        objective_value=sum(report.effective_distortions),
        iterations=iterations,
        weights=weights,
        residual_history=tuple(history),
    )


def _distortions(params: SourceParams, rates: list[float]) -> tuple[list[float], list[float]]:
    """Innovation variances and distortions implied by per-frame rates."""
    var = params.variances
    r2 = params.rho**2
    sw: list[float] = []
    ds: list[float] = []
    for t, rate in enumerate(rates):
        s = var[0] if t == 0 else r2 * (var[t] / var[t - 1]) * ds[t - 1] + (1.0 - r2) * var[t]
        sw.append(s)
        ds.append(s * 2.0 ** (-2.0 * rate))
    return sw, ds


def _sensitivities(params: SourceParams, rates: list[float], weights: Sequence[float]) -> list[float]:
    """d(objective)/d(D_t) holding later rates fixed; later D_s are affine in D_t."""
    var = params.variances
    r2 = params.rho**2
    g = [0.0] * params.M
    g[-1] = weights[-1]
    for t in range(params.M - 2, -1, -1):
        slope = r2 * (var[t + 1] / var[t]) * 2.0 ** (-2.0 * rates[t + 1])
        g[t] = weights[t] + slope * g[t + 1]
    return g


def _coordinate_descent(
    params: SourceParams,
    weights: Sequence[float],
    lam: float,
    rates: list[float],
    tol: float = 1e-13,
    max_sweeps: int = 20000,
) -> list[float]:
    """Minimize sum_t w_t D_t + lam * sum_t R_t over R >= 0.

    With the other rates fixed, the objective restricted to R_t is
    G_t * sigma^2_{W_t} * 2**(-2 R_t) + lam * R_t, minimized at
    R_t = max(0, log2(ln4 * G_t * sigma^2_{W_t} / lam) / 2).
    """
    rates = list(rates)
    for _ in range(max_sweeps):
        change = 0.0
        for t in range(params.M):
            sw, _ = _distortions(params, rates)
            g = _sensitivities(params, rates, weights)
            new = max(0.0, 0.5 * math.log2(_LN4 * g[t] * sw[t] / lam))
            change = max(change, abs(new - rates[t]))
            rates[t] = new
        if change <= tol:
            break
    return rates


def _zero_rate_multiplier(params: SourceParams, weights: Sequence[float]) -> float:
    zero = [0.0] * params.M
    sw, _ = _distortions(params, zero)
    g = _sensitivities(params, zero, weights)
    return max(_LN4 * gt * st for gt, st in zip(g, sw))


def allocate_min_weighted_distortion(
    params: SourceParams,
    budget_bits: float,
    weights: Optional[Sequence[float]] = None,
    tol: float = BUDGET_TOL,
) -> AllocationResult:
    budget = _check_budget(budget_bits)
    if weights is None:
        weights = (1.0,) * params.M
    weights = tuple(float(w) for w in weights)
    if len(weights) != params.M:
        raise ParameterError(f"expected {params.M} weights, got {len(weights)}")
    if not all(w > 0.0 and math.isfinite(w) for w in weights):
        raise ParameterError("weights must be finite and > 0")

    start = allocate_common_distortion(params, budget, tol)
    rates = list(start.report.rates_bits)
    iterations = 0
    if budget == 0.0:
        rates = [0.0] * params.M
    else:
        # above lam_hi every rate is zero; shrink lam_lo until the budget is exceeded
        lam_hi = _zero_rate_multiplier(params, weights)
        best = [0.0] * params.M
        log_hi = math.log2(lam_hi)
        log_lo = log_hi - 2.0 * budget - 4.0
        while sum(_coordinate_descent(params, weights, 2.0**log_lo, rates)) <= budget:
            log_lo -= 2.0 * budget + 4.0
        while iterations < MAX_BISECTION:
            mid = 0.5 * (log_lo + log_hi)
            if mid in (log_lo, log_hi):
                break
            iterations += 1
            trial = _coordinate_descent(params, weights, 2.0**mid, rates)
            rates = trial
            if sum(trial) <= budget:
                log_hi, best = mid, trial
                if budget - sum(trial) <= tol:
                    break
            else:
                log_lo = mid
        rates = best

    d = distortion_from_rates(params, rates)
    report = sum_rate(params, d)
    objective = sum(w * de for w, de in zip(weights, report.effective_distortions))
    start_objective = sum(w * de for w, de in zip(weights, start.report.effective_distortions))
    if start_objective < objective:
        d, report, objective = start.distortions, start.report, start_objective
    return AllocationResult(
        policy="weighted",
        budget_bits=budget,
        distortions=d,
        report=report,
        objective_value=objective,
        iterations=iterations,
        weights=weights,
    )
