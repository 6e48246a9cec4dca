"""Closed-form AoI metrics for the infinite-buffer, infinite-reservoir queue.

The stationary sojourn and waiting times are mixtures of two exponentials
with rates lam/sigma*(1-sigma) and (mu2-lam); everything here follows from
integrating those mixtures against the Poisson arrival process.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .errors import EmptyFeasibleRegion, StabilityViolation
from .model import (
    ModelParams,
    eta,
    require_stability_infinite,
    sigma,
    stability_infinite,
    zeta,
)


@dataclass(frozen=True)
class AoiMetrics:
    """Stationary age metrics and the expectations they are built from.

    ``mean_aoi`` is only available for the infinite-buffer, infinite-reservoir
    case; ``mean_waiting``/``mean_service`` only where the waiting-time
    distribution is known in closed form.
    """

    mean_peak_aoi: float
    mean_sojourn: float
    blocking_prob: float = 0.0
    mean_aoi: float | None = None
    mean_waiting: float | None = None
    mean_service: float | None = None


def sojourn_ccdf(params: ModelParams, s: float) -> float:
    """P(S > s) for the stationary sojourn time of a delivered packet."""
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    z = zeta(params)
    sg = sigma(params)
    lam, mu2 = params.lam, params.mu2
    return z * math.exp(-lam / sg * (1.0 - sg) * s) + (1.0 - z) * math.exp(-(mu2 - lam) * s)


def waiting_ccdf(params: ModelParams, s: float) -> float:
    """P(W > s) for the stationary waiting time."""
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    z = zeta(params)
    e = eta(params)
    sg = sigma(params)
    lam, mu2 = params.lam, params.mu2
    return z * sg * math.exp(-lam / sg * (1.0 - sg) * s) + e * math.exp(-(mu2 - lam) * s)


def mean_sojourn_inf(params: ModelParams) -> float:
    """E[S]: integral of the sojourn CCDF."""
    z = zeta(params)
    sg = sigma(params)
    lam, mu2 = params.lam, params.mu2
    return z * sg / (lam * (1.0 - sg)) + (1.0 - z) / (mu2 - lam)


def mean_waiting_inf(params: ModelParams) -> float:
    """E[W]: integral of the waiting CCDF."""
    z = zeta(params)
    e = eta(params)
    sg = sigma(params)
    lam, mu2 = params.lam, params.mu2
    return z * sg * sg / (lam * (1.0 - sg)) + e / (mu2 - lam)


def mean_service_inf(params: ModelParams) -> float:
    """E[X] = E[S] - E[W], expanded; always lies in [1/mu1, 1/mu2]."""
    z = zeta(params)
    sg = sigma(params)
    lam, mu1, mu2 = params.lam, params.mu1, params.mu2
    return z * sg / lam + (1.0 - sg) * (
        lam * mu2 - mu1 * mu2 * sg - lam * lam + lam * mu1 * sg
    ) / ((mu2 - lam) * (lam - mu2 * sg) * (mu2 - mu1 * sg))


def mean_aoi_inf_inf(params: ModelParams) -> float:
    """Mean AoI of the infinite-buffer, infinite-reservoir queue.

    E[AoI] = E[WA]/E[A] + E[X] + E[A^2]/(2 E[A]) with exponential
    interarrivals; reduces to the classic M/M/1 expression when mu1 = mu2.
    """
    if not params.infinite_buffer or not params.infinite_reservoir:
        raise ValueError("mean AoI closed form requires an infinite buffer and reservoir")
    require_stability_infinite(params)
    z = zeta(params)
    sg = sigma(params)
    lam, mu2 = params.lam, params.mu2
    slow_rate = lam / sg * (1.0 - sg)  # rate of the reservoir-limited exponential mode
    # lam * E[WA]: waiting correlated with the preceding interarrival gap
    lam_ewa = lam * z * sg / ((1.0 - sg) * (lam + slow_rate) ** 2) + lam * lam * (
        1.0 - z
    ) / ((mu2 - lam) * mu2 * mu2)
    return lam_ewa + mean_service_inf(params) + 1.0 / lam


def mean_peak_aoi_inf(params: ModelParams) -> float:
    """Mean peak AoI with an infinite buffer: 1/lam + E[S]."""
    return 1.0 / params.lam + mean_sojourn_inf(params)


def aoi_metrics_infinite(params: ModelParams) -> AoiMetrics:
    """All closed-form metrics for the infinite-buffer, infinite-reservoir case."""
    es = mean_sojourn_inf(params)
    ew = mean_waiting_inf(params)
    return AoiMetrics(
        mean_peak_aoi=1.0 / params.lam + es,
        mean_sojourn=es,
        blocking_prob=0.0,
        mean_aoi=mean_aoi_inf_inf(params),
        mean_waiting=ew,
        mean_service=es - ew,
    )


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def find_optimal_lambda(
    base: ModelParams,
    lam_lo: float,
    lam_hi: float,
    metric: str | Callable[[ModelParams], float] = "mean-aoi",
    grid_step: float = 1e-3,
    refine_tol: float = 1e-4,
) -> tuple[float, float]:
    """Arrival rate minimizing the chosen metric over [lam_lo, lam_hi].

    ``base.lam`` is ignored.  Grid search (step ``grid_step``) locates the
    basin, golden-section refines to ``refine_tol``.  Grid points outside the
    stability region are skipped; raises EmptyFeasibleRegion if none remain.
    """
    if isinstance(metric, str):
        fn = {"mean-aoi": mean_aoi_inf_inf, "peak-aoi": mean_peak_aoi_inf}.get(metric)
        if fn is None:
            raise ValueError(f"unknown metric {metric!r}")
    else:
        fn = metric

    def evaluate(lam: float) -> float:
        try:
            return fn(replace(base, lam=lam))
        except StabilityViolation:
            return math.inf

    best_lam = math.nan
    best_val = math.inf
    n_steps = int(math.floor((lam_hi - lam_lo) / grid_step + 1e-9))
    for i in range(n_steps + 1):
        lam = min(lam_lo + i * grid_step, lam_hi)
        val = evaluate(lam)
        if val < best_val:
            best_val, best_lam = val, lam
    if not math.isfinite(best_val):
        raise EmptyFeasibleRegion(
            f"no arrival rate in [{lam_lo}, {lam_hi}] satisfies the stability condition"
        )

    a = max(lam_lo, best_lam - grid_step)
    b = min(lam_hi, best_lam + grid_step)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = evaluate(c), evaluate(d)
    while b - a > refine_tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = evaluate(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = evaluate(d)
    lam_star = 0.5 * (a + b)
    val_star = evaluate(lam_star)
    if val_star <= best_val:
        return lam_star, val_star
    return best_lam, best_val
