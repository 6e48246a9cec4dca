"""Parameterization of the fluid-reservoir-regulated transmitter queue.

The transmitter is a FCFS queue with Poisson arrivals (rate ``lam``).  Service
runs at rate ``mu1`` while the energy reservoir is non-empty and at rate
``mu2 <= mu1`` once it drains.  The reservoir fills at ``r_plus`` while the
server is idle and depletes at ``r_minus`` while it is busy, clamped to
``[0, reservoir]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import StabilityViolation

#: Margin below which a stability inequality counts as a borderline case.
#: Closed forms have poles on the boundary, so borderline parameters are
#: rejected rather than accepted.
BOUNDARY_MARGIN = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Full parameterization of the regulated queue.

    ``buffer`` is the number of packets the system can hold including the one
    in service (``None`` = infinite waiting room).  ``reservoir`` is the
    energy capacity (``math.inf`` = unlimited).
    """

    lam: float
    mu1: float
    mu2: float
    r_plus: float
    r_minus: float
    buffer: int | None = None
    reservoir: float = math.inf

    def __post_init__(self) -> None:
        for name in ("lam", "mu1", "r_plus", "r_minus"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite rate, got {value!r}")
        # mu2 = 0 is admissible (service stalls on an empty reservoir); the
        # closed-form peak-AoI operations reject it separately.
        if not (math.isfinite(self.mu2) and self.mu2 >= 0):
            raise ValueError(f"mu2 must be a nonnegative finite rate, got {self.mu2!r}")
        if self.mu2 > self.mu1:
            raise ValueError(f"mu2={self.mu2} must not exceed mu1={self.mu1}")
        if self.buffer is not None and (not isinstance(self.buffer, int) or self.buffer < 1):
            raise ValueError(f"buffer must be None (infinite) or an integer >= 1, got {self.buffer!r}")
        if not self.reservoir > 0:
            raise ValueError(f"reservoir capacity must be positive, got {self.reservoir!r}")

    @property
    def infinite_buffer(self) -> bool:
        return self.buffer is None

    @property
    def infinite_reservoir(self) -> bool:
        return math.isinf(self.reservoir)


@dataclass(frozen=True)
class DerivedConstants:
    """Constants of the sojourn/waiting distributions for the infinite queue."""

    sigma: float
    zeta: float
    eta: float


def sigma(params: ModelParams) -> float:
    """Long-run fraction of time the reservoir would fill, r+/(r+ + r-)."""
    return params.r_plus / (params.r_plus + params.r_minus)


def stability_infinite(params: ModelParams) -> bool:
    """Stability of the infinite-buffer queue: sigma < lam/mu1 <= lam/mu2 < 1.

    The left inequality keeps the reservoir stable (it empties with positive
    probability); the right ones keep the queue stable.
    """
    if params.mu2 == 0:
        return False
    s = sigma(params)
    return s < params.lam / params.mu1 <= params.lam / params.mu2 < 1.0


def require_stability_infinite(params: ModelParams) -> None:
    """Raise StabilityViolation unless the queue is strictly inside the stability region."""
    if params.mu2 == 0:
        raise StabilityViolation("mu2 = 0: infinite-buffer queue cannot be stable")
    s = sigma(params)
    if params.lam / params.mu1 - s <= BOUNDARY_MARGIN:
        raise StabilityViolation(
            f"reservoir unstable: sigma={s} is not strictly below lam/mu1={params.lam / params.mu1}"
        )
    if 1.0 - params.lam / params.mu2 <= BOUNDARY_MARGIN:
        raise StabilityViolation(
            f"queue unstable: lam/mu2={params.lam / params.mu2} is not strictly below 1"
        )


def stability_finite_buffer(params: ModelParams, n: int) -> bool:
    """Reservoir stability for a buffer of size n: sum_{k=1..n} (lam/mu1)^k > r+/r-."""
    if n < 1:
        raise ValueError(f"buffer size must be >= 1, got {n}")
    rho = params.lam / params.mu1
    return sum(rho**k for k in range(1, n + 1)) > params.r_plus / params.r_minus


def require_stability_finite(params: ModelParams, n: int) -> None:
    if n < 1:
        raise ValueError(f"buffer size must be >= 1, got {n}")
    rho = params.lam / params.mu1
    drift = sum(rho**k for k in range(1, n + 1)) - params.r_plus / params.r_minus
    if drift <= BOUNDARY_MARGIN:
        raise StabilityViolation(
            f"reservoir unstable for buffer {n}: busy-fraction margin {drift} is not positive"
        )


def zeta(params: ModelParams) -> float:
    """Mixture weight of the slow exponential mode of the sojourn distribution.

    Strictly below 1 inside the stability region; exactly 0 for the
    unregulated queue (mu1 = mu2).
    """
    require_stability_infinite(params)
    s = sigma(params)
    lam, mu1, mu2 = params.lam, params.mu1, params.mu2
    return (mu1 - mu2) * (mu2 - lam) * s / ((lam - mu2 * s) * (mu2 - mu1 * s))


def eta(params: ModelParams) -> float:
    """Weight of the fast mode of the waiting-time distribution.

    Uses the denominator (lam - mu2*sigma)(mu2 - mu1*sigma): the only form
    consistent with E[X] = E[S] - E[W] and with the unregulated limit, where
    eta reduces to lam/mu (the M/M/1 probability of waiting).
    """
    require_stability_infinite(params)
    s = sigma(params)
    lam, mu1, mu2 = params.lam, params.mu1, params.mu2
    return lam * (lam - mu1 * s) * (1.0 - s) / ((lam - mu2 * s) * (mu2 - mu1 * s))


def derived_constants(params: ModelParams) -> DerivedConstants:
    return DerivedConstants(sigma=sigma(params), zeta=zeta(params), eta=eta(params))
