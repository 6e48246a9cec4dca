"""Stationary distribution and peak AoI for the finite-buffer queue.

The number-in-system chain of the N-packet system is solved through a pair of
forward recursions driven by the negative zero xi0 of a three-term polynomial
recurrence.  The recurrence is the characteristic polynomial of a symmetric
tridiagonal (Jacobi) matrix, so its zeros are the matrix eigenvalues; each
negative zero is tried and the one producing a nonnegative solution is kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .analytic import AoiMetrics
from .errors import RootNotFound, SingularSystem
from .model import ModelParams, require_stability_finite

#: Entries of the stationary solution may dip this far below zero and still
#: count as nonnegative (root-selection and validity threshold).
_NONNEG_TOL = 1e-12


@dataclass(frozen=True)
class StationaryDistribution:
    """Limiting probabilities p_i of i packets in system, with the auxiliary
    vector y_i and the polynomial zero xi0 that generated them."""

    n: int
    p: np.ndarray
    y: np.ndarray
    xi0: float


def poly_p(n: int, x: float, params: ModelParams) -> float:
    """Value of the degree-n characteristic polynomial at x.

    The zeros of the degree-N member are the nonzero decay exponents of the
    fluid-level density when N packets fit in the system.  The recurrence is
    P_0 = 1, P_1 = x + lam/r+ - mu1/r-, then
    P_k = (x - (lam+mu1)/r-) P_{k-1} - (lam*mu1/r-^2) P_{k-2}.
    The sign of the middle coefficient is fixed by the balance closure at
    queue length N; it is cross-checked against simulation in the tests.
    """
    if n < 0:
        raise ValueError(f"polynomial index must be >= 0, got {n}")
    lam, mu1 = params.lam, params.mu1
    rp, rm = params.r_plus, params.r_minus
    prev = 1.0
    if n == 0:
        return prev
    cur = x + lam / rp - mu1 / rm
    a = (lam + mu1) / rm
    b = lam * mu1 / (rm * rm)
    for _ in range(2, n + 1):
        prev, cur = cur, (x - a) * cur - b * prev
    return cur


def _poly_p_with_derivative(n: int, x: float, params: ModelParams) -> tuple[float, float]:
    lam, mu1 = params.lam, params.mu1
    rp, rm = params.r_plus, params.r_minus
    prev, dprev = 1.0, 0.0
    cur, dcur = x + lam / rp - mu1 / rm, 1.0
    if n == 0:
        return prev, dprev
    a = (lam + mu1) / rm
    b = lam * mu1 / (rm * rm)
    for _ in range(2, n + 1):
        nxt = (x - a) * cur - b * prev
        dnxt = cur + (x - a) * dcur - b * dprev
        prev, dprev, cur, dcur = cur, dcur, nxt, dnxt
    return cur, dcur


def _poly_zeros(n: int, params: ModelParams) -> np.ndarray:
    """All real zeros of the degree-n polynomial, Newton-polished.

    The monic recurrence P_k = (x - a_k) P_{k-1} - b P_{k-2} with constant
    b > 0 makes the zeros the eigenvalues of a symmetric tridiagonal matrix
    with diagonal (a_1, a, ..., a) and off-diagonal sqrt(b).  Only a_1 can be
    negative, so under reservoir stability exactly one zero is negative.
    """
    lam, mu1 = params.lam, params.mu1
    rp, rm = params.r_plus, params.r_minus
    diag = np.full(n, (lam + mu1) / rm)
    diag[0] = mu1 / rm - lam / rp
    off = np.full(max(n - 1, 0), math.sqrt(lam * mu1) / rm)
    zeros = eigh_tridiagonal(diag, off, eigvals_only=True)
    for i, x in enumerate(zeros):
        for _ in range(50):
            value, slope = _poly_p_with_derivative(n, x, params)
            if abs(value) <= 1e-12 or slope == 0.0:
                break
            step = value / slope
            x -= step
            if abs(step) <= 1e-15 * max(1.0, abs(x)):
                break
        zeros[i] = x
    return zeros


def _solve_for_root(n: int, params: ModelParams, xi0: float) -> tuple[np.ndarray, np.ndarray] | None:
    """Forward recursions for (p, y) given a candidate zero; None if the
    normalized probabilities have negative entries.

    Only p is required to be nonnegative: the auxiliary y_i are expansion
    coefficients of the fluid-level density and can legitimately change sign
    (they do at the unique negative zero for some stable parameter sets).
    """
    lam, mu1, mu2 = params.lam, params.mu1, params.mu2
    rp, rm = params.r_plus, params.r_minus
    y = np.empty(n + 1)
    p = np.empty(n + 1)
    y[0] = 1.0
    y[1] = (lam + rp * xi0) * y[0] / mu1
    for i in range(1, n):
        y[i + 1] = ((lam + mu1 - rm * xi0) * y[i] - lam * y[i - 1]) / mu1
    p[0] = y[0]
    for i in range(n):
        p[i + 1] = (lam * p[i] - (mu1 - mu2) * y[i + 1]) / mu2
    total = p.sum()
    if not math.isfinite(total) or total <= _NONNEG_TOL:
        return None
    p /= total
    y /= total
    if (p < -_NONNEG_TOL).any():
        return None
    return p, y


def find_xi0(n: int, params: ModelParams) -> float:
    """The negative polynomial zero whose solution is a valid distribution.

    More than one negative zero can exist; candidates are tried from the one
    closest to zero outward and the first producing nonnegative probabilities
    wins (the stationary distribution is unique; selection is cross-checked
    against simulation in the test suite).
    """
    require_stability_finite(params, n)
    if params.mu2 <= 0:
        raise ValueError("mu2 must be positive for the stationary solver")
    zeros = _poly_zeros(n, params)
    candidates = sorted((x for x in zeros if x < 0), key=abs)
    for xi0 in candidates:
        if _solve_for_root(n, params, xi0) is not None:
            return float(xi0)
    raise RootNotFound(
        f"none of the negative zeros {candidates} yields a nonnegative solution for n={n}"
    )


def solve_stationary_finite(n: int, params: ModelParams) -> StationaryDistribution:
    """Stationary distribution of the number in system for buffer size n."""
    require_stability_finite(params, n)
    if params.mu2 <= 0:
        raise ValueError("mu2 must be positive for the stationary solver")
    zeros = _poly_zeros(n, params)
    candidates = sorted((x for x in zeros if x < 0), key=abs)
    for xi0 in candidates:
        solution = _solve_for_root(n, params, xi0)
        if solution is not None:
            p, y = solution
            if abs(p.sum() - 1.0) > 1e-10:
                raise SingularSystem(f"normalization failed: sum p = {p.sum()}")
            return StationaryDistribution(n=n, p=p, y=y, xi0=float(xi0))
    raise RootNotFound(
        f"none of the negative zeros {candidates} yields a nonnegative solution for n={n}"
    )


def mean_peak_aoi_finite(n: int, params: ModelParams) -> AoiMetrics:
    """Mean peak AoI for buffer size n via the stationary distribution.

    Accepted packets arrive at rate lam*(1 - p_n); Little's law turns the mean
    number in system into the mean sojourn time.
    """
    dist = solve_stationary_finite(n, params)
    p = dist.p
    blocking = float(p[n])
    accepted_rate = params.lam * (1.0 - blocking)
    mean_number = float(np.arange(n + 1) @ p)
    mean_sojourn = mean_number / accepted_rate
    mean_interarrival = 1.0 / accepted_rate
    return AoiMetrics(
        mean_peak_aoi=mean_interarrival + mean_sojourn,
        mean_sojourn=mean_sojourn,
        blocking_prob=blocking,
    )


def mean_peak_aoi_mm11(params: ModelParams) -> float:
    """Closed-form mean peak AoI for the bufferless (N = 1) system."""
    require_stability_finite(params, 1)
    if params.mu2 <= 0:
        raise ValueError("mu2 must be positive for the closed-form peak AoI")
    lam, mu1, mu2 = params.lam, params.mu1, params.mu2
    ratio = params.r_plus / params.r_minus
    return (2.0 * ratio * (mu1 * mu2 - mu1 * mu1) + 2.0 * lam * mu1 + mu1 * mu2) / (
        lam * mu1 * mu2
    )
