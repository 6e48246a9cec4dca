"""Parameter validation, derived constants, and stability predicates."""
import math

import pytest
from hypothesis import given, settings

from aoi_fluid import (
    DerivedConstants,
    ModelParams,
    StabilityViolation,
    derived_constants,
    eta,
    sigma,
    stability_finite_buffer,
    stability_infinite,
    zeta,
)
from aoi_fluid.model import require_stability_finite, require_stability_infinite

from .conftest import stable_params

REF = ModelParams(1.0, 2.0, 1.5, 1.0, 2.0)


class TestValidation:
    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError, match="lam"):
            ModelParams(-1.0, 2.0, 1.5, 1.0, 2.0)

    def test_nan_rate_rejected(self):
        with pytest.raises(ValueError):
            ModelParams(math.nan, 2.0, 1.5, 1.0, 2.0)

    def test_infinite_mu1_rejected(self):
        with pytest.raises(ValueError):
            ModelParams(1.0, math.inf, 1.5, 1.0, 2.0)

    def test_mu2_above_mu1_rejected(self):
        with pytest.raises(ValueError, match="mu2"):
            ModelParams(1.0, 1.0, 1.5, 1.0, 2.0)

    def test_mu2_zero_allowed(self):
        p = ModelParams(1.0, 2.0, 0.0, 1.0, 2.0)
        assert p.mu2 == 0.0

    def test_bad_buffer_rejected(self):
        with pytest.raises(ValueError, match="buffer"):
            ModelParams(1.0, 2.0, 1.5, 1.0, 2.0, buffer=0)
        with pytest.raises(ValueError, match="buffer"):
            ModelParams(1.0, 2.0, 1.5, 1.0, 2.0, buffer=2.5)

    def test_nonpositive_reservoir_rejected(self):
        with pytest.raises(ValueError, match="reservoir"):
            ModelParams(1.0, 2.0, 1.5, 1.0, 2.0, reservoir=0.0)

    def test_flags(self):
        assert REF.infinite_buffer and REF.infinite_reservoir
        p = ModelParams(1.0, 2.0, 1.5, 1.0, 2.0, buffer=3, reservoir=2.0)
        assert not p.infinite_buffer and not p.infinite_reservoir

    def test_frozen(self):
        with pytest.raises(Exception):
            REF.lam = 2.0  # type: ignore[misc]


class TestDerivedConstants:
    def test_reference_values(self):
        # Hand-derived for lam=1, mu1=2, mu2=1.5, r+=1, r-=2.
        assert sigma(REF) == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert zeta(REF) == pytest.approx(0.2, abs=1e-12)
        assert eta(REF) == pytest.approx(8.0 / 15.0, abs=1e-12)

    def test_bundle(self):
        d = derived_constants(REF)
        assert d == DerivedConstants(sigma(REF), zeta(REF), eta(REF))

    @settings(max_examples=200, deadline=None)
    @given(stable_params())
    def test_zeta_in_unit_interval(self, params):
        assert 0.0 <= zeta(params) < 1.0

    @settings(max_examples=100, deadline=None)
    @given(stable_params())
    def test_eta_reduces_to_utilization_when_unregulated(self, params):
        flat = ModelParams(params.lam, params.mu2, params.mu2, params.r_plus, params.r_minus)
        if stability_infinite(flat):
            assert eta(flat) == pytest.approx(flat.lam / flat.mu2, rel=1e-9)
            assert zeta(flat) == pytest.approx(0.0, abs=1e-12)


class TestStability:
    def test_infinite_region(self):
        assert stability_infinite(REF)
        assert not stability_infinite(ModelParams(1.6, 2.0, 1.5, 1.0, 2.0))  # queue unstable
        assert not stability_infinite(ModelParams(0.6, 2.0, 1.5, 1.0, 2.0))  # reservoir unstable
        assert not stability_infinite(ModelParams(1.0, 2.0, 0.0, 1.0, 2.0))

    def test_boundary_rejected(self):
        # lam/mu1 exactly equal to sigma sits on the boundary and must fail.
        p = ModelParams(2.0 / 3.0, 2.0, 1.5, 1.0, 2.0)
        with pytest.raises(StabilityViolation):
            require_stability_infinite(p)

    def test_require_accepts_interior(self):
        require_stability_infinite(REF)  # must not raise

    def test_finite_buffer_condition(self):
        p = ModelParams(1.0, 2.0, 1.5, 1.0, 2.0)
        # rho = 0.5: partial sums 0.5, 0.75, ... vs r+/r- = 0.5.
        assert not stability_finite_buffer(p, 1)
        assert stability_finite_buffer(p, 2)
        with pytest.raises(StabilityViolation):
            require_stability_finite(p, 1)
        require_stability_finite(p, 2)

    def test_finite_buffer_monotone_in_n(self):
        p = ModelParams(0.7, 1.0, 0.8, 1.0, 1.2)
        ok = [stability_finite_buffer(p, n) for n in range(1, 8)]
        # Once the busy fraction is large enough it stays large.
        assert ok == sorted(ok)

    def test_bad_buffer_size(self):
        with pytest.raises(ValueError):
            stability_finite_buffer(REF, 0)
