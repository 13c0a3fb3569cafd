import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsch.errors import DomainError, SingularityError
from nsch.potential import (AssumptionReport, ClampTally, Phi, Phi_tilde,
                            Phi_values, PotentialParams, assumption_check,
                            assumption_samples, phi, phi_prime,
                            phi_prime_values, phi_tilde, phi_values, young_A,
                            young_Atilde)


class TestParams:
    def test_rejects_alpha_ordering(self):
        with pytest.raises(ValueError, match="0 < alpha0 < alpha"):
            PotentialParams(2.0, 1.0)
        with pytest.raises(ValueError, match="0 < alpha0 < alpha"):
            PotentialParams(1.0, 1.0)

    def test_rejects_bad_clamp_margin(self):
        with pytest.raises(ValueError):
            PotentialParams(1.0, 2.0, clamp_margin=0.0)
        with pytest.raises(ValueError):
            PotentialParams(1.0, 2.0, clamp_margin=0.01)


class TestPhi:
    def test_zero(self, params):
        assert Phi(0.0, params) == 0.0

    def test_endpoint_value(self, params):
        # (1/2)(2 ln 2) - 1 with the 0 ln 0 = 0 convention
        assert Phi(1.0, params) == pytest.approx(math.log(2.0) - 1.0, abs=1e-12)
        assert Phi(-1.0, params) == pytest.approx(math.log(2.0) - 1.0, abs=1e-12)

    def test_outside_interval_is_domain_error(self, params):
        with pytest.raises(DomainError):
            Phi(1.0 + 1e-12, params)

    @given(s=st.floats(min_value=-1.0, max_value=1.0))
    @settings(max_examples=200, deadline=None)
    def test_even_symmetry(self, s):
        p = PotentialParams(1.0, 2.0)
        assert Phi(s, p) == pytest.approx(Phi(-s, p), abs=1e-14)


class TestPhiDerivatives:
    def test_phi_at_zero(self, params):
        assert phi(0.0, params) == 0.0

    def test_phi_at_half(self, params):
        assert phi(0.5, params) == pytest.approx(0.5 * math.log(3.0) - 1.0, abs=1e-14)

    def test_phi_prime_at_zero(self, params):
        assert phi_prime(0.0, params) == pytest.approx(-1.0)

    @given(s=st.floats(min_value=-0.999999, max_value=0.999999))
    @settings(max_examples=200, deadline=None)
    def test_phi_is_odd(self, s):
        p = PotentialParams(1.0, 2.0)
        assert phi(s, p) == pytest.approx(-phi(-s, p), abs=1e-13)

    @given(s=st.floats(min_value=-0.999999, max_value=0.999999))
    @settings(max_examples=200, deadline=None)
    def test_lower_bound_is_strict(self, s):
        p = PotentialParams(1.0, 2.0)
        assert phi_prime(s, p) + p.alpha > 0.0

    def test_lower_bound_margin_identity(self, params):
        for s in (-0.9, -0.3, 0.0, 0.5, 0.99):
            margin = phi_prime(s, params) + params.alpha
            assert margin == pytest.approx(params.alpha0 / (1.0 - s * s), rel=1e-14)

    def test_singularity_error(self, params):
        for s in (1.0, -1.0, 1.5):
            with pytest.raises(SingularityError):
                phi(s, params)
            with pytest.raises(SingularityError):
                phi_prime(s, params)

    def test_clamp_records_event(self):
        p = PotentialParams(1.0, 2.0, clamp_margin=1e-6)
        tally = ClampTally()
        inside = phi(1.0 - 1e-5, p, tally)
        assert tally.events == 0
        clamped = phi(1.0 - 1e-8, p, tally)
        assert tally.events == 1
        assert clamped == phi(1.0 - 1e-6, p)
        assert inside != clamped

    def test_finite_difference_consistency(self, params):
        h = 1e-6
        for s in np.linspace(-0.999, 0.999, 501):
            fd_phi = (Phi(s + h, params) - Phi(s - h, params)) / (2 * h)
            fd_pp = (phi(s + h, params) - phi(s - h, params)) / (2 * h)
            scale1 = max(1.0, abs(phi(s, params)))
            scale2 = max(1.0, abs(phi_prime(s, params)))
            assert abs(fd_phi - phi(s, params)) / scale1 <= 1e-6
            assert abs(fd_pp - phi_prime(s, params)) / scale2 <= 1e-6


class TestShiftedVariants:
    def test_zero_values(self, params):
        assert phi_tilde(0.0, params) == 0.0
        assert Phi_tilde(0.0, params) == 0.0

    def test_phi_tilde_at_half(self, params):
        assert phi_tilde(0.5, params) == pytest.approx(0.5 * math.log(3.0), abs=1e-14)

    def test_phi_tilde_strictly_increasing(self, params):
        s = np.linspace(-0.9999, 0.9999, 2001)
        vals = [phi_tilde(x, params) for x in s]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_Phi_tilde_nonnegative(self, params):
        s = np.linspace(-1 + 1e-9, 1 - 1e-9, 10001)
        vals = np.array([Phi_tilde(x, params) for x in s])
        assert vals.min() >= -1e-15

    def test_matches_phi_plus_alpha_shift(self, params):
        for s in (-0.7, -0.1, 0.2, 0.8):
            assert phi_tilde(s, params) == pytest.approx(
                phi(s, params) - phi(0.0, params) + params.alpha * s, abs=1e-13)


class TestVectorizedEvaluators:
    def test_matches_scalar(self, params):
        s = np.linspace(-0.99, 0.99, 101)
        vec = phi_values(s, params)
        scal = np.array([phi(x, params) for x in s])
        assert np.abs(vec - scal).max() <= 1e-15

    def test_clamp_counts_all_entries(self):
        p = PotentialParams(1.0, 2.0, clamp_margin=1e-6)
        tally = ClampTally()
        s = np.array([0.0, 1.0 - 1e-8, -(1.0 - 1e-9), 0.5])
        phi_values(s, p, tally)
        assert tally.events == 2

    def test_strict_mode_raises_at_one(self, params):
        with pytest.raises(SingularityError):
            phi_values(np.array([0.0, 1.0]), params, clamp=False)

    def test_Phi_values_endpoint_convention(self, params):
        # clamped evaluation stays finite and close to the endpoint value
        v = Phi_values(np.array([1.0]), params, ClampTally())
        assert v[0] == pytest.approx(math.log(2.0) - 1.0, abs=1e-9)

    def test_phi_prime_values_match_scalar(self, params):
        s = np.linspace(-0.9, 0.9, 37)
        vec = phi_prime_values(s, params)
        scal = np.array([phi_prime(x, params) for x in s])
        assert np.abs(vec - scal).max() <= 1e-15


class TestAssumptionCheck:
    def test_valid_params_pass(self, params):
        report = assumption_check(params, n_samples=10**4)
        assert isinstance(report, AssumptionReport)
        assert report.passed
        assert report.worst_lower_margin > 0.0
        assert report.worst_growth_margin >= 0.0

    def test_samples_reach_refinement_floor(self):
        s = assumption_samples(10**4)
        assert 1.0 - np.abs(s).max() <= 1.5e-9
        assert np.abs(s).max() < 1.0

    def test_other_parameter_pairs(self):
        for a0, a in ((0.5, 1.0), (1.0, 4.0), (0.1, 0.2)):
            assert assumption_check(PotentialParams(a0, a), n_samples=2000).passed


class TestYoungPair:
    def test_zeros(self):
        assert young_A(0.0) == 0.0
        assert young_Atilde(0.0) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            young_A(-0.1)
        with pytest.raises(DomainError):
            young_Atilde(-0.1)

    def test_unit_pair_value(self):
        total = young_A(1.0) + young_Atilde(1.0)
        assert total == pytest.approx((math.e - 2.0) + (2.0 * math.log(2.0) - 1.0), abs=1e-14)
        assert 1.0 <= total

    @given(q=st.floats(min_value=1e-9, max_value=50.0))
    @settings(max_examples=300, deadline=None)
    def test_equality_case(self, q):
        p = math.log1p(q)
        assert abs(p * q - (young_A(p) + young_Atilde(q))) <= 1e-12 * max(1.0, p * q)

    @given(p=st.floats(min_value=0.0, max_value=50.0),
           q=st.floats(min_value=0.0, max_value=50.0))
    @settings(max_examples=500, deadline=None)
    def test_young_inequality(self, p, q):
        assert p * q <= young_A(p) + young_Atilde(q) + 1e-9

    @given(s=st.floats(min_value=0.0, max_value=100.0))
    @settings(max_examples=300, deadline=None)
    def test_atilde_upper_bound(self, s):
        assert young_Atilde(s) <= s * math.log1p(s) + 1e-12
