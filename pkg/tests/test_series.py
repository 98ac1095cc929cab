"""Series assembly: truncation behavior, floor identities, scaling."""

import math

import pytest

from recipspec.coefficients import omega_n_general
from recipspec.errors import DomainError
from recipspec.series import (OmegaRatio, asymptotic_floor, autocorrelation,
                              autocovariance, denormalize, floor_partial)


class TestOmegaRatio:
    def test_construction(self):
        assert OmegaRatio(0.0).value == 0.0
        assert float(OmegaRatio(1.2)) == 1.2

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            OmegaRatio(-0.1)

    def test_from_mean_and_power(self):
        r = OmegaRatio.from_mean_and_power(3 + 4j, 25.0)
        assert r.value == pytest.approx(1.0)
        with pytest.raises(DomainError):
            OmegaRatio.from_mean_and_power(1.0, 0.0)


class TestFloor:
    def test_spot_values(self):
        assert asymptotic_floor(0.0) == 0.0
        assert asymptotic_floor(1.0) == pytest.approx((1 - math.exp(-1)) ** 2, rel=1e-15)
        assert asymptotic_floor(1.0) == pytest.approx(0.3995764, abs=5e-8)
        assert asymptotic_floor(1.2) == pytest.approx(
            ((1 - math.exp(-1.44)) / 1.2) ** 2, rel=1e-15)
        assert asymptotic_floor(1.2) == pytest.approx(0.404360587132, abs=1e-11)

    def test_partial_sum_converges_to_floor(self):
        for w in (0.25, 0.5, 1.0, 1.2):
            assert floor_partial(w, 40) == pytest.approx(
                asymptotic_floor(w), rel=1e-8)

    def test_accepts_omega_ratio(self):
        assert asymptotic_floor(OmegaRatio(1.0)) == asymptotic_floor(1.0)


class TestAutocorrelation:
    def test_omega_zero_reduces_to_order_zero(self):
        for order in (0, 8, 20):
            ev = autocorrelation(0.5, 0.0, order)
            assert ev.value == pytest.approx(omega_n_general(0, 0.5), rel=1e-14)

    def test_vanishing_r_gives_floor(self):
        ev = autocorrelation(1e-9, 1.0, 40)
        assert ev.value.real == pytest.approx((1 - math.exp(-1)) ** 2, rel=1e-7)

    def test_against_quadrature_oracle_spot(self):
        # frozen from the node-doubling study of the integral representation
        ev = autocorrelation(0.5, 0.5, 20)
        assert ev.value.real == pytest.approx(0.6048799253456, abs=1e-4)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            autocorrelation(1.0, 0.5)
        with pytest.raises(DomainError):
            autocorrelation(0.5, -0.2)
        with pytest.raises(DomainError):
            autocorrelation(0.5, 0.5, order=7)

    def test_term_decay_after_peak(self):
        # absolute convergence: term magnitudes decrease monotonically past
        # the peak.  The check stops at n = 22 because beyond that, at
        # |r| = 0.9, the true terms (~3e-8 of the peak) sit below the
        # coefficient cancellation noise of double precision, which grows
        # with the order; the trustworthy range shows seven decades of decay.
        r, w = 0.9, 1.2
        orders = list(range(0, 41, 2))
        terms = [abs(omega_n_general(n, r)) * w ** n / math.factorial(n)
                 for n in orders]
        peak = max(range(len(terms)), key=terms.__getitem__)
        upto = orders.index(22)
        assert peak < upto
        for i in range(peak, upto):
            assert terms[i + 1] < terms[i]
        assert min(terms) < 1e-7 * max(terms)

    def test_tail_flags(self):
        assert not autocorrelation(0.5, 0.0, 20).flagged  # zero tail at omega 0
        assert autocorrelation(0.5, 1.0, 20).flagged      # loose majorant kicks in
        ev = autocorrelation(0.2, 0.3, 20)
        assert ev.tail_bound < 1e-3 * abs(ev.value)
        assert not ev.flagged


class TestAutocovariance:
    def test_bitwise_identity_with_autocorrelation(self):
        for r, w in [(0.5, 1.0), (0.3, 0.5), (0.9, 1.2)]:
            cov = autocovariance(r, w, 20).value
            cor = autocorrelation(r, w, 20).value
            assert cov == cor - floor_partial(w, 20)

    def test_vanishing_r_vanishing_covariance(self):
        ev = autocovariance(1e-9, 0.7, 20)
        assert abs(ev.value) < 1e-7

    def test_omega_zero(self):
        ev = autocovariance(0.5, 0.0, 12)
        assert ev.value == pytest.approx(omega_n_general(0, 0.5), rel=1e-14)

    def test_against_oracle_minus_floor(self):
        from recipspec.oracle import QuadratureSpec, rss_quadrature
        tight = QuadratureSpec(angular_nodes=128, radial_nodes=96, v_max=16.0,
                               target_abs_tol=1e-5)
        quad = rss_quadrature(0.5, 1.0, tight).value
        cov = autocovariance(0.5, 1.0, 20).value
        reference = quad - asymptotic_floor(1.0)
        assert abs(cov - reference) < 1e-4

    def test_complex_r(self):
        import cmath
        r = 0.6 * cmath.exp(-0.4j)
        cov = autocovariance(r, 0.8, 20).value
        cor = autocorrelation(r, 0.8, 20).value
        assert cov == cor - floor_partial(0.8, 20)
        assert abs(cov.imag) > 0


class TestDenormalize:
    def test_examples(self):
        assert denormalize(0.575, 1.0) == 0.575
        assert denormalize(0.575, 2.0) == pytest.approx(0.2875)

    def test_roundtrip(self):
        x = 0.3 - 0.7j
        assert denormalize(x, 2.5) * 2.5 == pytest.approx(x, rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            denormalize(1.0, 0.0)
        with pytest.raises(DomainError):
            denormalize(1.0, -2.0)
