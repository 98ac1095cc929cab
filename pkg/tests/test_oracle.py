"""Oracle layer: the quadrature is checked against the plain tensor rule it
reorganizes, against closed forms, and against the Monte Carlo route."""

import cmath
import math

import numpy as np
import pytest

from recipspec.coefficients import omega0_closed, omega2_closed, omega_n_general
from recipspec.errors import AccuracyError, DomainError
from recipspec.oracle import (DEFAULT_QUADRATURE, JointCovariance,
                              QuadratureSpec, _rss_single,
                              abs_convergence_check, angular_struve_check,
                              omega_n_quadrature, rss_montecarlo,
                              rss_quadrature)
from recipspec.series import asymptotic_floor
from recipspec.specfun import struve_l0


def rss_plain_tensor(r, w, spec: QuadratureSpec):
    """The defining quadrature rule, written as the literal 4-fold loop
    (vectorized only over the radial plane)."""
    r = complex(r)
    absr, phi = abs(r), cmath.phase(r) if r != 0 else 0.0
    x, wgt = np.polynomial.legendre.leggauss(spec.radial_nodes)
    v = 0.5 * spec.v_max * (x + 1.0)
    wv = 0.5 * spec.v_max * wgt
    q = 2 * np.pi * np.arange(spec.angular_nodes) / spec.angular_nodes
    dq = 2 * np.pi / spec.angular_nodes
    gauss = np.exp(-0.25 * (v[:, None] ** 2 + v[None, :] ** 2)) * (wv[:, None] * wv[None, :])
    total = 0.0 + 0.0j
    for q1 in q:
        for q2 in q:
            coupling = np.exp(-0.5 * absr * v[:, None] * v[None, :]
                              * math.cos(q1 - q2 + phi))
            osc = np.exp(1j * w * (v[:, None] * math.cos(q1)
                                   + v[None, :] * math.cos(q2)))
            total += cmath.exp(1j * (q1 - q2)) * np.sum(gauss * coupling * osc)
    return -total * dq * dq / (4 * np.pi ** 2)


class TestQuadrature:
    def test_equals_plain_tensor_rule(self):
        small = QuadratureSpec(angular_nodes=24, radial_nodes=24, v_max=12.0)
        for r, w in [(0.5, 0.0), (0.5, 0.7), (math.exp(-1) * cmath.exp(-2j), 0.7)]:
            fast = _rss_single(complex(r), w, small)
            plain = rss_plain_tensor(r, w, small)
            assert fast == pytest.approx(plain, abs=1e-12)

    def test_matches_order_zero_closed_form(self):
        res = rss_quadrature(0.5, 0.0)
        assert res.value.real == pytest.approx(0.575364144904, abs=1e-6)
        assert abs(res.value.imag) < 1e-10
        assert res.error_estimate <= DEFAULT_QUADRATURE.target_abs_tol

    def test_frozen_reference_point(self):
        # node-convergence study value; doubling all counts moves it < 1e-14
        res = rss_quadrature(0.5, 0.5)
        assert res.value.real == pytest.approx(0.6048799253456, abs=1e-9)

    def test_matches_floor_at_vanishing_r(self):
        res = rss_quadrature(1e-9, 1.0)
        assert res.value.real == pytest.approx(asymptotic_floor(1.0), abs=1e-5)

    def test_hermitian_lag_symmetry(self):
        r = 0.6 * cmath.exp(-0.9j)
        a = rss_quadrature(r, 0.8).value
        b = rss_quadrature(r.conjugate(), 0.8).value
        assert a == pytest.approx(b.conjugate(), abs=1e-9)

    def test_accuracy_error_path(self):
        strict = QuadratureSpec(angular_nodes=16, radial_nodes=16, v_max=8.0,
                                target_abs_tol=1e-14)
        with pytest.raises(AccuracyError) as exc:
            rss_quadrature(0.7, 0.9, strict)
        assert exc.value.partial_value is not None

    def test_domain_error(self):
        with pytest.raises(DomainError):
            rss_quadrature(1.0, 0.5)


class TestOmegaNQuadrature:
    def test_order_zero(self):
        res = omega_n_quadrature(0, 0.5)
        assert res.value.real == pytest.approx(0.575364144904, abs=1e-6)

    def test_odd_orders_vanish(self):
        for n in (1, 3):
            for r in (0.3, 0.7):
                assert abs(omega_n_quadrature(n, r).value) < 1e-6

    def test_complex_order_two(self):
        r = math.exp(-1) * cmath.exp(-2j)
        res = omega_n_quadrature(2, r)
        assert res.value == pytest.approx(omega2_closed(r), abs=1e-6)

    def test_even_orders_match_series_formula(self):
        for n in (0, 2, 4, 6):
            for r in (0.3, 0.7, math.exp(-1) * cmath.exp(-2j)):
                got = omega_n_quadrature(n, r).value
                assert got == pytest.approx(omega_n_general(n, r), abs=1e-5)

    def test_order_cap(self):
        with pytest.raises(DomainError):
            omega_n_quadrature(10, 0.3)


class TestMonteCarlo:
    def test_determinism(self):
        a = rss_montecarlo(0.5, 0.5, 10 ** 5, seed=11)
        b = rss_montecarlo(0.5, 0.5, 10 ** 5, seed=11)
        assert a.estimate == b.estimate and a.stderr == b.stderr

    def test_against_closed_form(self):
        res = rss_montecarlo(0.5, 0.0, 10 ** 6, seed=5)
        truth = omega0_closed(0.5)
        assert abs(res.estimate - truth) < 4 * res.stderr

    def test_independent_r(self):
        res = rss_montecarlo(1e-12, 1.0, 10 ** 6, seed=6)
        assert abs(res.estimate - asymptotic_floor(1.0)) < 4 * res.stderr

    def test_batch_layout(self):
        res = rss_montecarlo(0.3, 0.5, 10 ** 5, seed=1, n_batches=125)
        assert res.n_batches == 125
        assert res.n_samples == 125 * (10 ** 5 // 125)
        with pytest.raises(DomainError):
            rss_montecarlo(0.3, 0.5, 10 ** 5, seed=1, n_batches=50)


class TestJointCovariance:
    def test_structure(self):
        r = 0.4 - 0.2j
        jc = JointCovariance(r, r_ww0=2.0)
        m = jc.matrix
        np.testing.assert_allclose(m, m.T)
        assert m[0, 0] == pytest.approx(1.0)  # r_ww0/2
        assert m[0, 2] == pytest.approx(0.4)  # rho * r_ww0/2
        assert m[0, 3] == pytest.approx(-0.2)  # -mu * r_ww0/2, mu = -Im r
        assert np.linalg.eigvalsh(m).min() >= -1e-12

    def test_sampling_matches_matrix(self):
        r = 0.5 * cmath.exp(-0.7j)
        jc = JointCovariance(r)
        rng = np.random.default_rng(42)
        x = jc.sample(200000, rng)
        emp = (x.T @ x) / len(x)
        np.testing.assert_allclose(emp, jc.matrix, atol=0.01)

    def test_sampling_trick_matches_joint_law(self):
        # the two-variable circular construction used by the MC oracle must
        # realize the same 4x4 covariance
        r = 0.6 * cmath.exp(0.5j)
        rng = np.random.default_rng(7)
        n = 200000
        w2 = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
        z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
        w1 = r * w2 + math.sqrt(1 - abs(r) ** 2) * z
        x = np.column_stack([w2.real, w2.imag, w1.real, w1.imag])
        emp = (x.T @ x) / n
        np.testing.assert_allclose(emp, JointCovariance(r).matrix, atol=0.01)

    def test_magnitude_gate(self):
        with pytest.raises(DomainError):
            JointCovariance(1.2)


class TestStruveAndConvergence:
    def test_angular_struve_zero(self):
        assert angular_struve_check(0.0) == 0.0

    def test_angular_struve_identity(self):
        for x in (0.1, 1.0, 5.0):
            q = angular_struve_check(x)
            s = struve_l0(x)
            assert abs(q - s) / s < 1e-8

    def test_angular_struve_log_spaced_sweep(self):
        for x in np.geomspace(0.01, 10.0, 10):
            q = angular_struve_check(float(x))
            s = struve_l0(float(x))
            assert abs(q - s) / s < 1e-8

    def test_abs_convergence_rhs_at_zero(self):
        lhs, rhs = abs_convergence_check(0.0)
        assert rhs == pytest.approx(4 * math.pi ** 3, rel=1e-15)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_abs_convergence_margins(self):
        for absr in (0.3, 0.9, 0.99):
            lhs, rhs = abs_convergence_check(absr)
            assert lhs < rhs

    def test_rhs_diverges_toward_one(self):
        _, rhs1 = abs_convergence_check(0.9)
        _, rhs2 = abs_convergence_check(0.99)
        assert rhs2 > rhs1
