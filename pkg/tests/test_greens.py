import math
import time

import numpy as np
import pytest
from scipy.special import digamma

from hypertrace.geom import HPoint
from hypertrace.greens import (SingularInputError, green, identity_term,
                               identity_term_from_g, legendre_q, point_pair_k,
                               regularized_green_diagonal,
                               selberg_transform_check)
from hypertrace.quadrature import QuadratureConfig, integrate
from hypertrace.testfn import gaussian_family, q_from_g, resolvent_family

EULER_GAMMA = float(np.euler_gamma)


class TestLegendreQ:
    def test_order_zero_closed_form(self):
        # nu = -1/2 + i rho = 0 at rho = -i/2; Q_0(x) = (1/2) ln((x+1)/(x-1))
        kv = legendre_q(-0.5j, 1.0)
        assert abs(kv.value.real - math.log(1.0 / math.tanh(0.5))) < 1e-8
        assert abs(kv.value.imag) < 1e-10

    def test_order_zero_other_arguments(self):
        for tau in (0.5, 2.0):
            kv = legendre_q(-0.5j, tau)
            x = math.cosh(tau)
            oracle = 0.5 * math.log((x + 1.0) / (x - 1.0))
            assert abs(kv.value - oracle) < 1e-9

    def test_large_rho_stationary_phase(self):
        rho, tau = 50.0, 1.0
        kv = legendre_q(rho, tau)
        asym = math.sqrt(math.pi / (2.0 * rho * math.sinh(tau))) \
            * np.exp(-1j * rho * tau - 1j * math.pi / 4.0)
        assert abs(kv.value - asym) / abs(asym) <= 2.0 / rho

    def test_decay_envelope(self):
        # |Q| <= C (1 + |ln tau|) e^{tau (Im rho - 1/2 + eps)}; at rho = 0
        # the envelope with eps = 0.05 and a modest constant holds
        for tau in (5.0, 10.0):
            kv = legendre_q(0.0, tau)
            env = 3.0 * (1.0 + abs(math.log(tau))) * math.exp(-0.45 * tau)
            assert abs(kv.value) <= env

    def test_small_tau_digamma_asymptotics(self):
        # Q ~ -(ln(tau/2) + gamma + psi(1/2 + i rho)) as tau -> 0
        for rho in (0.0, 1.0):
            kv = legendre_q(rho, 1e-4)
            pred = -(math.log(0.5e-4) + EULER_GAMMA + digamma(0.5 + 1j * rho))
            assert abs(kv.value - pred) < 1e-6

    def test_domain_errors(self):
        with pytest.raises(SingularInputError):
            legendre_q(0.6j, 1.0)     # Im rho beyond the strip
        with pytest.raises(SingularInputError):
            legendre_q(0.0, 0.0)      # logarithmic singularity
        with pytest.raises(SingularInputError):
            legendre_q(0.0, -1.0)


class TestGreen:
    def test_small_distance_logarithmic_law(self):
        z = HPoint.uhp(1j)
        ratios = []
        for tau in (1e-2, 1e-3, 1e-4):
            w = HPoint.uhp(1j * math.exp(tau))  # d(i, e^tau i) = tau
            gv = green(z, w, 0.0)
            ratios.append(gv.value.real / (math.log(tau) / (2.0 * math.pi)))
        # ratio tends to 1 from above as tau -> 0
        assert abs(ratios[-1] - 1.0) < abs(ratios[0] - 1.0)
        assert abs(ratios[-1] - 1.0) < 0.35

    def test_symmetry_and_invariance(self):
        z = HPoint.uhp(0.3 + 1.0j)
        w = HPoint.uhp(-0.2 + 2.0j)
        g1 = green(z, w, 0.3).value
        assert abs(g1 - green(w, z, 0.3).value) < 1e-12
        from hypertrace.geom import Isometry, apply_isometry
        iso = Isometry.from_matrix([[1.2, 0.4], [0.3, (1.0 + 0.4 * 0.3) / 1.2]])
        g2 = green(apply_isometry(iso, z), apply_isometry(iso, w), 0.3).value
        assert abs(g1 - g2) < 1e-9

    def test_coincident_points_rejected(self):
        z = HPoint.uhp(1j)
        with pytest.raises(SingularInputError):
            green(z, z, 0.0)


class TestRegularizedDiagonal:
    def test_equal_parameters_vanish(self):
        assert regularized_green_diagonal(0.3, 0.3) == 0.0

    def test_antisymmetry(self):
        v1 = regularized_green_diagonal(0.0, 0.5)
        v2 = regularized_green_diagonal(0.5, 0.0)
        assert abs(v1 + v2) < 1e-12

    def test_against_digamma_closed_form(self):
        # series equals (psi(1/2 + i rho) - psi(1/2 + i rho*)) / (2 pi)
        for rho, rho_star in [(0.0, 0.5), (1.0, 0.25), (0.3, 2.0)]:
            got = regularized_green_diagonal(rho, rho_star)
            want = (digamma(0.5 + 1j * rho) - digamma(0.5 + 1j * rho_star)) \
                / (2.0 * math.pi)
            assert abs(got - want) < 1e-10

    def test_against_green_function_limit(self):
        got = regularized_green_diagonal(0.0, 0.5)
        q0 = legendre_q(0.0, 1e-4).value
        q1 = legendre_q(0.5, 1e-4).value
        limit = -(q0 - q1) / (2.0 * math.pi)
        assert abs(got - limit) < 1e-6

    def test_pole_proximity_rejected(self):
        with pytest.raises(SingularInputError):
            regularized_green_diagonal(0.5j + 1e-10, 2.0)


class TestPointPairKernel:
    def test_value_at_zero_matches_identity_term(self):
        pair = gaussian_family(1.0)
        k0 = point_pair_k(0.0, pair).value
        ident = identity_term(pair)
        assert abs(k0 - ident) < 1e-10

    def test_matches_phi_transform_chain(self):
        # two independently coded pipelines for the same kernel
        pair = gaussian_family(1.0)
        prof = q_from_g(pair)
        for tau in (0.5, 1.0, 2.0):
            kv = point_pair_k(tau, pair).value
            phi = complex(prof.Phi(2.0 * (math.cosh(tau) - 1.0)))
            assert abs(kv - phi) < 1e-6

    def test_decay_rate_of_resolvent_kernel(self):
        # k decays like e^{-(sigma + 1/2 - eps) tau}; sigma ~ 2 here
        pair = resolvent_family(-2.0j, -3.0j)
        cfg = QuadratureConfig(abs_tol=1e-11, rel_tol=1e-9)
        taus = np.array([2.0, 4.0, 6.0])
        vals = np.array([abs(point_pair_k(t, pair, cfg).value) for t in taus])
        rate = -np.polyfit(taus, np.log(vals), 1)[0]
        assert rate >= 2.5 - 0.2

    def test_gaussian_kernel_decays_monotonically(self):
        pair = gaussian_family(1.0)
        vals = [abs(point_pair_k(t, pair).value) for t in (5.0, 10.0, 15.0)]
        assert vals[0] > vals[1] > vals[2]

    def test_negative_tau_rejected(self):
        with pytest.raises(SingularInputError):
            point_pair_k(-1.0, gaussian_family(1.0))


class TestIdentityTerm:
    def test_two_routes_agree(self):
        pair = gaussian_family(1.0)
        assert abs(identity_term(pair) - identity_term_from_g(pair)) < 1e-8

    def test_small_beta_weyl_scaling(self):
        beta = 0.01
        val = identity_term(gaussian_family(beta))
        assert abs(val * 4.0 * math.pi * beta - 1.0) < 0.02

    def test_tanh_replacement_bound(self):
        # replacing tanh(pi rho) by 1 changes the value by at most
        # (1/2 pi) int_0^inf |h| (1 - tanh(pi rho)) rho d rho
        pair = gaussian_family(1.0)
        with_tanh = identity_term(pair)

        def abs_one(r):
            return pair.h(r) * r

        def bound_integrand(r):
            return np.abs(pair.h(r)) * (1.0 - np.tanh(math.pi * r)) * r

        flat, _ = integrate(abs_one, 0.0, 10.0)
        flat /= 2.0 * math.pi
        bound, _ = integrate(bound_integrand, 0.0, 10.0)
        bound /= 2.0 * math.pi
        assert abs(with_tanh - flat) <= bound + 1e-12

    def test_odd_perturbation_rejected_upstream(self):
        from hypertrace import testfn
        bad = testfn.TestFunctionPair(
            h=lambda r: np.exp(-np.asarray(r) ** 2) + 0.01 * np.asarray(r),
            g=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            sigma=2.0, delta=2.0, closed_form_g=True, label="odd-perturbed")
        with pytest.raises(testfn.AdmissibilityError):
            identity_term(bad)


class TestSelbergTransform:
    def test_eigenfunction_identity_residuals(self):
        pair = gaussian_family(1.0)
        z = HPoint.uhp(1j)
        for rho in (0.0, 0.5, 1.0, 2.0):
            res = selberg_transform_check(pair, rho, z)
            assert res < 1e-4

    def test_equivariance_under_scaling(self):
        pair = gaussian_family(1.0)
        r1 = selberg_transform_check(pair, 1.0, HPoint.uhp(1j))
        r2 = selberg_transform_check(pair, 1.0, HPoint.uhp(2j))
        assert abs(r1 - r2) < 1e-12

    def test_runtime_budget(self):
        pair = gaussian_family(1.0)
        start = time.monotonic()
        selberg_transform_check(pair, 0.0, HPoint.uhp(1j))
        selberg_transform_check(pair, 1.0, HPoint.uhp(1j))
        assert time.monotonic() - start < 30.0
