"""Legendre Q, the hyperbolic Green's function, point-pair kernels and the
identity (Weyl) term.

All semi-infinite kernels share the endpoint substitution t = tau + u^2,
which removes the inverse-square-root singularity at the lower limit, and
the stable difference cosh t - cosh tau = 2 sinh((t-tau)/2) sinh((t+tau)/2).
Tails are cut where an analytic envelope drops below the configured
absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import HPoint, distance
from .quadrature import (DEFAULT_CONFIG, QuadratureConfig, integrate,
                         integrate_panels)
from .testfn import TestFunctionPair

__all__ = [
    "KernelValue", "SingularInputError",
    "legendre_q", "green", "regularized_green_diagonal",
    "point_pair_k", "identity_term", "identity_term_from_g",
    "selberg_transform_check",
]

IM_RHO_MARGIN = 1e-6


class SingularInputError(ValueError):
    pass


@dataclass(frozen=True)
class KernelValue:
    value: complex
    error_estimate: float

    def __post_init__(self):
        if not math.isfinite(self.error_estimate):
            raise ValueError("error estimate must be finite")


def _cosh_diff(t, tau):
    """cosh t - cosh tau without cancellation for t near tau."""
    return 2.0 * np.sinh((t - tau) / 2.0) * np.sinh((t + tau) / 2.0)


def _tail_start(rho_im: float, tau: float, abs_tol: float) -> float:
    """Truncation point T where the integrand envelope e^{(Im rho - 1/2) t}
    pushes the remaining tail below abs_tol."""
    rate = 0.5 - rho_im
    T = max(2.0 * tau + 1.0, tau + 4.0)
    while True:
        slack = 1.0 - math.cosh(tau) / math.cosh(T)
        tail = math.exp(-rate * T) / (rate * math.sqrt(max(slack, 1e-3)))
        if tail < abs_tol or T > 2000.0:
            return T
        T += 4.0


def legendre_q(rho: complex, tau: float,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> KernelValue:
    """Q_{-1/2 + i rho}(cosh tau) by its absolutely convergent integral
    representation, valid for Im rho < 1/2.

    The substitution t = tau + u^2 makes the integrand smooth at the lower
    endpoint; panel width is tied to the oscillation frequency 2 Re(rho) u.
    """
    rho = complex(rho)
    if rho.imag >= 0.5 - IM_RHO_MARGIN:
        raise SingularInputError(
            f"integral representation needs Im rho < 1/2 (got {rho.imag})")
    if not tau > 0:
        raise SingularInputError("tau must be positive (logarithmic singularity at 0)")

    T = _tail_start(rho.imag, tau, cfg.abs_tol)
    umax = math.sqrt(T - tau)

    def integrand(u):
        t = tau + u * u
        return 2.0 * u * np.exp(-1j * rho * t) / np.sqrt(_cosh_diff(t, tau))

    # boundary layer of width ~ sqrt(tau) at u = 0: resolve adaptively,
    # then switch to oscillation-capped panels for the remainder
    u_c = min(umax, max(0.5, 30.0 * math.sqrt(tau)))
    val, err = integrate(integrand, 0.0, u_c, cfg)
    if u_c < umax:
        width = min(0.25, math.pi / (4.0 * abs(rho.real) * umax + 1.0))
        v2, e2 = integrate_panels(integrand, u_c, umax, width, cfg)
        val, err = val + v2, err + e2
    rate = 0.5 - rho.imag
    slack = 1.0 - math.cosh(tau) / math.cosh(T)
    tail = math.exp(-rate * T) / (rate * math.sqrt(max(slack, 1e-3)))
    return KernelValue(value=val / math.sqrt(2.0), error_estimate=err + tail)


def green(z: HPoint, w: HPoint, rho: complex,
          cfg: QuadratureConfig = DEFAULT_CONFIG) -> KernelValue:
    """Free Green's function -(1/2 pi) Q_{-1/2+i rho}(cosh d(z, w)).

    Depends on the two points only through their distance, hence symmetric
    and isometry-invariant. Diverges logarithmically at coincident points.
    """
    tau = distance(z, w)
    if tau == 0.0:
        raise SingularInputError("Green's function diverges at z = w")
    q = legendre_q(rho, tau, cfg)
    return KernelValue(value=-q.value / (2.0 * math.pi),
                       error_estimate=q.error_estimate / (2.0 * math.pi))


def regularized_green_diagonal(rho: complex, rho_star: complex,
                               terms: int = 20000) -> complex:
    """Coincidence limit of G_rho - G_rho_star via the pole series
    -(1/2 pi i) sum_l [ 1/(rho - i(l+1/2)) - 1/(rho_star - i(l+1/2)) ].

    Partial sum over `terms` poles plus a midpoint integral correction for
    the O(1/l^2) tail.
    """
    rho = complex(rho)
    rho_star = complex(rho_star)
    for r in (rho, rho_star):
        l_near = round(r.real * 0.0 + (r.imag - 0.5))  # nearest pole index along i axis
        for l in {max(0, l_near - 1), max(0, l_near), max(0, l_near + 1)}:
            if abs(r - 1j * (l + 0.5)) < 1e-8:
                raise SingularInputError(f"parameter {r} within 1e-8 of pole i({l}+1/2)")
    if rho == rho_star:
        return 0.0 + 0.0j

    l = np.arange(terms, dtype=float)
    poles = 1j * (l + 0.5)
    partial = np.sum(1.0 / (rho - poles) - 1.0 / (rho_star - poles))
    # midpoint Euler-Maclaurin tail starting at A = terms - 1/2
    A = terms - 0.5
    pA = 1j * (A + 0.5)
    integral = -1j * np.log((rho - pA) / (rho_star - pA))
    deriv = 1j / (rho - pA) ** 2 - 1j / (rho_star - pA) ** 2
    total = partial + integral + deriv / 24.0
    return complex(total / (-2.0j * math.pi))


def _gprime_envelope_cut(pair: TestFunctionPair, tau: float, abs_tol: float) -> float:
    T = max(2.0 * tau + 1.0, tau + 6.0)
    while T < 400.0:
        probe = np.abs(np.asarray(pair.gprime_eval(np.array([T])), complex))[0]
        if probe * math.exp(-T / 2.0) * 8.0 < abs_tol:
            return T
        T += 4.0
    return T


def point_pair_k(tau: float, pair: TestFunctionPair,
                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> KernelValue:
    """Point-pair invariant k(tau) = -(1/(pi sqrt 2)) int_tau^inf
    g'(t) / sqrt(cosh t - cosh tau) dt; finite down to tau = 0."""
    if tau < 0:
        raise SingularInputError("tau must be nonnegative")
    pair.require_admissible()

    T = _gprime_envelope_cut(pair, tau, cfg.abs_tol)
    umax = math.sqrt(max(T - tau, 1e-12))

    def integrand(u):
        t = tau + u * u
        return 2.0 * u * pair.gprime_eval(t) / np.sqrt(_cosh_diff(t, tau))

    u_c = min(umax, max(0.5, 30.0 * math.sqrt(tau)))
    val, err = integrate(integrand, 0.0, u_c, cfg)
    if u_c < umax:
        v2, e2 = integrate_panels(integrand, u_c, umax, 0.25, cfg)
        val, err = val + v2, err + e2
    probe = abs(complex(np.asarray(pair.gprime_eval(np.array([T])), complex)[0]))
    tail = probe * math.exp(-T / 2.0) * 8.0
    v = -val / (math.pi * math.sqrt(2.0))
    return KernelValue(value=v, error_estimate=(err + tail) / (math.pi * math.sqrt(2.0)))


def _h_rho_tail(pair: TestFunctionPair, P: float) -> float | None:
    """Bound for int_P^inf |h(rho)| rho d rho."""
    if pair.label.startswith("gaussian"):
        beta = pair.extra["beta"]
        return math.exp(-beta * P * P) / (2.0 * beta)
    if pair.h_tail_coefficient is not None and math.isfinite(pair.delta) and pair.delta > 1:
        d = pair.delta
        return pair.h_tail_coefficient * (1.0 + P) ** (1.0 - d) / (d - 1.0)
    return None


def identity_term(pair: TestFunctionPair,
                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Identity contribution per unit area:
    (1/4 pi) int_R h(rho) tanh(pi rho) rho d rho."""
    pair.require_admissible()

    def integrand(rho):
        return pair.h(rho) * np.tanh(math.pi * rho) * rho

    P = 8.0
    tail = _h_rho_tail(pair, P)
    if tail is not None:
        while tail > cfg.abs_tol and P < 1e5:
            P *= 1.5
            tail = _h_rho_tail(pair, P)
        val, err = integrate(integrand, 0.0, P, cfg)
    else:
        val, err = 0.0, 0.0
        left = 0.0
        while left < 1e5:
            v, e = integrate(integrand, left, left + 10.0, cfg)
            val += v
            err += e
            left += 10.0
            if abs(v) < cfg.abs_tol:
                break
        tail = abs(v)
    out = complex(val) / (2.0 * math.pi)
    if abs(out.imag) > 1e-8:
        raise ValueError(f"identity term should be real, got {out}")
    return out.real


def identity_term_from_g(pair: TestFunctionPair,
                         cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Equivalent route -(1/2 pi) int_0^inf g'(t)/sinh(t/2) dt.

    The integrand has a removable point at 0 (g' vanishes there to first
    order); used as an independent cross-check of identity_term.
    """
    pair.require_admissible()
    T = _gprime_envelope_cut(pair, 0.0, cfg.abs_tol)

    def integrand(t):
        t = np.asarray(t, dtype=float)
        return pair.gprime_eval(t) / np.sinh(t / 2.0)

    # the endpoint is removable (g' vanishes to first order) and the
    # Kronrod nodes are interior, so integrating from 0 is exact
    val, err = integrate(integrand, 0.0, T, cfg)
    out = complex(val) * (-1.0 / (2.0 * math.pi))
    if abs(out.imag) > 1e-8:
        raise ValueError(f"identity term should be real, got {out}")
    return out.real


def _angular_factor(rho: float, tau: float,
                    cfg: QuadratureConfig) -> complex:
    """int_0^{2 pi} (cosh tau - sinh tau cos phi)^(-1/2 - i rho) d phi.

    Split substitutions keep the integrand resolved both at the e^{-tau}
    floor near phi = 0 and at the phi = pi endpoint.
    """
    if tau < 1e-8:
        return 2.0 * math.pi
    p = -0.5 - 1j * rho
    et = math.exp(-tau)
    sh = 2.0 * math.sinh(tau)
    vc = math.sqrt(et / sh)

    # piece 1: v in [0, 1/2] with v = vc sinh(u)
    umax = math.asinh(0.5 / vc)

    def f1(u):
        v = vc * np.sinh(u)
        return (et + sh * v * v) ** p / np.sqrt(1.0 - v * v) * vc * np.cosh(u)

    v1, _ = integrate(f1, 0.0, umax, cfg)

    # piece 2: v in [1/2, 1] with v = sin(theta)
    def f2(theta):
        v = np.sin(theta)
        return (et + sh * v * v) ** p

    v2, _ = integrate(f2, math.asin(0.5), math.pi / 2.0, cfg)
    return 4.0 * (v1 + v2)


def selberg_transform_check(pair: TestFunctionPair, rho: float, z: HPoint,
                            cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Relative residual of the eigenfunction identity L f = h(rho) f for
    f(w) = (Im w)^(1/2 + i rho).

    The integral of k(z, w) f(w) over the plane is computed in polar
    coordinates (tau, phi) around z with measure sinh(tau) d tau d phi; the
    construction is equivariant, so z enters only through validation.
    """
    pair.require_admissible()
    z.to_uhp()  # validates the base point
    h_rho = complex(np.asarray(pair.h(np.array([rho], dtype=complex)))[0])
    if abs(h_rho) < 1e-14:
        raise SingularInputError("h(rho) too small to normalize the residual")

    # decay gate: the polar integrand needs k to beat sinh(tau) e^{tau/2}
    for t_probe in (8.0, 12.0):
        kv = point_pair_k(t_probe, pair, cfg).value
        if abs(kv) * math.exp(1.5 * t_probe) > 1e12:
            raise SingularInputError("kernel decays too slowly for the polar integral")

    # outer truncation: extend until the envelope is negligible
    T = 6.0
    while T < 60.0:
        kv = abs(point_pair_k(T, pair, cfg).value)
        if kv * math.exp(1.5 * T) < cfg.abs_tol * 1e2 or kv == 0.0:
            break
        T += 3.0

    inner_cfg = QuadratureConfig(abs_tol=1e-11, rel_tol=1e-9,
                                 max_panels=cfg.max_panels)

    def outer(taus):
        taus = np.atleast_1d(taus)
        out = np.empty(taus.shape, dtype=complex)
        for i, tau in enumerate(taus):
            k_val = point_pair_k(float(tau), pair, inner_cfg).value
            ang = _angular_factor(rho, float(tau), inner_cfg)
            out[i] = k_val * ang * math.sinh(tau)
        return out

    val, _ = integrate(outer, 0.0, T, QuadratureConfig(
        abs_tol=1e-9, rel_tol=1e-8, max_panels=cfg.max_panels))
    return abs(val - h_rho) / abs(h_rho)
