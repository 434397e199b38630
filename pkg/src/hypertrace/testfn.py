"""Admissible even test functions h, their transforms g, and the Q/Phi chain.

A test-function pair couples an even function h of the spectral parameter
(analytic in a strip of half-width sigma > 1/2, decaying like
(1+|Re rho|)^(-2-delta)) with its Fourier transform
g(t) = (1/2pi) int h(rho) e^(-i rho t) d rho, which decays like e^(-sigma|t|).
The auxiliary functions Q and Phi are the Abel-type transforms of g used by
the hyperbolic kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import (DEFAULT_CONFIG, QuadratureConfig, integrate,
                         integrate_panels, integrate_semi_infinite)

__all__ = [
    "TestFunctionPair", "TransformProfile", "HypothesisReport",
    "gaussian_family", "resolvent_family", "counting_family", "smooth_bump",
    "fourier_transform", "q_from_g", "phi_from_q", "q_from_phi",
    "verify_hypotheses",
]

# 4th-order central difference step rule: h = eps^(1/5) * (1 + x)
_DIFF_STEP = float(np.finfo(float).eps) ** 0.2


class AdmissibilityError(ValueError):
    """Input test function violates the evenness/decay hypotheses."""


@dataclass(frozen=True)
class TestFunctionPair:
    """An even spectral test function h with its Fourier transform g.

    sigma is the analyticity strip half-width (math.inf for entire h with
    super-exponential transform decay); delta the polynomial decay margin
    beyond the critical exponent 2. closed_form_g records whether g is an
    analytic closed form or a cached numerical transform.
    """

    h: Callable
    g: Callable
    sigma: float
    delta: float
    closed_form_g: bool
    label: str = "pair"
    g_support: tuple | None = None
    gprime: Callable | None = None
    h_tail_coefficient: float | None = None  # |h| <= C (1+|rho|)^(-2-delta)
    g_tail_coefficient: float | None = None  # |g| <= C e^(-sigma |t|)
    extra: dict = field(default_factory=dict, repr=False)

    def h_tail_bound(self, P: float) -> float | None:
        """Certified bound for int_{|rho|>P} |h|, if the family provides one."""
        if self.label.startswith("gaussian"):
            beta = self.extra["beta"]
            return math.exp(-beta * P * P) / (beta * P)
        if self.h_tail_coefficient is not None and math.isfinite(self.delta):
            return (2.0 * self.h_tail_coefficient
                    / ((1.0 + self.delta) * (1.0 + P) ** (1.0 + self.delta)))
        return None

    def g_tail_bound(self, T: float) -> float:
        """Certified bound for int_T^inf |g|."""
        if self.g_support is not None:
            return 0.0 if T >= self.g_support[1] else self._g_tail_generic(T)
        if self.label.startswith("gaussian"):
            beta = self.extra["beta"]
            return (2.0 * beta / T) * math.exp(-T * T / (4.0 * beta)) \
                / math.sqrt(4.0 * math.pi * beta)
        return self._g_tail_generic(T)

    def _g_tail_generic(self, T: float) -> float:
        C = self.g_tail_coefficient
        if C is not None and math.isfinite(self.sigma):
            return C * math.exp(-self.sigma * T) / self.sigma
        # fall back to an empirical envelope from samples beyond T
        ts = T + np.linspace(0.0, 5.0, 6)
        vals = np.abs(self.g(ts))
        return float(vals.max() * 6.0)

    def gprime_eval(self, t):
        """g'(t); closed form when available, else high-order differences."""
        if self.gprime is not None:
            return self.gprime(t)
        t = np.asarray(t, dtype=float)
        hstep = _DIFF_STEP * (1.0 + np.abs(t))
        return (self.g(t - 2 * hstep) - 8 * self.g(t - hstep)
                + 8 * self.g(t + hstep) - self.g(t + 2 * hstep)) / (12 * hstep)

    def require_admissible(self):
        """Cheap gate used by kernel constructors; full probe in verify_hypotheses."""
        probes = np.array([0.37, 1.7, 5.3, 23.0])
        even_res = np.abs(self.h(probes) - self.h(-probes)).max()
        if even_res > 1e-10:
            raise AdmissibilityError(f"h is not even: residual {even_res:.2e}")
        if self.sigma <= 0.5:
            raise AdmissibilityError(f"sigma={self.sigma} must exceed 1/2")


def smooth_bump(a: float = -1.0, b: float = 1.0) -> Callable:
    """C-infinity bump exp(-1/(1-u^2)) supported on (a, b), vectorized."""
    if not b > a:
        raise ValueError("need b > a")
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)

    def psi(x):
        x = np.asarray(x, dtype=float)
        u = (x - mid) / half
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
        return out

    return psi


def gaussian_family(beta: float) -> TestFunctionPair:
    """Heat-kernel family h(rho) = exp(-beta rho^2).

    The transform is g(t) = exp(-t^2/(4 beta)) / sqrt(4 pi beta); both sides
    of every trace identity close to machine precision with it.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    norm = 1.0 / math.sqrt(4.0 * math.pi * beta)

    def h(rho):
        rho = np.asarray(rho)
        return np.exp(-beta * rho * rho)

    def g(t):
        t = np.asarray(t, dtype=float)
        return norm * np.exp(-t * t / (4.0 * beta))

    def gprime(t):
        t = np.asarray(t, dtype=float)
        return -t / (2.0 * beta) * norm * np.exp(-t * t / (4.0 * beta))

    return TestFunctionPair(
        h=h, g=g, sigma=math.inf, delta=math.inf, closed_form_g=True,
        label=f"gaussian(beta={beta:g})", gprime=gprime,
        extra={"beta": float(beta)})


def resolvent_family(rho: complex, rho_star: complex,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> TestFunctionPair:
    """Regularized-resolvent family h(x) = 1/(rho^2-x^2) - 1/(rho_star^2-x^2).

    Both parameters must sit outside the closed spectral strip
    (|Im| > 1/2) so the poles stay clear of the real integration contour.
    The transform g is evaluated numerically and cached pointwise.
    """
    rho = complex(rho)
    rho_star = complex(rho_star)
    if abs(rho.imag) <= 0.5 or abs(rho_star.imag) <= 0.5:
        raise ValueError("resolvent parameters need |Im| > 1/2")
    if rho in (rho_star, -rho_star):
        raise ValueError("rho = +-rho_star gives the zero test function")

    def h(x):
        x = np.asarray(x)
        return 1.0 / (rho * rho - x * x) - 1.0 / (rho_star * rho_star - x * x)

    sigma = min(abs(rho.imag), abs(rho_star.imag)) * (1.0 - 1e-12)
    coef = abs(rho_star ** 2 - rho ** 2) * 1.25

    # the slow polynomial decay of h makes the certified truncation radius
    # grow like tol^(-1/3); cap the transform accuracy so the oscillatory
    # panel count stays affordable
    g_cfg = QuadratureConfig(abs_tol=max(cfg.abs_tol, 1e-10),
                             rel_tol=max(cfg.rel_tol, 1e-10),
                             max_panels=cfg.max_panels)

    # contour-shifted envelope |g(t)| <= C e^{-0.9 sigma |t|}; beyond its
    # reach the transform is certified below tolerance and reported as 0
    shift = 0.9 * sigma
    xs = np.linspace(-400.0, 400.0, 32001)
    env_C = float(np.trapezoid(np.abs(h(xs - 1j * shift)), xs)) / (2.0 * math.pi)

    pair_box = {}

    def g(t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        out = np.empty(flat.shape, dtype=complex)
        for i, ti in enumerate(flat):
            key = float(ti)
            if key not in _gcache:
                if env_C * math.exp(-shift * abs(key)) < g_cfg.abs_tol:
                    _gcache[key] = 0.0 + 0.0j
                else:
                    _gcache[key] = fourier_transform(pair_box["pair"], key, g_cfg)[0]
            out[i] = _gcache[key]
        return out.reshape(t.shape)

    _gcache: dict = {}
    pair = TestFunctionPair(
        h=h, g=g, sigma=sigma, delta=2.0, closed_form_g=False,
        label=f"resolvent(rho={rho:g}, rho_star={rho_star:g})",
        h_tail_coefficient=coef,
        g_tail_coefficient=coef,
        extra={"rho": rho, "rho_star": rho_star})
    pair_box["pair"] = pair
    return pair


def counting_family(psi: Callable, L: float, support: tuple,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> TestFunctionPair:
    """Geodesic-counting family g(t) = 2 sinh(t/2)/t [psi(t-L) + psi(-t-L)].

    psi is a smooth bump supported in `support`; the shifted supports must
    stay away from t = 0, which is what the precondition a + L > 0 enforces.
    h is recovered by the inverse transform h(rho) = int g(t) e^(i rho t) dt.
    """
    a, b = support
    if not b > a:
        raise ValueError("empty support")
    if not a + L > 0:
        raise ValueError("support straddles the origin: need a + L > 0")

    def g(t):
        t = np.asarray(t, dtype=float)
        safe = np.where(t == 0.0, 1.0, t)
        core = 2.0 * np.sinh(t / 2.0) / safe
        core = np.where(t == 0.0, 1.0, core)
        return core * (psi(t - L) + psi(-t - L))

    lo, hi = L + a, L + b

    def h(rho):
        rho = np.asarray(rho, dtype=complex)
        flat = rho.ravel()
        out = np.empty(flat.shape, dtype=complex)
        for i, r in enumerate(flat):
            # h(rho) = 2 int_0^inf g(t) cos(rho t) dt, g supported in [lo, hi]
            def integrand(t, r=r):
                return g(t) * np.cos(r * t)

            cycles = (hi - lo) * abs(r) / (2.0 * math.pi)
            if cycles < 8.0:
                val, _ = integrate(integrand, lo, hi, cfg)
            else:
                width = math.pi / (4.0 * abs(r) + 1.0)
                val, _ = integrate_panels(integrand, lo, hi, width, cfg)
            out[i] = 2.0 * val
        return out.reshape(rho.shape)

    return TestFunctionPair(
        h=h, g=g, sigma=math.inf, delta=math.inf, closed_form_g=True,
        label=f"counting(L={L:g})", g_support=(-hi, hi),
        extra={"L": float(L), "psi_support": (float(a), float(b))})


def fourier_transform(pair: TestFunctionPair, t: float,
                      cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Numerical g(t) = (1/pi) int_0^inf h(rho) cos(rho t) d rho.

    Returns (value, error_estimate); the estimate combines the panel errors
    with the certified decay tail. Oscillation is controlled by capping the
    panel width at pi/(4|t|+1).
    """
    t = float(t)

    def integrand(rho):
        return pair.h(rho) * np.cos(rho * t)

    P = 8.0
    tail = pair.h_tail_bound(P)
    if tail is not None:
        while tail > cfg.abs_tol and P < 1e6:
            P *= 1.6
            tail = pair.h_tail_bound(P)
        # cap the width both by the oscillation period and by the overall
        # range so smooth structure is resolved as well
        width = min(math.pi / (4.0 * abs(t) + 1.0), P / 16.0)
        val, err = integrate_panels(integrand, 0.0, P, width, cfg)
        return val / math.pi, (err + tail) / math.pi
    width = math.pi / (4.0 * abs(t) + 1.0)

    # no certified envelope: extend in blocks until a block is negligible
    total = 0.0 + 0.0j
    total_err = 0.0
    left = 0.0
    for _ in range(64):
        val, err = integrate_panels(integrand, left, left + P, width, cfg)
        total += val
        total_err += err
        left += P
        if abs(val) < cfg.abs_tol:
            break
    return total / math.pi, (total_err + abs(val)) / math.pi


@dataclass(frozen=True)
class TransformProfile:
    """The Abel-transform companions Q (of g) and Phi (of the kernel k)."""

    Q: Callable
    Phi: Callable
    pair: TestFunctionPair | None = None


def _q_derivative_from_pair(pair: TestFunctionPair):
    """Q'(eta) by the exact chain rule Q'(eta) = g'(t) / (2 sinh t)."""

    def dQ(eta):
        eta = np.asarray(eta, dtype=float)
        t = np.arccosh(1.0 + eta / 2.0)
        small = t < 1e-6
        ts = np.where(small, 1.0, t)
        out = pair.gprime_eval(ts) / (2.0 * np.sinh(ts))
        if np.any(small):
            # limit g'(t)/(2 sinh t) -> g''(0)/2 via a short finite difference
            h0 = 1e-5
            g2 = (pair.g(np.array([h0])) - 2 * pair.g(np.array([0.0]))
                  + pair.g(np.array([-h0])))[0] / (h0 * h0)
            out = np.where(small, g2 / 2.0, out)
        return out

    return dQ


def _q_derivative_generic(Q):
    """4th-order differences with step eps^(1/5) (1+eta); one-sided near 0."""

    def dQ(eta):
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        hstep = _DIFF_STEP * (1.0 + eta)
        central = eta >= 2.0 * hstep
        e = np.where(central, eta, 2.0 * hstep)  # placeholder for vector eval
        out = np.asarray((Q(e - 2 * hstep) - 8 * Q(e - hstep)
                          + 8 * Q(e + hstep) - Q(e + 2 * hstep)) / (12 * hstep))
        if np.any(~central):
            eo = eta[~central]
            ho = hstep[~central]
            # one-sided 4th-order stencil on [0, inf)
            f = [Q(eo + k * ho) for k in range(5)]
            onesided = (-25 * f[0] + 48 * f[1] - 36 * f[2]
                        + 16 * f[3] - 3 * f[4]) / (12 * ho)
            out[~central] = onesided
        return out

    return dQ


def q_from_g(pair: TestFunctionPair) -> TransformProfile:
    """Build Q from g via Q(2(cosh t - 1)) = g(t), plus the derived Phi."""

    def Q(eta):
        eta = np.asarray(eta, dtype=float)
        return pair.g(np.arccosh(1.0 + eta / 2.0))

    Phi = phi_from_q(Q, dQ=_q_derivative_from_pair(pair))
    return TransformProfile(Q=Q, Phi=Phi, pair=pair)


def phi_from_q(profile_or_q, cfg: QuadratureConfig = DEFAULT_CONFIG, dQ=None):
    """Phi(xi) = -(1/pi) int_xi^inf Q'(eta) / sqrt(eta - xi) d eta.

    The substitution eta = xi + u^2 removes the square-root singularity:
    Phi(xi) = -(2/pi) int_0^inf Q'(xi + u^2) du.
    """
    Q = profile_or_q.Q if isinstance(profile_or_q, TransformProfile) else profile_or_q
    if dQ is None:
        if isinstance(profile_or_q, TransformProfile) and profile_or_q.pair is not None:
            dQ = _q_derivative_from_pair(profile_or_q.pair)
        else:
            dQ = _q_derivative_generic(Q)

    def Phi(xi):
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.empty(xi_arr.shape, dtype=complex)
        for i, x in enumerate(xi_arr):
            val, _ = integrate_semi_infinite(
                lambda u, x=x: dQ(x + u * u), 0.0, cfg, step=4.0)
            out[i] = -(2.0 / math.pi) * val
        out = out if np.iscomplexobj(out) and np.abs(out.imag).max() > 0 else out.real
        return out if np.ndim(xi) else out[0]

    return Phi


def q_from_phi(phi, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Inverse transform Q(eta) = int_eta^inf Phi(xi)/sqrt(xi - eta) d xi.

    Same square-root substitution: Q(eta) = 2 int_0^inf Phi(eta + u^2) du.
    """

    def Q(eta):
        eta_arr = np.atleast_1d(np.asarray(eta, dtype=float))
        out = np.empty(eta_arr.shape, dtype=complex)
        for i, e in enumerate(eta_arr):
            val, _ = integrate_semi_infinite(
                lambda u, e=e: phi(e + u * u), 0.0, cfg, step=4.0)
            out[i] = 2.0 * val
        out = out if np.abs(out.imag).max() > 0 else out.real
        return out if np.ndim(eta) else out[0]

    return Q


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of probing a pair against the admissibility hypotheses."""

    evenness_residual: float
    decay_exponent: float
    delta_margin: float
    largest_verified_N: int
    cauchy_riemann_residual: float
    g_decay_rate: float
    h2_pass: bool
    h3_pass: bool
    analytic_pass: bool
    g_decay_pass: bool

    @property
    def passed(self) -> bool:
        return self.h2_pass and self.h3_pass and self.analytic_pass and self.g_decay_pass


def verify_hypotheses(pair: TestFunctionPair, grid=None) -> HypothesisReport:
    """Probe evenness, strip analyticity, polynomial decay of h and
    exponential decay of g on a finite grid; returns a pure report.

    Only a finite decay exponent is numerically verifiable, so the report
    states the largest verified N rather than claiming all-N decay.
    """
    re = np.linspace(-50.0, 50.0, 201) if grid is None else np.asarray(grid, float)
    sigma_probe = min(pair.sigma, 2.0)
    im_levels = [0.0, sigma_probe / 2.0, -sigma_probe / 2.0,
                 0.99 * sigma_probe, -0.99 * sigma_probe]

    even_res = 0.0
    for im in im_levels:
        z = re + 1j * im
        even_res = max(even_res, float(np.abs(pair.h(z) - pair.h(-z)).max()))

    # decay exponent: least-squares slope of log|h| against log|rho|;
    # slightly conservative for finite samples, never inflating the margin
    exps = []
    for im in im_levels:
        rr = np.linspace(10.0, 50.0, 24)
        vals = np.abs(pair.h(rr + 1j * im))
        mask = vals > 1e-290
        if mask.sum() < 4:
            exps.append(50.0)  # underflow: decay beyond measurable range
            continue
        slope = np.polyfit(np.log(rr[mask]), np.log(vals[mask]), 1)[0]
        exps.append(-slope)
    decay_exp = float(min(exps))
    delta_margin = decay_exp - 2.0

    # Cauchy-Riemann residual at interior probe points
    step = 1e-5
    cr = 0.0
    for im in (0.0, sigma_probe / 2.0, -sigma_probe / 2.0):
        z = np.array([0.63, 3.1, 11.0]) + 1j * im
        fx = (pair.h(z + step) - pair.h(z - step)) / (2 * step)
        fy = (pair.h(z + 1j * step) - pair.h(z - 1j * step)) / (2 * step)
        denom = np.abs(fx) + np.abs(fy) + 1e-30
        cr = max(cr, float((np.abs(fy - 1j * fx) / denom).max()))

    # exponential decay of g
    ts = np.linspace(1.0, 12.0, 12)
    gv = np.abs(np.asarray(pair.g(ts), dtype=complex))
    mask = gv > 1e-290
    if mask.sum() >= 4:
        g_rate = -float(np.polyfit(ts[mask], np.log(gv[mask]), 1)[0])
    else:
        g_rate = 50.0

    h2 = even_res < 1e-12
    h3 = delta_margin > 1e-3
    analytic = cr < 1e-4
    g_ok = g_rate > 0.5 and (not math.isfinite(pair.sigma) or g_rate > 0.85 * pair.sigma)
    return HypothesisReport(
        evenness_residual=even_res,
        decay_exponent=decay_exp,
        delta_margin=delta_margin,
        largest_verified_N=int(max(0, math.floor(decay_exp))),
        cauchy_riemann_residual=cr,
        g_decay_rate=g_rate,
        h2_pass=h2, h3_pass=h3, analytic_pass=analytic, g_decay_pass=g_ok)
