"""Spectral vs geometric sides of the trace formulas: circle, sphere,
hyperbolic cylinder, and the geometric side for compact hyperbolic
surfaces, plus the heat-trace route to Weyl's law and smoothed geodesic
counting.

For a compact surface no eigenvalue list is available, so the surface
checks are internal-consistency statements (two routes to the identity
term, regrouping invariance, the heat-trace slope, geodesic counting)
rather than spectral-vs-geometric comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .greens import identity_term
from .group import GroupSpec, LengthSpectrum
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate, integrate_panels
from .testfn import TestFunctionPair
from .zeta import PoleProximityError

__all__ = [
    "TraceReport", "SurfaceModel", "WeylRow", "WeylReport", "CountingResult",
    "circle_check", "cot_identity_check", "sphere_check", "cylinder_check",
    "surface_geometric_side", "heat_weyl_report", "geodesic_counting_check",
    "surface_model", "IncompleteSpectrumError",
]


class IncompleteSpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class TraceReport:
    """Paired evaluation of the two sides of a trace identity."""

    formula: str
    parameters: dict = field(compare=False)
    spectral_side: complex
    geometric_side: complex
    truncation_bounds: tuple   # (spectral tail, geometric tail)

    def __post_init__(self):
        for b in self.truncation_bounds:
            if not (b >= 0 and math.isfinite(b)):
                raise ValueError("truncation bounds must be finite and nonnegative")

    @property
    def abs_diff(self) -> float:
        return abs(self.spectral_side - self.geometric_side)

    @property
    def rel_diff(self) -> float:
        scale = max(abs(self.spectral_side), abs(self.geometric_side), 1e-300)
        return self.abs_diff / scale

    @property
    def tail_bound(self) -> float:
        return sum(self.truncation_bounds)

    def passes(self, tol: float) -> bool:
        return self.abs_diff <= tol

    def as_dict(self) -> dict:
        """Structured document with the same fields as the CSV columns."""
        return {
            "formula": self.formula,
            "parameters": dict(self.parameters),
            "spectral": self.spectral_side,
            "geometric": self.geometric_side,
            "abs_diff": self.abs_diff,
            "rel_diff": self.rel_diff,
            "tail_bound": self.tail_bound,
        }


@dataclass(frozen=True)
class SurfaceModel:
    """A compact hyperbolic surface as seen by the trace formulas.

    No eigenvalue list is carried by default (spectrum_source == "none");
    small_eigenvalue_list holds the finitely many rho_j with Im rho_j < 0,
    which for the default (only the constant eigenfunction, lambda_0 = 0)
    is the single entry rho_0 = -i/2.
    """

    area: float
    length_spectrum: LengthSpectrum
    spectrum_source: str = "none"
    small_eigenvalue_list: tuple = (-0.5j,)

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError("area must be positive")


def surface_model(spec: GroupSpec, spectrum: LengthSpectrum) -> SurfaceModel:
    """Build the model from a group file; checks area = 4 pi (genus - 1)."""
    if spec.genus is None:
        raise ValueError("group file does not state the genus")
    if spec.genus < 2:
        raise ValueError("compact hyperbolic surfaces need genus >= 2")
    return SurfaceModel(area=4.0 * math.pi * (spec.genus - 1),
                        length_spectrum=spectrum)


# ---------------------------------------------------------------------------
# circle


def circle_check(pair: TestFunctionPair,
                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> TraceReport:
    """Poisson summation: sum_m h(m) against sum_n 2 pi g(2 pi n)."""
    M = 8
    while True:
        tail = pair.h_tail_bound(M)
        edge = float(np.abs(pair.h(np.array([M + 1.0])))[0])
        spectral_tail = (tail if tail is not None else 10.0 * edge) + edge
        if spectral_tail < 1e-13 or M > 100000:
            break
        M *= 2
    m = np.arange(-M, M + 1)
    spectral = complex(np.sum(pair.h(m)))

    N = 4
    while True:
        g_tail = pair.g_tail_bound(2.0 * math.pi * N) / (2.0 * math.pi)
        edge = abs(complex(np.asarray(pair.g(np.array([2.0 * math.pi * (N + 1)])),
                                      dtype=complex)[0]))
        geometric_tail = 2.0 * math.pi * (g_tail + edge)
        if geometric_tail < 1e-13 or N > 100000:
            break
        N *= 2
    n = np.arange(-N, N + 1)
    geometric = 2.0 * math.pi * complex(np.sum(np.asarray(
        pair.g(2.0 * math.pi * n), dtype=complex)))

    # include summation roundoff so the bounds dominate the reached accuracy
    spectral_tail += abs(spectral) * 1e-15
    geometric_tail += abs(geometric) * 1e-15
    return TraceReport(
        formula="poisson_circle",
        parameters={"family": pair.label, "m_cut": M, "n_cut": N},
        spectral_side=spectral, geometric_side=geometric,
        truncation_bounds=(spectral_tail, geometric_tail))


def cot_identity_check(rho: complex, m_terms: int = 200000):
    """Symmetric partial sums of sum_m (rho^2 - m^2)^(-1) with a midpoint
    integral tail correction, against (pi/rho) cot(pi rho).

    Returns the pair (series value, closed form).
    """
    rho = complex(rho)
    nearest = round(rho.real)
    if abs(rho - nearest) < 1e-8:
        raise PoleProximityError(f"rho within 1e-8 of the pole at {nearest}",
                                 complex(nearest))
    if abs(rho) < 1e-8:
        raise PoleProximityError("rho within 1e-8 of the pole at 0", 0j)
    m = np.arange(1, m_terms + 1, dtype=float)
    series = 1.0 / rho ** 2 + 2.0 * np.sum(1.0 / (rho ** 2 - m * m))
    a = m_terms + 0.5
    integral = -(1.0 / (2.0 * rho)) * np.log((a + rho) / (a - rho))
    fprime = 2.0 * a / (rho ** 2 - a * a) ** 2
    series += 2.0 * (integral + fprime / 24.0)
    closed = (math.pi / rho) * (np.cos(math.pi * rho) / np.sin(math.pi * rho))
    return complex(series), complex(closed)


# ---------------------------------------------------------------------------
# sphere


def _alternating_tail(k: int, N: int, terms: int = 400000) -> float:
    n = np.arange(N + 1, N + terms + 1, dtype=float)
    return float(np.sum((-1.0) ** n / n ** k))


def _h_deriv_at_zero(pair: TestFunctionPair, order: int, step: float = 5e-3) -> float:
    x = np.arange(-3, 4) * step
    v = np.real(np.asarray(pair.h(x), dtype=complex))
    if order == 2:
        w = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / (180.0 * step ** 2)
    else:
        raise ValueError("only the second derivative is needed")
    return float((w * v).sum())


def sphere_check(pair: TestFunctionPair, l_max: int = 40,
                 n_cut: int = 64,
                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> TraceReport:
    """Sphere trace formula: sum_l (2l+1) h(l + 1/2) against
    2 sum_n (-1)^n int_0^inf rho h(rho) cos(2 pi n rho) d rho.

    The n-sum converges like n^(-2); the closed-form alternating tails of
    the integration-by-parts expansion push the truncation error to the
    n^(-6) scale. Convergence is certified by halving n_cut.
    """
    ls = np.arange(l_max + 1)
    hv = np.asarray(pair.h(ls + 0.5), dtype=complex)
    spectral = complex(np.sum((2 * ls + 1) * hv))
    spectral_tail = float((2 * l_max + 3) * abs(complex(
        np.asarray(pair.h(np.array([l_max + 1.5])), dtype=complex)[0]))) * 4.0

    # radial cut where rho |h| is negligible
    R = 8.0
    while True:
        probe = abs(complex(np.asarray(pair.h(np.array([R])), dtype=complex)[0])) * R
        if probe < 1e-16 or R > 1e4:
            break
        R *= 1.5

    def I_n(nval: int) -> float:
        a = 2.0 * math.pi * nval

        def f(rho):
            return np.real(pair.h(rho)) * rho * np.cos(a * rho)

        width = min(0.3, math.pi / a) if nval else 0.5
        v, _ = integrate_panels(f, 0.0, R, width, cfg)
        return float(v)

    I_vals = [I_n(nv) for nv in range(n_cut + 1)]
    up0 = float(np.real(np.asarray(pair.h(np.array([0.0])), dtype=complex)[0]))
    up3 = 3.0 * _h_deriv_at_zero(pair, 2)

    def side_at(N: int) -> float:
        s = 2.0 * I_vals[0]
        for nv in range(1, N + 1):
            s += 4.0 * (-1) ** nv * I_vals[nv]
        s += 4.0 * (-up0 / (4.0 * math.pi ** 2)) * _alternating_tail(2, N)
        s += 4.0 * (up3 / (16.0 * math.pi ** 4)) * _alternating_tail(4, N)
        return s

    geometric = side_at(n_cut)
    geometric_tail = abs(geometric - side_at(n_cut // 2)) + 1e-12
    return TraceReport(
        formula="sphere",
        parameters={"family": pair.label, "l_max": l_max, "n_cut": n_cut},
        spectral_side=spectral, geometric_side=geometric,
        truncation_bounds=(spectral_tail, geometric_tail))


# ---------------------------------------------------------------------------
# hyperbolic cylinder


def _n_cyl_real_axis(rhos: np.ndarray, ell: float, m_cut: int) -> np.ndarray:
    m = np.arange(m_cut + 1)
    args = (m[None, :] + 0.5 + 1j * rhos[:, None]) * ell
    return (ell / math.pi) * (1.0 / np.expm1(args)).sum(axis=1)


def _geodesic_sum_tail(pair, ell, n_max, half: bool) -> float:
    scale = 0.5 if half else 1.0
    tail = 0.0
    for nv in range(n_max + 1, n_max + 33):
        if nv * ell / 2.0 > 700.0:
            break  # 1/sinh underflows; these terms are exact zeros
        gval = abs(complex(np.asarray(pair.g(np.array([nv * ell])), dtype=complex)[0]))
        tail += scale * ell * gval / math.sinh(nv * ell / 2.0)
    edge = (n_max + 33) * ell
    tail += scale * ell * 4.0 * pair.g_tail_bound(edge) / (1.0 - math.exp(-ell / 2.0))
    return tail


def cylinder_check(ell: float, pair: TestFunctionPair, n_max: int = 64,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> TraceReport:
    """Cylinder trace formula: sum_n ell g(n ell)/sinh(n ell / 2) against
    the spectral integral int h(rho) n_Z(rho) d rho."""
    if not ell > 0:
        raise ValueError("ell must be positive")
    pair.require_admissible()
    n = np.arange(1, n_max + 1)
    n = n[n * ell / 2.0 <= 700.0]  # beyond this 1/sinh underflows to zero
    gv = np.asarray(pair.g(n * ell), dtype=complex)
    geometric = complex(np.sum(ell * gv / np.sinh(n * ell / 2.0)))
    geo_tail = _geodesic_sum_tail(pair, ell, n_max, half=False)
    if geo_tail > 1e-14:
        raise ValueError(
            f"geometric tail {geo_tail:.2e} exceeds 1e-14; raise n_max")

    m_cut = 8
    while math.exp(-(m_cut + 1.5) * ell) / (1.0 - math.exp(-ell)) > 1e-15:
        m_cut += 8
    sup_nz = (ell / math.pi) * float(
        np.sum(1.0 / np.expm1((np.arange(m_cut + 1) + 0.5) * ell)))

    target = max(cfg.abs_tol, 1e-10)
    P = 8.0
    while True:
        ht = pair.h_tail_bound(P)
        if ht is None:
            ht = float(np.abs(pair.h(np.array([P]))).max()) * P
        if ht * sup_nz < target or P > 1e4:
            break
        P *= 1.5

    def integrand(rho):
        return pair.h(rho) * _n_cyl_real_axis(np.asarray(rho, dtype=float), ell, m_cut)

    # the density oscillates with period 2 pi / ell; fixed panels keep the
    # cost linear in P for slowly decaying test functions
    width = min(0.5, (2.0 * math.pi / ell) / 6.0)
    val, err = integrate_panels(integrand, -P, P, width, cfg)
    spectral = complex(val)
    return TraceReport(
        formula="cylinder",
        parameters={"family": pair.label, "ell": ell, "n_max": n_max},
        spectral_side=spectral, geometric_side=geometric,
        truncation_bounds=(err + ht * sup_nz, geo_tail))


# ---------------------------------------------------------------------------
# compact surface


def surface_geometric_side(model: SurfaceModel, pair: TestFunctionPair,
                           n_max: int = 64,
                           cfg: QuadratureConfig = DEFAULT_CONFIG,
                           tail_tolerance: float = 1e-4):
    """Geometric side Area/(4 pi) int h tanh(pi rho) rho d rho
    + sum over primitive classes and repetitions of
    ell g(n ell) / (2 sinh(n ell / 2)).

    Returns (value, certified tail bound). The beyond-cutoff tail is
    estimated against the exponential class-growth envelope; if it exceeds
    tail_tolerance the spectrum cutoff is insufficient.
    """
    pair.require_admissible()
    ident = model.area * identity_term(pair, cfg)
    spectrum = model.length_spectrum
    total = 0.0 + 0.0j
    inner_tail = 0.0
    for ell, mult in spectrum.entries:
        n = np.arange(1, n_max + 1)
        n = n[n * ell / 2.0 <= 700.0]
        gv = np.asarray(pair.g(n * ell), dtype=complex)
        total += mult * complex(np.sum(ell * gv / (2.0 * np.sinh(n * ell / 2.0))))
        inner_tail += mult * _geodesic_sum_tail(pair, ell, n_max, half=True)
    if inner_tail > 1e-14:
        raise ValueError(f"repetition tail {inner_tail:.2e} exceeds 1e-14; raise n_max")

    # classes beyond the cutoff: density <= C e^t, weight t |g(t)| e^{-t/2}
    from .zeta import growth_coefficient
    L = spectrum.cutoff
    C = growth_coefficient(spectrum) if spectrum.entries else 4.0
    ts = np.linspace(L, L + 60.0, 2000)
    gv = np.abs(np.asarray(pair.g(ts), dtype=complex))
    env = C * np.exp(ts) * ts * gv * np.exp(-ts / 2.0) * 1.1
    cutoff_tail = float(np.trapezoid(env, ts))
    if cutoff_tail > tail_tolerance:
        raise IncompleteSpectrumError(
            f"beyond-cutoff tail {cutoff_tail:.2e} exceeds {tail_tolerance:.1e}; "
            "enumerate a longer length spectrum")
    return ident + total, inner_tail + cutoff_tail


@dataclass(frozen=True)
class WeylRow:
    beta: float
    heat_trace: float
    leading_term: float      # Area / (4 pi beta)
    difference: float


@dataclass(frozen=True)
class WeylReport:
    rows: tuple
    fitted_slope: float      # of heat trace against 1/beta; Area/(4 pi) exact


def heat_weyl_report(model: SurfaceModel, beta_list,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> WeylReport:
    """Heat traces from the geometric side and the eigenvalue-count slope.

    The heat trace at inverse temperature beta is the geometric side for
    the family h(rho) = e^(-beta rho^2) times the lambda-shift e^(-beta/4);
    its slope against 1/beta estimates Area/(4 pi).
    """
    from .testfn import gaussian_family
    rows = []
    for beta in beta_list:
        if not 0.0 < beta <= 1.0:
            raise ValueError("betas must lie in (0, 1]")
        pair = gaussian_family(beta)
        side, _ = surface_geometric_side(model, pair, cfg=cfg)
        heat = math.exp(-beta / 4.0) * side.real
        lead = model.area / (4.0 * math.pi * beta)
        rows.append(WeylRow(beta=beta, heat_trace=heat, leading_term=lead,
                            difference=heat - lead))
    x = np.array([1.0 / r.beta for r in rows])
    y = np.array([r.heat_trace for r in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    return WeylReport(rows=tuple(rows), fitted_slope=slope)


@dataclass(frozen=True)
class CountingResult:
    geodesic_sum: float      # sum over primitive classes of psi(ell - L)
    integral: float          # int psi(t - L) dPi~(t), leading term e^t/t
    pre_asymptotic: bool

    @property
    def ratio(self) -> float:
        return self.geodesic_sum / self.integral


def geodesic_counting_check(model: SurfaceModel, psi, L: float,
                            psi_support: tuple,
                            cfg: QuadratureConfig = DEFAULT_CONFIG) -> CountingResult:
    """Smoothed geodesic count sum_gamma psi(ell_gamma - L) against the
    density integral int psi(t - L) e^t / t dt (plus small-eigenvalue
    corrections when the model carries them)."""
    a, b = psi_support
    spectrum = model.length_spectrum
    if spectrum.cutoff < L + b:
        raise IncompleteSpectrumError(
            f"length spectrum complete to {spectrum.cutoff}, "
            f"but the window reaches {L + b}")
    lhs = sum(mult * float(psi(np.array([ell - L]))[0])
              for ell, mult in spectrum.entries)

    def integrand(t):
        t = np.asarray(t, dtype=float)
        dens = np.zeros(t.shape, dtype=complex)
        for rho_j in model.small_eigenvalue_list:
            dens += np.exp((0.5 + 1j * rho_j) * t) / t
        return psi(t - L) * np.real(dens)

    lo = max(L + a, 1e-6)
    rhs, _ = integrate(integrand, lo, L + b, cfg)
    return CountingResult(geodesic_sum=lhs, integral=float(rhs),
                          pre_asymptotic=(lhs == 0.0))
