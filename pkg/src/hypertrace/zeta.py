"""Cylinder scattering density, truncated surface scattering sums, and the
zeta function built as an Euler product over the primitive length spectrum.

The scattering density of a cylinder of waist ell is
    n_Z(rho) = (ell/pi) sum_m 1/(exp((m + 1/2 + i rho) ell) - 1),
meromorphic with simple poles on the lattice (2 pi/ell) nu + i(m + 1/2),
each of residue 1/(pi i). The zeta function
    Z(s) = prod_gamma prod_m (1 - exp(-ell_gamma (s+m)))
converges absolutely for Re s > 1 and satisfies (d/ds) log Z = pi n_Gamma.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .group import LengthSpectrum

__all__ = [
    "PoleProximityError", "ConvergenceRegionError",
    "ScatteringPole", "ZetaValue",
    "n_cylinder", "n_cylinder_series", "n_gamma",
    "zeta_euler_product", "log_derivative_check",
    "scattering_poles", "scattering_residue_contour",
    "growth_coefficient",
]

RE_S_MARGIN = 0.05
POLE_GUARD = 1e-8


class PoleProximityError(ValueError):
    def __init__(self, message, nearest_pole: complex):
        super().__init__(message)
        self.nearest_pole = nearest_pole


class ConvergenceRegionError(ValueError):
    pass


@dataclass(frozen=True)
class ScatteringPole:
    rho: complex
    residue: complex


@dataclass(frozen=True)
class ZetaValue:
    s: complex
    value: complex
    truncation: tuple       # (L_max, m_max)
    tail_bound: float       # bound on the neglected contribution to log Z

    def __post_init__(self):
        if self.s.real <= 1.0:
            raise ConvergenceRegionError(
                "direct Euler-product values require Re s > 1")


def _nearest_pole(rho: complex, ell: float) -> complex:
    nu = round(rho.real * ell / (2.0 * math.pi))
    m = max(0, round(rho.imag - 0.5))
    return (2.0 * math.pi / ell) * nu + 1j * (m + 0.5)


def _m_cut(ell: float, rho_im: float, target: float = 1e-14) -> int:
    m = 8
    while math.exp(-(m + 1.5 - rho_im) * ell) / (1.0 - math.exp(-ell)) > target:
        m += 8
        if m > 100000:
            raise ConvergenceRegionError("cylinder m-sum does not reach the target tail")
    return m


def n_cylinder(rho: complex, ell: float, m_max: int | None = None) -> complex:
    """Scattering density of a hyperbolic cylinder, valid off the pole set.

    The m-sum is truncated where its geometric tail drops below 1e-14;
    m_max only raises that cut.
    """
    if not ell > 0:
        raise ValueError("ell must be positive")
    rho = complex(rho)
    pole = _nearest_pole(rho, ell)
    if abs(rho - pole) < POLE_GUARD:
        raise PoleProximityError(
            f"rho within {POLE_GUARD} of scattering pole {pole}", pole)
    cut = max(m_max or 0, _m_cut(ell, min(rho.imag, 0.49)))
    m = np.arange(cut + 1)
    terms = 1.0 / np.expm1((m + 0.5 + 1j * rho) * ell)
    return complex((ell / math.pi) * terms.sum())


def n_cylinder_series(rho: complex, ell: float, n_max: int = 4000) -> complex:
    """Alternative series (1/2 pi) sum_n ell e^(-i rho n ell)/sinh(n ell/2),
    absolutely convergent in the strip Im rho < 1/2; used as a cross-check
    of n_cylinder on the overlap region."""
    rho = complex(rho)
    if rho.imag >= 0.5:
        raise ConvergenceRegionError("series form needs Im rho < 1/2")
    # terms decay like e^{-n ell (1/2 - Im rho)}; cut before overflow
    rate = ell * (0.5 - rho.imag)
    n_eff = min(n_max, int(45.0 / rate) + 2)
    n = np.arange(1, n_eff + 1)
    terms = ell * np.exp(-1j * rho * n * ell) / np.sinh(n * ell / 2.0)
    return complex(terms.sum() / (2.0 * math.pi))


def growth_coefficient(spectrum: LengthSpectrum) -> float:
    """Calibrated constant C with #classes(length <= L) <= C e^L, used for
    beyond-cutoff tail estimates."""
    C = 4.0
    for ell, _ in spectrum.entries:
        C = max(C, 3.0 * spectrum.count_up_to(ell) * math.exp(-ell))
    return C


def _beyond_cutoff_tail(spectrum: LengthSpectrum, decay_rate: float) -> float:
    """Bound sum over classes with ell > L_max of ell e^(-decay_rate ell),
    against the e^L class-growth envelope."""
    if decay_rate <= 1.0:
        raise ConvergenceRegionError("tail does not converge at this rate")
    C = growth_coefficient(spectrum)
    L = spectrum.cutoff
    a = decay_rate - 1.0
    return C * math.exp(-a * L) * (L + 1.0 / a) / a


def n_gamma(rho: complex, spectrum: LengthSpectrum,
            m_max: int | None = None):
    """Truncated sum of cylinder densities over the primitive spectrum.

    Valid in the absolute-convergence region Im rho < -1/2; returns
    (value, tail_bound) where the bound covers classes beyond the cutoff.
    """
    rho = complex(rho)
    if rho.imag >= -0.5:
        raise ConvergenceRegionError(
            "n_gamma is only summed for Im rho < -1/2; "
            "its continuation is not available without eigenvalues")
    total = 0.0 + 0.0j
    for ell, mult in spectrum.entries:
        total += mult * n_cylinder(rho, ell, m_max)
    # |n_Z(rho, ell)| <= (ell/pi) 2 e^{-(1/2 - Im rho) ell} for Im rho < -1/2
    rate = 0.5 - rho.imag
    tail = 2.0 / math.pi * _beyond_cutoff_tail(spectrum, rate)
    return total, tail


def _log1m(x):
    """log(1 - x) accurate for small |x|, complex-safe."""
    if abs(x) < 1e-4:
        return -x * (1.0 + x * (0.5 + x * (1.0 / 3.0 + x * 0.25)))
    return cmath.log(1.0 - x)


def zeta_euler_product(s: complex, spectrum: LengthSpectrum,
                       m_max: int = 64) -> ZetaValue:
    """Euler product over primitive classes, for Re s > 1 (+ margin).

    log Z is accumulated term by term with a log1p-style evaluation; the
    reported tail bound covers both the m-cut and the classes beyond the
    spectrum cutoff.
    """
    s = complex(s)
    if s.real <= 1.0 + RE_S_MARGIN:
        raise ConvergenceRegionError(
            f"Euler product needs Re s > {1 + RE_S_MARGIN}")
    log_z = 0.0 + 0.0j
    m_tail = 0.0
    for ell, mult in spectrum.entries:
        for m in range(m_max + 1):
            log_z += mult * _log1m(cmath.exp(-ell * (s + m)))
        edge = math.exp(-ell * (s.real + m_max + 1))
        m_tail += mult * edge / (1.0 - math.exp(-ell)) * 1.25
    l_tail = 0.0
    if spectrum.entries:
        C = growth_coefficient(spectrum)
        a = s.real - 1.0
        l_tail = 1.25 * C * math.exp(-a * spectrum.cutoff) / a
    return ZetaValue(s=s, value=cmath.exp(log_z),
                     truncation=(spectrum.cutoff, m_max),
                     tail_bound=m_tail + l_tail)


def log_derivative_check(s: complex, spectrum: LengthSpectrum,
                         m_max: int = 64, step: float = 1e-5):
    """Compare (d/ds) log Z (central difference of the Euler product)
    against pi n_Gamma(rho) with s = 1/2 + i rho.

    Returns the pair (numerical derivative, pi n_Gamma).
    """
    s = complex(s)
    h = step * (1.0 + abs(s))
    zp = zeta_euler_product(s + h, spectrum, m_max)
    zm = zeta_euler_product(s - h, spectrum, m_max)
    dlog = (cmath.log(zp.value) - cmath.log(zm.value)) / (2.0 * h)
    rho = -1j * (s - 0.5)
    ngam, _ = n_gamma(rho, spectrum, m_max)
    return dlog, math.pi * ngam


def scattering_poles(ell: float, nu_range, m_range):
    """Pole lattice rho = (2 pi / ell) nu + i(m + 1/2), residue 1/(pi i).

    The exponential in the cylinder density equals 1 exactly at these
    points, which pins the real-part spacing to 2 pi / ell.
    """
    out = []
    for nu in nu_range:
        for m in m_range:
            if m < 0:
                raise ValueError("m must be nonnegative")
            rho = (2.0 * math.pi / ell) * nu + 1j * (m + 0.5)
            out.append(ScatteringPole(rho=rho, residue=1.0 / (math.pi * 1j)))
    return out


def scattering_residue_contour(ell: float, nu: int, m: int,
                               radius: float | None = None,
                               n_points: int = 512) -> complex:
    """Residue of n_Z at the (nu, m) pole by a trapezoid contour integral;
    spectrally accurate since the integrand is analytic on the circle."""
    pole = (2.0 * math.pi / ell) * nu + 1j * (m + 0.5)
    if radius is None:
        radius = 0.1 * min(2.0 * math.pi / ell, 1.0)
    theta = np.arange(n_points) * (2.0 * math.pi / n_points)
    zs = pole + radius * np.exp(1j * theta)
    vals = np.array([n_cylinder(z, ell) for z in zs])
    dz = 1j * radius * np.exp(1j * theta)
    integral = (vals * dz).sum() * (2.0 * math.pi / n_points)
    return complex(integral / (2.0j * math.pi))
