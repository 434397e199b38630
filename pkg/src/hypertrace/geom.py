"""Hyperbolic plane geometry: models, distances and isometries.

The upper half-plane is the single internal model; disk and polar
coordinates are converted on input. Orientation-preserving isometries are
real 2x2 unit-determinant matrices identified with their negative.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GeometryError", "HPoint", "Isometry", "IsometryClass",
    "distance", "apply_isometry", "classify", "length_of",
    "compose", "invert", "identity_isometry",
]

# classification band around |tr| = 2 and determinant drift control
PARABOLIC_BAND = 1e-10
DET_DRIFT = 1e-13
RENORM_EVERY = 16


class GeometryError(ValueError):
    pass


class IsometryClass(enum.Enum):
    IDENTITY = "identity"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"


@dataclass(frozen=True)
class HPoint:
    """A point of the hyperbolic plane in one of three coordinate models.

    model is one of "upper_half_plane" (x + iy, y > 0), "disk" (|z| < 1)
    or "polar" ((tau, phi), distance tau >= 0 from the disk center).
    """

    model: str
    x: float
    y: float

    def __post_init__(self):
        if self.model not in ("upper_half_plane", "disk", "polar"):
            raise GeometryError(f"unknown model {self.model!r}")
        if self.model == "upper_half_plane" and not self.y > 0:
            raise GeometryError("upper half-plane point needs Im z > 0")
        if self.model == "disk" and not self.x * self.x + self.y * self.y < 1:
            raise GeometryError("disk point needs |z| < 1")
        if self.model == "polar" and self.x < 0:
            raise GeometryError("polar radius must be nonnegative")

    @staticmethod
    def uhp(z: complex) -> "HPoint":
        return HPoint("upper_half_plane", float(z.real), float(z.imag))

    @staticmethod
    def disk(z: complex) -> "HPoint":
        return HPoint("disk", float(z.real), float(z.imag))

    @staticmethod
    def polar(tau: float, phi: float) -> "HPoint":
        return HPoint("polar", float(tau), float(phi))

    def to_uhp(self) -> complex:
        """Coordinates in the canonical internal model."""
        if self.model == "upper_half_plane":
            return complex(self.x, self.y)
        if self.model == "polar":
            r = math.tanh(self.x / 2.0)
            zd = complex(r * math.cos(self.y), r * math.sin(self.y))
        else:
            zd = complex(self.x, self.y)
        # Cayley map, disk -> upper half-plane, 0 -> i
        w = 1j * (1 + zd) / (1 - zd)
        if w.imag <= 0:  # numerical underflow very close to the boundary
            raise GeometryError("point too close to the boundary circle")
        return w


def distance(z: HPoint, w: HPoint) -> float:
    """Riemannian distance, stabilized for small separations.

    Uses 2 asinh(|z-w| / (2 sqrt(Im z Im w))) in the half-plane model,
    which avoids the cancellation of acosh(1 + tiny).
    """
    zu = z.to_uhp()
    wu = w.to_uhp()
    num = abs(zu - wu)
    den = 2.0 * math.sqrt(zu.imag * wu.imag)
    return 2.0 * math.asinh(num / den)


def _canonical_sign(m: np.ndarray) -> np.ndarray:
    flat = m.ravel()
    for v in flat:
        if abs(v) > 1e-13:
            return m if v > 0 else -m
    return m


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry as a unit-determinant matrix mod sign.

    The representative matrix is sign-canonicalized (first entry of
    (a, b, c, d) exceeding the noise floor is positive) and renormalized to
    unit determinant whenever the drift exceeds DET_DRIFT or every
    RENORM_EVERY compositions.
    """

    a: float
    b: float
    c: float
    d: float
    generation: int = 0

    @staticmethod
    def from_matrix(m, generation: int = 0) -> "Isometry":
        m = np.asarray(m, dtype=float)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det <= 0:
            raise GeometryError(f"determinant {det} is not positive")
        if abs(det - 1.0) > 1e-6:
            raise GeometryError(f"determinant {det} too far from 1")
        if abs(det - 1.0) > DET_DRIFT or generation >= RENORM_EVERY:
            m = m / math.sqrt(det)
            generation = 0
        m = _canonical_sign(m)
        return Isometry(float(m[0, 0]), float(m[0, 1]),
                        float(m[1, 0]), float(m[1, 1]), generation)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def trace(self) -> float:
        return self.a + self.d

    def det(self) -> float:
        return self.a * self.d - self.b * self.c


def identity_isometry() -> Isometry:
    return Isometry(1.0, 0.0, 0.0, 1.0)


def apply_isometry(g: Isometry, z: HPoint) -> HPoint:
    """Fractional linear action z -> (az + b)/(cz + d) on the half-plane."""
    zu = z.to_uhp()
    den = g.c * zu + g.d
    w = (g.a * zu + g.b) / den
    return HPoint.uhp(w)


def compose(g: Isometry, h: Isometry) -> Isometry:
    gen = max(g.generation, h.generation) + 1
    return Isometry.from_matrix(g.matrix() @ h.matrix(), generation=gen)


def invert(g: Isometry) -> Isometry:
    # adjugate of a unit-determinant matrix
    return Isometry.from_matrix(
        np.array([[g.d, -g.b], [-g.c, g.a]]), generation=g.generation)


def classify(g: Isometry) -> IsometryClass:
    t = abs(g.trace())
    if t > 2.0 + PARABOLIC_BAND:
        return IsometryClass.HYPERBOLIC
    if t < 2.0 - PARABOLIC_BAND:
        return IsometryClass.ELLIPTIC
    m = g.matrix()
    if min(abs(m - np.eye(2)).max(), abs(m + np.eye(2)).max()) < 1e-9:
        return IsometryClass.IDENTITY
    warnings.warn("trace within the +-1e-10 band of 2: classified parabolic",
                  stacklevel=2)
    return IsometryClass.PARABOLIC


def length_of(g: Isometry) -> float:
    """Translation length: 2 acosh(|tr|/2) for hyperbolic g, else 0."""
    t = abs(g.trace())
    if t <= 2.0 + PARABOLIC_BAND:
        return 0.0
    return 2.0 * math.acosh(t / 2.0)
