"""Smooth closed convex plane curves and their Euclidean/affine invariants.

All curve kinds share the parameter interval [0, 2*pi) and expose exact (or
spectrally accurate) derivatives up to fourth order. Points and vectors are
plain numpy arrays of shape (2,); vectorized calls with an array of parameter
values return (N, 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from .errors import (
    AccuracyError,
    DegenerateCurveError,
    DomainError,
    ParallelElementsError,
    SingularFrameError,
    SingularParametrizationError,
    UnsupportedOrderError,
)
from .numerics import TrigInterpolant, panel_quadrature, signed_cbrt

PERIOD = 2.0 * math.pi

_MIN_CONVEXITY_SAMPLES = 512


def det2(u, v):
    """Planar cross product u_x v_y - u_y v_x, broadcasting over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def norm2(u):
    return np.sqrt(np.sum(np.asarray(u, dtype=float) ** 2, axis=-1))


@dataclass(frozen=True)
class LinearElement:
    """A point with an attached direction (a tangent line germ)."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=float))
        if not np.all(np.isfinite(self.point)) or not np.all(np.isfinite(self.direction)):
            raise DomainError("linear element components must be finite")
        if norm2(self.direction) == 0.0:
            raise DomainError("linear element direction must be nonzero")


@dataclass(frozen=True)
class AffineFrame:
    """Affine map x -> matrix @ x + translation."""

    matrix: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float).reshape(2, 2))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float).reshape(2))

    @property
    def determinant(self):
        return float(np.linalg.det(self.matrix))

    @property
    def unimodular(self):
        return abs(self.determinant - 1.0) < 1e-12

    def apply(self, points):
        points = np.asarray(points, dtype=float)
        return points @ self.matrix.T + self.translation

    def apply_vector(self, vectors):
        return np.asarray(vectors, dtype=float) @ self.matrix.T


class ClosedConvexCurve:
    """Base for periodic, positively oriented, strongly convex parametrizations."""

    period = PERIOD

    @property
    def resolution(self):
        return 128

    def derivative(self, s, order):
        """Order-th parameter derivative; kinds implement orders 0..4."""
        raise NotImplementedError

    def _validate(self):
        n = max(_MIN_CONVEXITY_SAMPLES, 4 * self.resolution)
        grid = np.arange(n) * (self.period / n)
        d1 = self.derivative(grid, 1)
        d2 = self.derivative(grid, 2)
        speed = norm2(d1)
        if np.any(speed <= 0.0) or not np.all(np.isfinite(speed)):
            raise SingularParametrizationError("curve has a singular point on the sample grid")
        convexity = det2(d1, d2)
        # tolerate roundoff at isolated flat points; reject genuine overshoot
        if convexity.min() <= -1e-12 * convexity.max() or convexity.max() <= 0.0:
            raise DegenerateCurveError(
                "det(gamma', gamma'') must be positive everywhere "
                f"(min {convexity.min():.3e}); curve is not strongly convex "
                "or not positively oriented"
            )


@dataclass
class Ellipse(ClosedConvexCurve):
    a: float
    b: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(2))
    rotation: float = 0.0

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        if self.a <= 0.0 or self.b <= 0.0:
            raise DomainError("ellipse semi-axes must be positive")
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        self._rot = np.array([[c, -s], [s, c]])
        self._validate()

    def derivative(self, s, order):
        s = np.asarray(s, dtype=float)
        phase = s + order * (math.pi / 2.0)
        xy = np.stack([self.a * np.cos(phase), self.b * np.sin(phase)], axis=-1)
        out = xy @ self._rot.T
        if order == 0:
            out = out + self.center
        return out


@dataclass
class FourierRadial(ClosedConvexCurve):
    """Radial graph r(s) = r0 + sum_k (cos_k cos(ks) + sin_k sin(ks)) about the origin."""

    r0: float
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def __post_init__(self):
        self.cos_coeffs = tuple(float(c) for c in self.cos_coeffs)
        self.sin_coeffs = tuple(float(c) for c in self.sin_coeffs)
        if self.r0 <= 0.0:
            raise DomainError("base radius must be positive")
        self._validate()

    @property
    def resolution(self):
        n_harmonics = max(len(self.cos_coeffs), len(self.sin_coeffs), 1)
        return max(128, 16 * n_harmonics)

    def _radial(self, s, order):
        r = np.full_like(s, self.r0 if order == 0 else 0.0)
        for k, a in enumerate(self.cos_coeffs, start=1):
            r = r + a * float(k) ** order * np.cos(k * s + order * math.pi / 2.0)
        for k, b in enumerate(self.sin_coeffs, start=1):
            r = r + b * float(k) ** order * np.sin(k * s + order * math.pi / 2.0)
        return r

    def derivative(self, s, order):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape + (2,))
        # Leibniz rule on r(s) * (cos s, sin s)
        for j in range(order + 1):
            rj = self._radial(s, j)
            phase = s + (order - j) * (math.pi / 2.0)
            u = np.stack([np.cos(phase), np.sin(phase)], axis=-1)
            out += math.comb(order, j) * rj[..., None] * u
        return out


@dataclass
class SampledPeriodic(ClosedConvexCurve):
    """Curve given by N uniform samples; derivatives by trigonometric interpolation."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 2 or self.points.shape[0] < 16:
            raise DomainError("expected at least 16 sample points of shape (N, 2)")
        self._interp = TrigInterpolant(self.points, PERIOD)
        self._validate()

    @property
    def resolution(self):
        return self.points.shape[0]

    def derivative(self, s, order):
        return self._interp(s, order)


@dataclass
class AffineImage(ClosedConvexCurve):
    """Pointwise affine image of a base curve, keeping its parametrization.

    For orientation-reversing maps the parameter is reflected (s -> period - s)
    so the image stays positively oriented.
    """

    base: ClosedConvexCurve
    frame: AffineFrame

    def __post_init__(self):
        if self.frame.determinant == 0.0:
            raise SingularFrameError("affine frame must be invertible")
        self._reversed = self.frame.determinant < 0.0
        self._validate()

    @property
    def resolution(self):
        return self.base.resolution

    def derivative(self, s, order):
        s = np.asarray(s, dtype=float)
        s_base = (self.period - s) if self._reversed else s
        d = self.base.derivative(s_base, order)
        out = self.frame.apply_vector(d)
        if self._reversed and order % 2 == 1:
            out = -out
        if order == 0:
            out = out + self.frame.translation
        return out


# ---------------------------------------------------------------------------
# operations


def evaluate(curve, s, order=0):
    """Derivative of the parametrization at s (mod period), orders 0..3."""
    if order not in (0, 1, 2, 3):
        raise UnsupportedOrderError(f"order must be in 0..3, got {order}")
    if not np.all(np.isfinite(np.asarray(s, dtype=float))):
        raise DomainError("parameter value must be finite")
    return curve.derivative(s, order)


def euclidean_curvature(curve, s):
    """Oriented curvature det(g', g'')/|g'|^3; positive on accepted curves."""
    d1 = curve.derivative(s, 1)
    d2 = curve.derivative(s, 2)
    speed = norm2(d1)
    if np.any(speed == 0.0):
        raise SingularParametrizationError("zero tangent vector")
    return det2(d1, d2) / speed**3


def area(curve, rel_tol=1e-12):
    """Enclosed area (1/2) * integral of det(gamma, gamma')."""

    def integrand(u):
        return det2(curve.derivative(u, 0), curve.derivative(u, 1))

    return 0.5 * float(panel_quadrature(integrand, 0.0, curve.period, rel_tol=rel_tol))


def affine_arclength(curve, s0, s1, rel_tol=1e-12, abs_tol=0.0):
    """Integral of det(g', g'')^(1/3) over [s0, s1].

    Uses uniform Gauss panels, falling back to locally adaptive quadrature
    when they stall: curves with isolated flat points give the integrand
    cube-root cusps that uniform refinement resolves only algebraically.
    Raises DegenerateCurveError if the convexity determinant is negative
    somewhere on the arc.
    """
    if not (s0 <= s1 <= s0 + curve.period + 1e-9):
        raise DomainError("require s0 <= s1 <= s0 + period")
    if s0 == s1:
        return 0.0
    coarse = np.linspace(s0, s1, 17)
    scale = float(det2(curve.derivative(coarse, 1), curve.derivative(coarse, 2)).max())

    def integrand(u):
        d = det2(curve.derivative(np.atleast_1d(u), 1), curve.derivative(np.atleast_1d(u), 2))
        if np.any(d < -1e-12 * max(scale, 0.0)):
            raise DegenerateCurveError("non-convex sub-arc: det(g', g'') <= 0")
        return np.clip(d, 0.0, None) ** (1.0 / 3.0)

    try:
        return float(panel_quadrature(integrand, s0, s1, rel_tol=rel_tol, abs_tol=abs_tol))
    except AccuracyError:
        value, _ = quad_vec(
            integrand, s0, s1, epsabs=abs_tol, epsrel=rel_tol, limit=2000, quadrature="gk21"
        )
        return float(value[0])


def affine_curvature(curve, s):
    """Affine curvature; constant (ab)^(-2/3) on an ellipse with semi-axes a, b.

    Uses the fourth parameter derivative internally (spectral for sampled
    curves), since the chain rule to affine arc length needs it.
    """
    d1 = curve.derivative(s, 1)
    d2 = curve.derivative(s, 2)
    d3 = curve.derivative(s, 3)
    d4 = curve.derivative(s, 4)
    d = det2(d1, d2)
    if np.any(d <= 0.0):
        raise DegenerateCurveError("affine curvature requires det(g', g'') > 0")
    return (4.0 * det2(d2, d3) + det2(d1, d4)) / (3.0 * d ** (5.0 / 3.0)) - (
        5.0 / 9.0
    ) * det2(d1, d3) ** 2 / d ** (8.0 / 3.0)


def affine_normal(curve, s):
    """Second derivative with respect to affine arc length."""
    d1 = curve.derivative(s, 1)
    d2 = curve.derivative(s, 2)
    d3 = curve.derivative(s, 3)
    d = det2(d1, d2)
    if np.any(d <= 0.0):
        raise DegenerateCurveError("affine normal requires det(g', g'') > 0")
    d = np.asarray(d)[..., None]
    dd = np.asarray(det2(d1, d3))[..., None]
    return d2 * d ** (-2.0 / 3.0) - (d1 * dd) * d ** (-5.0 / 3.0) / 3.0


def affine_distance(e1: LinearElement, e2: LinearElement):
    """Signed affine distance 2 T^(1/3) of two linear elements.

    T is the signed area of the triangle cut by the two tangent lines and the
    connecting segment; the cube root keeps T's sign.
    """
    d1, d2 = e1.direction, e2.direction
    denom = det2(d1, d2)
    if abs(denom) <= 1e-14 * norm2(d1) * norm2(d2):
        raise ParallelElementsError("affine distance undefined for parallel directions")
    c = e2.point - e1.point
    t_area = 0.5 * det2(d1, c) * det2(c, d2) / denom
    return 2.0 * signed_cbrt(t_area)


def apply_affine(curve, frame: AffineFrame):
    """Image curve with derivatives transformed by the frame matrix."""
    if frame.determinant == 0.0:
        raise SingularFrameError("affine frame must be invertible")
    return AffineImage(curve, frame)


# ---------------------------------------------------------------------------
# JSON curve specs


def curve_from_json(spec):
    """Build a curve from its JSON description (see README for the schema)."""
    try:
        kind = spec["kind"]
    except (TypeError, KeyError):
        raise DomainError("curve spec must be an object with a 'kind' field")
    if kind == "ellipse":
        return Ellipse(
            a=float(spec["a"]),
            b=float(spec["b"]),
            center=np.asarray(spec.get("center", (0.0, 0.0)), dtype=float),
            rotation=float(spec.get("rotation", 0.0)),
        )
    if kind == "fourier_radial":
        return FourierRadial(
            r0=float(spec["r0"]),
            cos_coeffs=tuple(spec.get("cos", ())),
            sin_coeffs=tuple(spec.get("sin", ())),
        )
    if kind == "samples":
        return SampledPeriodic(points=np.asarray(spec["points"], dtype=float))
    raise DomainError(f"unknown curve kind {kind!r}")


def curve_to_json(curve):
    if isinstance(curve, Ellipse):
        return {
            "kind": "ellipse",
            "a": curve.a,
            "b": curve.b,
            "center": list(curve.center),
            "rotation": curve.rotation,
        }
    if isinstance(curve, FourierRadial):
        return {
            "kind": "fourier_radial",
            "r0": curve.r0,
            "cos": list(curve.cos_coeffs),
            "sin": list(curve.sin_coeffs),
        }
    if isinstance(curve, SampledPeriodic):
        return {"kind": "samples", "points": curve.points.tolist()}
    n = max(_MIN_CONVEXITY_SAMPLES, 4 * curve.resolution)
    grid = np.arange(n) * (curve.period / n)
    return {"kind": "samples", "points": curve.derivative(grid, 0).tolist()}
