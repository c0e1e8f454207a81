"""Homothety criteria: chord-cube constancy, duality, cut lengths, carousels.

These are the executable verification suites: each operation reduces a sweep
(or a chained chord construction) to a small report that a test or the CLI
can threshold.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.spatial.distance import directed_hausdorff

from .chord import (
    FLOTATION,
    ILLUMINATION,
    body_area,
    solve_flotation_chord,
    sweep,
    tangent_intersection,
)
from .curve import (
    SampledPeriodic,
    affine_arclength,
    det2,
    euclidean_curvature,
    norm2,
)
from .errors import AccuracyError, DomainError, ParallelElementsError, SolverError
from .numerics import signed_cbrt


@dataclass(frozen=True)
class ConstancyReport:
    """Summary statistics for an 'is constant' claim over sweep samples."""

    mean: float
    coefficient_of_variation: float
    max_abs_deviation: float

    @classmethod
    def from_values(cls, values):
        values = np.asarray(values, dtype=float)
        mean = float(values.mean())
        std = float(values.std())
        cv = std / abs(mean) if mean != 0.0 else math.inf
        return cls(mean, cv, float(np.max(np.abs(values - mean))))


@dataclass(frozen=True)
class HomothetyFit:
    """Least-squares dilation taking curve A onto curve B at matched parameters.

    When the ratio is within 1e-9 of 1 the dilation center is ill-posed; the
    fit then degrades to translation mode and ``translation`` holds the offset.
    """

    center: np.ndarray
    ratio: float
    rms_residual: float
    matched: bool
    translation: np.ndarray | None = None

    @property
    def is_translation(self):
        return self.translation is not None


@dataclass
class Carousel:
    """A closed chain of equal-area chords with q chairs."""

    p: int
    q: int
    delta: float
    s0: float
    vertices: list
    closure_defect: float
    centroid_track: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)


def _points(samples):
    pts = [getattr(s, "point", s) for s in samples]
    return np.asarray(pts, dtype=float)


def _diameter(points):
    hull_min = points.min(axis=0)
    hull_max = points.max(axis=0)
    return float(norm2(hull_max - hull_min))


def fit_homothety(samples_a, samples_b) -> HomothetyFit:
    """Fit center and ratio minimizing sum |B_i - center - ratio (A_i - center)|^2."""
    a = _points(samples_a)
    b = _points(samples_b)
    if len(a) != len(b):
        raise DomainError("sample lists must be matched by parameter (equal counts)")
    if len(a) < 3:
        raise DomainError("need at least 3 matched samples")
    a_mean = a.mean(axis=0)
    b_mean = b.mean(axis=0)
    a0 = a - a_mean
    b0 = b - b_mean
    denom = float(np.sum(a0 * a0))
    ratio = float(np.sum(a0 * b0)) / denom if denom > 0.0 else 1.0
    shift = b_mean - ratio * a_mean
    residuals = b - ratio * a - shift
    rms = float(np.sqrt(np.mean(np.sum(residuals**2, axis=1))))
    diameter = max(_diameter(a), _diameter(b))
    matched = rms < 1e-6 * diameter
    if abs(ratio - 1.0) < 1e-9:
        return HomothetyFit(
            center=np.full(2, math.nan),
            ratio=ratio,
            rms_residual=rms,
            matched=matched,
            translation=shift,
        )
    center = shift / (1.0 - ratio)
    return HomothetyFit(center=center, ratio=ratio, rms_residual=rms, matched=matched)


def chord_cube_report(curve, delta, kind, n_samples=512, chords=None):
    """Constancy report of the cubed affine chord length, with the implied ratio.

    The implied homothety ratio is mean(||c||^3) / (12 delta) for flotation
    and mean(||c||^3) / (24 delta_hat) for illumination.
    """
    if chords is None:
        chords = sweep(curve, kind, delta, n_samples)
    values = np.array([cm.affine_norm_c**3 for cm in chords])
    report = ConstancyReport.from_values(values)
    divisor = 12.0 * delta if kind == FLOTATION else 24.0 * delta
    return report, report.mean / divisor


def duality_parameters(delta, lam):
    """Cone area and ratio of the dual illumination pair of a flotation pair.

    Solves delta_hat = (3/2) delta lam - delta and 1/lam_hat + 2/lam = 3;
    the product relation 1/(delta_hat lam_hat) = 2/(delta lam) is asserted.
    """
    if lam <= 2.0 / 3.0:
        raise DomainError("duality requires lam > 2/3 (otherwise lam_hat <= 0)")
    delta_hat = 1.5 * delta * lam - delta
    lam_hat = lam / (3.0 * lam - 2.0)
    lhs = 1.0 / (delta_hat * lam_hat)
    rhs = 2.0 / (delta * lam)
    if abs(lhs - rhs) > 1e-9 * abs(rhs):
        raise AccuracyError("duality parameter relations are inconsistent")
    return delta_hat, lam_hat


def duality_pointwise_check(curve, delta, n_samples=256, lam=None):
    """Max distance between flotation-chord poles and the illumination boundary.

    Matched parametrically: the pole of the flotation chord at s is compared
    with the silhouette apex at the same s, at the dual cone area. Returns
    (max_error, skipped) where skipped counts poles at infinity.
    """
    flot = sweep(curve, FLOTATION, delta, n_samples)
    if lam is None:
        _, lam = chord_cube_report(curve, delta, FLOTATION, chords=flot)
    delta_hat, _ = duality_parameters(delta, lam)
    illum = sweep(curve, ILLUMINATION, delta_hat, n_samples)
    max_err = 0.0
    skipped = 0
    for cm_f, cm_i in zip(flot, illum):
        if cm_f.z is None or cm_i.z is None:
            skipped += 1
            continue
        max_err = max(max_err, float(norm2(cm_f.z - cm_i.z)))
    return max_err, skipped


def endpoint_balance_residual(cm, curve=None) -> float:
    """Difference of the two endpoint terms sin^3(angle)/curvature.

    Also evaluated through the translation-invariant normal-component form;
    the two must agree to 1e-10 relative or an AccuracyError is raised.
    """
    curve = curve if curve is not None else cm.curve
    ks = float(euclidean_curvature(curve, cm.s))
    kt = float(euclidean_curvature(curve, cm.t))
    value = math.sin(cm.alpha) ** 3 / ks - math.sin(cm.beta) ** 3 / kt
    # independent form: cubed normal components of the chord at both endpoints
    d1 = curve.derivative(cm.s, 1)
    d2 = curve.derivative(cm.t, 1)
    n_s = np.array([-d1[1], d1[0]]) / norm2(d1)
    n_t = np.array([-d2[1], d2[0]]) / norm2(d2)
    alt = float(np.dot(n_s, -cm.c)) ** 3 / ks - float(np.dot(n_t, cm.c)) ** 3 / kt
    alt = -alt / cm.norm_c**3
    scale = max(abs(value), abs(alt), math.sin(cm.alpha) ** 3 / ks, 1e-300)
    if abs(value - alt) > 1e-10 * scale:
        raise AccuracyError("angle-form and normal-form residuals disagree")
    return value


def affine_cut_rate(cm, curve=None) -> float:
    """Closed-form s-derivative of the affine arc length cut off by the chord."""
    curve = curve if curve is not None else cm.curve
    ks = float(euclidean_curvature(curve, cm.s))
    kt = float(euclidean_curvature(curve, cm.t))
    speed = float(norm2(curve.derivative(cm.s, 1)))
    sa = math.sin(cm.alpha)
    sb = math.sin(cm.beta)
    return speed * sa * (signed_cbrt(kt) / sb - signed_cbrt(ks) / sa)


def affine_cut_length_report(curve, delta, n_samples=256, chords=None, rel_tol=1e-9) -> ConstancyReport:
    """Constancy of the affine arc length of the boundary cut off by the sweep.

    Computed incrementally along the sweep: one full integral for the first
    chord, then small endpoint increments, so only a handful of sub-integrals
    straddle any flat-point cusp of the integrand.
    """
    if chords is None:
        chords = sweep(curve, FLOTATION, delta, n_samples)
    base = affine_arclength(curve, chords[0].s, chords[0].t, rel_tol=rel_tol)
    abs_tol = 1e-12 * abs(base)
    values = [base]
    for prev, cur in zip(chords, chords[1:]):
        values.append(
            values[-1]
            - affine_arclength(curve, prev.s, cur.s, rel_tol=rel_tol, abs_tol=abs_tol)
            + affine_arclength(curve, prev.t, cur.t, rel_tol=rel_tol, abs_tol=abs_tol)
        )
    return ConstancyReport.from_values(values)


@dataclass(frozen=True)
class ConcurrencyFit:
    """Least-squares common point of a bundle of lines."""

    point: np.ndarray
    rms_distance: float
    well_conditioned: bool


def proper_affine_sphere_residual(points, normals) -> ConcurrencyFit:
    """Least-squares concurrency point of the affine-normal lines.

    Each line passes through a sample point along its affine normal; the fit
    minimizes the sum of squared line-to-point distances. A nearly parallel
    normal bundle is flagged as ill-conditioned.
    """
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    if len(points) < 3:
        raise DomainError("need at least 3 affine-normal lines")
    directions = normals / norm2(normals)[:, None]
    line_normals = np.stack([-directions[:, 1], directions[:, 0]], axis=1)
    mats = line_normals[:, :, None] * line_normals[:, None, :]
    a = mats.sum(axis=0)
    rhs = (mats @ points[:, :, None]).sum(axis=0)[:, 0]
    cond = np.linalg.cond(a)
    point = np.linalg.solve(a, rhs)
    dists = np.sum(line_normals * (points - point), axis=1)
    return ConcurrencyFit(point, float(np.sqrt(np.mean(dists**2))), bool(cond < 1e8))


def petty_condition_report(curve, n_samples=512) -> ConstancyReport:
    """Constancy of det(g, g')^3 / det(g', g'') over uniform samples.

    The value depends on the origin; a warning is emitted if the origin does
    not see the curve with positive orientation (origin outside).
    """
    grid = np.arange(n_samples) * (curve.period / n_samples)
    g = curve.derivative(grid, 0)
    d1 = curve.derivative(grid, 1)
    d2 = curve.derivative(grid, 2)
    radial = det2(g, d1)
    if np.any(radial <= 0.0):
        warnings.warn("origin is not interior to the curve; report is origin-sensitive")
    values = radial**3 / det2(d1, d2)
    return ConstancyReport.from_values(values)


def _check_origin_symmetric(curve, tol=1e-9):
    n = max(4 * curve.resolution, 512)
    grid = np.arange(n) * (curve.period / n)
    pts = curve.derivative(grid, 0)
    opposite = curve.derivative(grid + curve.period / 2.0, 0)
    scale = float(np.max(norm2(pts)))
    defect = float(np.max(norm2(pts + opposite)))
    if defect > tol * scale:
        raise DomainError(f"curve is not origin-symmetric (defect {defect:.3e})")


def intersection_body_polar(curve, n_samples=None) -> SampledPeriodic:
    """The curve g'/(2 det(g, g')), the polar of the intersection body.

    Only defined for origin-symmetric curves with the origin inside; returned
    as a sampled curve whose tangent is parallel to the original position
    vector at matched parameters.
    """
    _check_origin_symmetric(curve)
    n = n_samples if n_samples is not None else max(2 * curve.resolution, 256)
    grid = np.arange(n) * (curve.period / n)
    g = curve.derivative(grid, 0)
    d1 = curve.derivative(grid, 1)
    radial = det2(g, d1)
    if np.any(radial <= 0.0):
        raise DomainError("origin must be strictly inside the curve")
    return SampledPeriodic(points=d1 / (2.0 * radial[:, None]))


def radon_check(curve, n_samples=256) -> float:
    """Max angular defect of the tangent/radial involution.

    For each s the parameter t with gamma(t) parallel to gamma'(s) is found in
    (s, s + period/2); the residual is |det(gamma'(t), gamma(s))| normalized.
    Zero characterizes Radon curves (bodies homothetic to their polar
    intersection body).
    """
    _check_origin_symmetric(curve)
    grid = np.arange(n_samples) * (curve.period / n_samples)
    worst = 0.0
    for s in grid:
        d1 = curve.derivative(s, 1)

        def f(u):
            return det2(curve.derivative(u, 0), d1)

        lo, hi = s + 1e-12, s + curve.period / 2.0 - 1e-12
        if f(lo) * f(hi) > 0.0:
            raise SolverError("failed to isolate the tangent-parallel radius")
        t = brentq(f, lo, hi, xtol=1e-14)
        g_s = curve.derivative(s, 0)
        d1_t = curve.derivative(t, 1)
        worst = max(worst, abs(det2(d1_t, g_s)) / (norm2(d1_t) * norm2(g_s)))
    return float(worst)


def build_carousel(curve, p, q, delta, s0=0.0) -> Carousel:
    """Chain q equal-area chords from s0; the closure defect measures periodicity.

    For q = 3 the side ratios of the circumscribed tangent triangle are
    reported (all equal to 1 exactly when the chain is a closing carousel of
    an ellipse-like configuration).
    """
    if not 0 < p < q:
        raise DomainError("require 0 < p < q")
    total = body_area(curve)
    if not 0.0 < delta < total:
        raise DomainError("delta must lie in (0, area)")
    period = curve.period
    ts = [float(s0)]
    step_hint = p * period / q
    for i in range(q):
        cm = solve_flotation_chord(curve, ts[-1], delta, hint=ts[-1] + step_hint, bracket_width=period / 8.0)
        ts.append(cm.t)
        if ts[-1] - ts[0] > (p + 1) * period:
            raise SolverError("carousel chaining overflowed the expected winding")
    defect = ts[q] - ts[0] - p * period
    lambdas = []
    mu = None
    if q == 3:
        vx, vy, vz = (curve.derivative(t, 0) for t in ts[:3])
        try:
            hat_x = tangent_intersection(curve, ts[1], ts[2])
            hat_y = tangent_intersection(curve, ts[2], ts[0] + period)
            hat_z = tangent_intersection(curve, ts[0], ts[1])
            lambdas = [
                float(norm2(hat_y - vx) / norm2(vx - hat_z)),
                float(norm2(hat_z - vy) / norm2(vy - hat_x)),
                float(norm2(hat_x - vz) / norm2(vz - hat_y)),
            ]
        except ParallelElementsError:
            lambdas = []  # tangent triangle degenerates far from closure
        mu = (vx + vy + vz) / 3.0
    carousel = Carousel(
        p=p,
        q=q,
        delta=delta,
        s0=float(s0),
        vertices=ts,
        closure_defect=float(defect),
        lambdas=lambdas,
    )
    if mu is not None:
        carousel.centroid_track.append((float(s0), mu))
    return carousel


def solve_carousel_delta(curve, p, q, s0=0.0) -> float:
    """Cut-off area at which the p/q carousel from s0 closes."""
    if q < 2:
        raise DomainError("carousel needs at least 2 chairs")
    total = body_area(curve)

    def defect(d):
        return build_carousel(curve, p, q, d, s0=s0).closure_defect

    lo, hi = 1e-6 * total, 0.5 * total - 1e-9 * total
    if defect(lo) * defect(hi) > 0.0:
        raise SolverError(f"carousel defect does not change sign for p/q = {p}/{q}")
    delta_star = brentq(defect, lo, hi, xtol=1e-15, rtol=8.9e-16)
    residual = defect(delta_star)
    if abs(residual) > 1e-10 * curve.period:
        raise SolverError(f"carousel closure only reached |defect| = {abs(residual):.3e}")
    return float(delta_star)


@dataclass(frozen=True)
class CarouselDiagnostics:
    lambda_report: ConstancyReport
    centroid_drift_max: float
    lambda_product_max_dev: float
    medial_residual_max: float


def carousel_diagnostics(curve, delta, n_samples=64) -> CarouselDiagnostics:
    """Track the 3-chair carousel invariants over a grid of starting points.

    Reports the spread of the tangent-triangle ratios, their product's
    deviation from 1, the drift of the chord-triangle centroid, and how far
    the chord vertices sit from the tangent-triangle side midpoints.
    """
    period = curve.period
    grid = np.arange(n_samples) * (period / n_samples)
    lambdas = []
    centroids = []
    product_dev = 0.0
    medial = 0.0
    for s0 in grid:
        car = build_carousel(curve, 1, 3, delta, s0=s0)
        if abs(car.closure_defect) > 1e-8 * period:
            raise DomainError(
                f"carousel does not close at delta={delta} (defect {car.closure_defect:.3e})"
            )
        lambdas.extend(car.lambdas)
        product_dev = max(product_dev, abs(car.lambdas[0] * car.lambdas[1] * car.lambdas[2] - 1.0))
        centroids.append(car.centroid_track[0][1])
        ts = car.vertices
        vx, vy, vz = (curve.derivative(t, 0) for t in ts[:3])
        hat_x = tangent_intersection(curve, ts[1], ts[2])
        hat_y = tangent_intersection(curve, ts[2], ts[0] + period)
        hat_z = tangent_intersection(curve, ts[0], ts[1])
        medial = max(
            medial,
            float(norm2(vx - 0.5 * (hat_y + hat_z))),
            float(norm2(vy - 0.5 * (hat_z + hat_x))),
            float(norm2(vz - 0.5 * (hat_x + hat_y))),
        )
    centroids = np.asarray(centroids)
    drift = float(np.max(norm2(centroids - centroids[0])))
    return CarouselDiagnostics(
        lambda_report=ConstancyReport.from_values(lambdas),
        centroid_drift_max=drift,
        lambda_product_max_dev=float(product_dev),
        medial_residual_max=medial,
    )


def hausdorff_distance(samples_a, samples_b) -> float:
    """Symmetric Hausdorff distance between two point samples."""
    a = _points(samples_a)
    b = _points(samples_b)
    if len(a) == 0 or len(b) == 0:
        raise DomainError("sample sets must be non-empty")
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))
