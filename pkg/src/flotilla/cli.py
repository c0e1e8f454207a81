"""Command-line front end: config ingestion, sweeps, verification runner, exporters.

Exit codes: 0 all requested checks pass, 1 a check failed, 2 usage/config
error, 3 numerical failure (solver or quadrature did not converge).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import chord, floatgeom, homothety, illumgeom
from .curve import (
    SampledPeriodic,
    affine_normal,
    curve_from_json,
    det2,
    norm2,
)
from .errors import DomainError, FlotillaError
from .svg import export_svg

CSV_COLUMNS = [
    "family",
    "s",
    "point_x",
    "point_y",
    "tangent_x",
    "tangent_y",
    "kappa",
    "kappa_prime",
    "chord_s",
    "chord_t",
    "alpha",
    "beta",
    "norm_c",
    "affine_norm_c",
]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    curve_spec: dict
    deltas: list
    n_samples: int = 512
    checks: list = field(default_factory=list)
    output_dir: str = "."
    tolerances_override: dict = field(default_factory=dict)
    delta_hat: float | None = None
    chord_stride: int = 16


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    try:
        cfg = RunConfig(
            curve_spec=raw["curveSpec"],
            deltas=list(raw.get("deltas", [])),
            n_samples=int(raw.get("nSamples", 512)),
            checks=list(raw.get("checks", [])),
            output_dir=raw.get("outputDir", "."),
            tolerances_override=dict(raw.get("tolerancesOverride", {})),
            delta_hat=raw.get("deltaHat"),
            chord_stride=int(raw.get("chordStride", 16)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}")
    if cfg.n_samples < 64:
        raise ConfigError("nSamples must be at least 64")
    return cfg


def curve_label(spec):
    kind = spec.get("kind", "?")
    if kind == "ellipse":
        return f"ellipse(a={spec['a']}, b={spec['b']})"
    if kind == "fourier_radial":
        return f"fourier_radial(r0={spec['r0']}, cos={spec.get('cos', [])}, sin={spec.get('sin', [])})"
    if kind == "samples":
        return f"samples(n={len(spec.get('points', []))})"
    return kind


def resolve_deltas(raw_deltas, total_area):
    out = []
    for d in raw_deltas:
        if isinstance(d, dict):
            try:
                value = float(d["fraction"]) * total_area
            except (KeyError, TypeError, ValueError):
                raise ConfigError(f"bad delta entry {d!r}")
        else:
            value = float(d)
        if not 0.0 < value < total_area:
            raise ConfigError(f"delta {value} outside (0, area={total_area})")
        out.append(value)
    if not out:
        raise ConfigError("no deltas given")
    return out


def _constancy_threshold(curve):
    # spectral kinds carry interpolation noise; analytic kinds do not
    sampled = isinstance(curve, SampledPeriodic)
    return 1e-4 if sampled else 1e-6


# ---------------------------------------------------------------------------
# per-delta computation


@dataclass
class DeltaBundle:
    delta: float
    chords: list
    flotation: list
    buoyancy: list
    chord_cube_stats: homothety.ConstancyReport
    implied_lambda: float
    homothetic: bool
    delta_hat: float | None = None
    illum_chords: list | None = None
    illumination: list | None = None
    illum_centroid: list | None = None


def compute_bundle(curve, delta, n_samples, delta_hat_override=None):
    chords_f = chord.sweep(curve, chord.FLOTATION, delta, n_samples)
    flotation = [floatgeom.flotation_point(cm) for cm in chords_f]
    buoyancy = [floatgeom.buoyancy_point(cm, delta) for cm in chords_f]
    for sample, cm in zip(flotation, chords_f):
        sample.kappa_prime = floatgeom.kappa_prime_flotation(cm)
    for sample, cm in zip(buoyancy, chords_f):
        sample.kappa_prime = floatgeom.kappa_prime_buoyancy(cm, delta)
    report, lam = homothety.chord_cube_report(curve, delta, chord.FLOTATION, chords=chords_f)
    homothetic = report.coefficient_of_variation < _constancy_threshold(curve)
    bundle = DeltaBundle(
        delta=delta,
        chords=chords_f,
        flotation=flotation,
        buoyancy=buoyancy,
        chord_cube_stats=report,
        implied_lambda=lam,
        homothetic=homothetic,
    )
    delta_hat = delta_hat_override
    if delta_hat is None and homothetic and lam > 2.0 / 3.0:
        delta_hat, _ = homothety.duality_parameters(delta, lam)
    if delta_hat is not None:
        bundle.delta_hat = delta_hat
        bundle.illum_chords = chord.sweep(curve, chord.ILLUMINATION, delta_hat, n_samples)
        bundle.illumination = [illumgeom.illumination_point(cm) for cm in bundle.illum_chords]
        bundle.illum_centroid = [
            illumgeom.illumination_centroid_point(cm, delta_hat) for cm in bundle.illum_chords
        ]
    return bundle


# ---------------------------------------------------------------------------
# verification checks


def _tangency_residual(samples):
    worst = 0.0
    for smp in samples:
        cm = smp.chord
        norm_t = norm2(smp.tangent)
        if norm_t == 0.0:
            continue  # vertex singularity: tangency is vacuous
        worst = max(worst, abs(det2(smp.tangent, cm.c)) / (norm_t * cm.norm_c))
    return worst


def _check_chord_cube(curve, bundle, tol):
    tol = tol if tol is not None else _constancy_threshold(curve)
    cv = bundle.chord_cube_stats.coefficient_of_variation
    return "cv_affine_chord_cubed", cv, tol, cv < tol


def _check_endpoint_balance(curve, bundle, tol):
    tol = tol if tol is not None else 1e-8
    worst = max(abs(homothety.endpoint_balance_residual(cm)) for cm in bundle.chords)
    return "max_abs_endpoint_balance_residual", worst, tol, worst < tol


def _check_omega(curve, bundle, tol):
    tol = tol if tol is not None else 1e-6
    res = floatgeom.omega_identity_residual(
        curve, bundle.delta, len(bundle.chords), chords=bundle.chords
    )
    return "omega_identity_rel_residual", res, tol, res < tol


def _check_dupin(curve, bundle, tol):
    tol = tol if tol is not None else 1e-9
    families = [bundle.flotation, bundle.buoyancy]
    if bundle.illumination is not None:
        families += [bundle.illumination, bundle.illum_centroid]
    worst = max(_tangency_residual(f) for f in families)
    return "max_tangency_residual", worst, tol, worst < tol


def _check_affine_normal(curve, bundle, tol):
    tol = tol if tol is not None else 1.0
    worst = 0.0
    for cm in bundle.chords:
        angle, mag = floatgeom.buoyancy_affine_normal_check(cm, bundle.delta)
        if math.isnan(angle):
            continue
        worst = max(worst, angle / 1e-6, mag / 1e-5)
    return "worst_affine_normal_ratio", worst, tol, worst < tol


def _check_cut_length(curve, bundle, tol):
    tol = tol if tol is not None else _constancy_threshold(curve)
    rep = homothety.affine_cut_length_report(
        curve, bundle.delta, chords=bundle.chords
    )
    cv = rep.coefficient_of_variation
    return "cv_affine_cut_length", cv, tol, cv < tol


def _check_duality(curve, bundle, tol):
    tol = tol if tol is not None else 1e-6
    if not bundle.homothetic or bundle.delta_hat is None or bundle.illum_chords is None:
        return "duality_not_in_homothetic_regime", 0.0, tol, True
    worst = 0.0
    skipped = 0
    for cm_f, cm_i in zip(bundle.chords, bundle.illum_chords):
        if cm_f.z is None or cm_i.z is None:
            skipped += 1
            continue
        worst = max(worst, float(norm2(cm_f.z - cm_i.z)))
    pts = np.array([s.point for s in bundle.flotation])
    diameter = float(norm2(pts.max(axis=0) - pts.min(axis=0)))
    value = worst / diameter
    return "max_pole_mismatch_over_diameter", value, tol, value < tol


def _check_petty(curve, bundle, tol):
    tol = tol if tol is not None else _constancy_threshold(curve)
    cv = homothety.petty_condition_report(curve).coefficient_of_variation
    return "cv_petty_condition", cv, tol, cv < tol


def _check_radon(curve, bundle, tol):
    tol = tol if tol is not None else 1e-9
    try:
        worst = homothety.radon_check(curve, n_samples=128)
    except DomainError:
        return "radon_requires_origin_symmetry", -1.0, tol, False
    return "max_radon_residual", worst, tol, worst < tol


def _check_affine_sphere(curve, bundle, tol):
    tol = tol if tol is not None else 1e-8
    n = 128
    grid = (np.arange(n) + 0.5) * (curve.period / n)
    pts = curve.derivative(grid, 0)
    normals = affine_normal(curve, grid)
    fit = homothety.proper_affine_sphere_residual(pts, normals)
    diameter = float(norm2(pts.max(axis=0) - pts.min(axis=0)))
    value = fit.rms_distance / diameter
    return "affine_normal_concurrency_rms_over_diameter", value, tol, value < tol


CHECKS = {
    "chord_cube": _check_chord_cube,
    "endpoint_balance": _check_endpoint_balance,
    "omega": _check_omega,
    "dupin": _check_dupin,
    "affine_normal": _check_affine_normal,
    "cut_length": _check_cut_length,
    "duality": _check_duality,
    "petty": _check_petty,
    "radon": _check_radon,
    "affine_sphere": _check_affine_sphere,
}


def run_checks(curve, label, bundles, checks, overrides):
    """One record per requested check, aggregated worst-case over deltas."""
    records = []
    for name in checks:
        if name not in CHECKS:
            raise ConfigError(f"unknown check {name!r} (available: {sorted(CHECKS)})")
        tol = overrides.get(name)
        worst = None
        for bundle in bundles:
            statistic, value, threshold, ok = CHECKS[name](curve, bundle, tol)
            entry = {
                "check": name,
                "curve": label,
                "delta": bundle.delta,
                "statistic": statistic,
                "value": float(value),
                "threshold": float(threshold),
                "pass": bool(ok),
            }
            if worst is None or (not ok and worst["pass"]) or (
                ok == worst["pass"] and value / max(threshold, 1e-300) > worst["value"] / max(worst["threshold"], 1e-300)
            ):
                worst = entry
        records.append(worst)
    return records


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x):
    if x is None:
        return ""
    return f"{x:.17g}"


def sample_rows(bundle):
    rows = []
    families = [bundle.flotation, bundle.buoyancy]
    if bundle.illumination is not None:
        families += [bundle.illumination, bundle.illum_centroid]
    for family in families:
        for smp in family:
            cm = smp.chord
            rows.append(
                {
                    "family": smp.family,
                    "s": smp.s,
                    "point_x": smp.point[0],
                    "point_y": smp.point[1],
                    "tangent_x": smp.tangent[0],
                    "tangent_y": smp.tangent[1],
                    "kappa": smp.kappa,
                    "kappa_prime": smp.kappa_prime,
                    "chord_s": cm.s,
                    "chord_t": cm.t,
                    "alpha": cm.alpha,
                    "beta": cm.beta,
                    "norm_c": cm.norm_c,
                    "affine_norm_c": cm.affine_norm_c,
                }
            )
    return rows


def write_curves_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [row["family"]] + [_fmt_float(row[col]) for col in CSV_COLUMNS[1:]]
            )


def read_curves_csv(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise DomainError(f"unexpected CSV header {header}")
        for raw in reader:
            row = {"family": raw[0]}
            for col, val in zip(CSV_COLUMNS[1:], raw[1:]):
                row[col] = float(val) if val != "" else None
            rows.append(row)
    return rows


def report_schema():
    with open(Path(__file__).parent / "report_schema.json") as fh:
        return json.load(fh)


def write_report(path, label, deltas, n_samples, records):
    import jsonschema

    payload = {
        "curve": label,
        "deltas": [float(d) for d in deltas],
        "n_samples": int(n_samples),
        "passed": all(r["pass"] for r in records),
        "records": records,
    }
    jsonschema.validate(payload, report_schema())
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return payload


def write_figure(path, curve, bundles, chord_stride):
    n = max(len(b.chords) for b in bundles)
    grid = np.arange(n) * (curve.period / n)
    curves = [{"label": "body", "points": curve.derivative(grid, 0)}]
    chords = []
    for bundle in bundles:
        curves.append(
            {"label": "flotation_boundary", "points": np.array([s.point for s in bundle.flotation])}
        )
        curves.append(
            {"label": "buoyancy_curve", "points": np.array([s.point for s in bundle.buoyancy])}
        )
        if bundle.illumination is not None:
            curves.append(
                {"label": "illumination_boundary", "points": np.array([s.point for s in bundle.illumination])}
            )
            curves.append(
                {"label": "illumination_centroid", "points": np.array([s.point for s in bundle.illum_centroid])}
            )
        chords.extend(bundle.chords)
    export_svg(curves, path, chords=chords, chord_stride=chord_stride)


# ---------------------------------------------------------------------------
# commands


def _max_workers():
    env = os.environ.get("FLOTILLA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"FLOTILLA_THREADS must be an integer, got {env!r}")
    return min(4, os.cpu_count() or 1)


def cmd_run(config: RunConfig, do_checks=True):
    curve = curve_from_json(config.curve_spec)
    label = curve_label(config.curve_spec)
    total = chord.body_area(curve)
    deltas = resolve_deltas(config.deltas, total)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        bundles = list(
            pool.map(
                lambda d: compute_bundle(curve, d, config.n_samples, config.delta_hat),
                deltas,
            )
        )

    rows = []
    for bundle in bundles:
        rows.extend(sample_rows(bundle))
    write_curves_csv(out_dir / "curves.csv", rows)
    write_figure(out_dir / "figure.svg", curve, bundles, config.chord_stride)

    if not do_checks or not config.checks:
        print(f"wrote {out_dir/'curves.csv'} and {out_dir/'figure.svg'}")
        return EXIT_OK

    records = run_checks(curve, label, bundles, config.checks, config.tolerances_override)
    payload = write_report(out_dir / "report.json", label, deltas, config.n_samples, records)
    for rec in records:
        status = "PASS" if rec["pass"] else "FAIL"
        print(
            f"[{status}] {rec['check']}: {rec['statistic']} = {rec['value']:.6g} "
            f"(threshold {rec['threshold']:.3g}, delta {rec['delta']:.6g})"
        )
    return EXIT_OK if payload["passed"] else EXIT_CHECK_FAILED


def cmd_carousel(config: RunConfig, q, p, s0):
    curve = curve_from_json(config.curve_spec)
    label = curve_label(config.curve_spec)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    delta_star = homothety.solve_carousel_delta(curve, p, q, s0=s0)
    car = homothety.build_carousel(curve, p, q, delta_star, s0=s0)
    payload = {
        "curve": label,
        "p": p,
        "q": q,
        "delta_star": delta_star,
        "closure_defect": car.closure_defect,
        "vertices": car.vertices,
        "lambdas": car.lambdas,
    }
    if q == 3:
        diag = homothety.carousel_diagnostics(curve, delta_star, n_samples=32)
        payload["lambda_cv"] = diag.lambda_report.coefficient_of_variation
        payload["centroid_drift_max"] = diag.centroid_drift_max
        payload["lambda_product_max_dev"] = diag.lambda_product_max_dev
        payload["medial_residual_max"] = diag.medial_residual_max
    with open(out_dir / "carousel.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(
        f"carousel p/q={p}/{q}: delta* = {delta_star:.12g}, "
        f"closure defect {car.closure_defect:.3e}"
    )
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="flotilla",
        description="flotation / buoyancy / illumination curves of convex plane bodies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run sweeps, checks and exporters")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output directory (overrides config)")
    p_run.add_argument("--samples", type=int, help="sweep sample count (overrides config)")
    p_run.add_argument("--checks", help="comma-separated check names (overrides config)")

    p_car = sub.add_parser("carousel", help="solve and diagnose a p/q carousel")
    p_car.add_argument("config")
    p_car.add_argument("--q", type=int, required=True)
    p_car.add_argument("--p", type=int, default=1)
    p_car.add_argument("--s0", type=float, default=0.0)
    p_car.add_argument("--out", help="output directory (overrides config)")

    p_exp = sub.add_parser("export", help="write curves.csv and figure.svg only")
    p_exp.add_argument("config")
    p_exp.add_argument("--out", help="output directory (overrides config)")
    p_exp.add_argument("--samples", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        config = load_config(args.config)
        if getattr(args, "out", None):
            config.output_dir = args.out
        if getattr(args, "samples", None):
            config.n_samples = args.samples
        if getattr(args, "checks", None):
            config.checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        if args.command == "run":
            return cmd_run(config)
        if args.command == "carousel":
            return cmd_carousel(config, q=args.q, p=args.p, s0=args.s0)
        if args.command == "export":
            config.checks = []
            return cmd_run(config, do_checks=False)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FlotillaError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
