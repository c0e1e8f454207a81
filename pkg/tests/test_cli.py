import json
import math
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from flotilla.cli import (
    CHECKS,
    CSV_COLUMNS,
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_OK,
    compute_bundle,
    main,
    read_curves_csv,
    sample_rows,
    write_curves_csv,
)
from flotilla.curve import Ellipse
from flotilla.svg import export_svg

from oracles import circle_segment_area

DELTA = circle_segment_area(math.pi / 3)


def write_config(path, **overrides):
    payload = {
        "curveSpec": {"kind": "ellipse", "a": 1.0, "b": 1.0},
        "deltas": [DELTA],
        "nSamples": 64,
        "checks": ["chord_cube", "endpoint_balance", "omega"],
        "outputDir": str(path.parent / "out"),
    }
    payload.update(overrides)
    path.write_text(json.dumps(payload))
    return path


class TestConfig:
    def test_minimum_samples_enforced(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", nSamples=32)
        assert main(["run", str(cfg)]) == EXIT_CONFIG

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["run", str(bad)]) == EXIT_CONFIG

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "missing.json")]) == EXIT_CONFIG

    def test_unknown_check_name(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", checks=["chord_cube", "nonsense"])
        assert main(["run", str(cfg)]) == EXIT_CONFIG

    def test_delta_fraction_resolution(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", deltas=[{"fraction": 0.25}], checks=["chord_cube"])
        assert main(["run", str(cfg)]) == EXIT_OK

    def test_delta_out_of_range(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", deltas=[10.0])
        assert main(["run", str(cfg)]) == EXIT_CONFIG


class TestRun:
    def test_ellipse_passes_core_checks(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            curveSpec={"kind": "ellipse", "a": 2.0, "b": 1.0},
            deltas=[1.0],
        )
        assert main(["run", str(cfg)]) == EXIT_OK
        out = tmp_path / "out"
        assert (out / "curves.csv").exists()
        assert (out / "report.json").exists()
        assert (out / "figure.svg").exists()

    def test_perturbed_circle_fails_chord_cube(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            curveSpec={"kind": "fourier_radial", "r0": 1.0, "cos": [0, 0, 0.1]},
            deltas=[0.8],
            checks=["chord_cube"],
        )
        assert main(["run", str(cfg)]) == EXIT_CHECK_FAILED
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert not report["passed"]
        rec = report["records"][0]
        assert rec["check"] == "chord_cube"
        assert rec["value"] > rec["threshold"]

    def test_every_requested_check_appears_exactly_once(self, tmp_path):
        checks = sorted(CHECKS)
        cfg = write_config(tmp_path / "c.json", checks=checks, deltas=[DELTA])
        code = main(["run", str(cfg)])
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        names = [r["check"] for r in report["records"]]
        assert sorted(names) == checks
        assert len(set(names)) == len(names)
        assert code == EXIT_OK

    def test_report_validates_against_schema(self, tmp_path):
        import jsonschema
        from flotilla.cli import report_schema

        cfg = write_config(tmp_path / "c.json", checks=["chord_cube", "omega"])
        main(["run", str(cfg)])
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        jsonschema.validate(report, report_schema())

    def test_cli_overrides(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", checks=["chord_cube"])
        out2 = tmp_path / "alt"
        assert main(["run", str(cfg), "--out", str(out2), "--samples", "64", "--checks", "omega"]) == EXIT_OK
        report = json.loads((out2 / "report.json").read_text())
        assert [r["check"] for r in report["records"]] == ["omega"]

    def test_threads_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FLOTILLA_THREADS", "2")
        cfg = write_config(tmp_path / "c.json", deltas=[0.4, 0.9], checks=["chord_cube"])
        assert main(["run", str(cfg)]) == EXIT_OK
        monkeypatch.setenv("FLOTILLA_THREADS", "not-a-number")
        assert main(["run", str(cfg)]) == EXIT_CONFIG

    def test_samples_curve_kind_uses_sampled_threshold(self, tmp_path):
        s = np.linspace(0.0, 2 * math.pi, 128, endpoint=False)
        pts = np.stack([np.cos(s), np.sin(s)], axis=-1).tolist()
        cfg = write_config(
            tmp_path / "c.json",
            curveSpec={"kind": "samples", "points": pts},
            deltas=[DELTA],
            checks=["chord_cube"],
        )
        assert main(["run", str(cfg)]) == EXIT_OK
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert report["records"][0]["threshold"] == 1e-4

    def test_duality_check_is_informative_out_of_regime(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            curveSpec={"kind": "fourier_radial", "r0": 1.0, "cos": [0, 0, 0.1]},
            deltas=[0.8],
            deltaHat=0.8,
            checks=["duality"],
        )
        assert main(["run", str(cfg)]) == EXIT_OK
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        rec = report["records"][0]
        assert rec["pass"] and rec["statistic"] == "duality_not_in_homothetic_regime"

    def test_tolerances_override(self, tmp_path):
        # force a failure by making the ellipse threshold absurdly tight
        cfg = write_config(
            tmp_path / "c.json",
            curveSpec={"kind": "ellipse", "a": 2.0, "b": 1.0},
            deltas=[1.0],
            checks=["chord_cube"],
            tolerancesOverride={"chord_cube": 1e-30},
        )
        assert main(["run", str(cfg)]) == EXIT_CHECK_FAILED


class TestCsv:
    def test_round_trip_bit_exact(self, tmp_path):
        curve = Ellipse(2.0, 1.0)
        bundle = compute_bundle(curve, 1.0, 64)
        rows = sample_rows(bundle)
        path = tmp_path / "curves.csv"
        write_curves_csv(path, rows)
        back = read_curves_csv(path)
        assert len(back) == len(rows)
        for orig, parsed in zip(rows, back):
            assert parsed["family"] == orig["family"]
            for col in CSV_COLUMNS[1:]:
                a, b = orig[col], parsed[col]
                if a is None or (isinstance(a, float) and math.isnan(a)):
                    assert b is None or math.isnan(b)
                else:
                    assert float(a) == b  # 17 significant digits: exact round trip

    def test_header_and_column_order(self, tmp_path):
        curve = Ellipse(1.0, 1.0)
        bundle = compute_bundle(curve, DELTA, 64)
        path = tmp_path / "curves.csv"
        write_curves_csv(path, sample_rows(bundle))
        header = path.read_text().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)

    def test_all_four_families_present_for_homothetic_body(self, tmp_path):
        bundle = compute_bundle(Ellipse(1.0, 1.0), DELTA, 64)
        families = {row["family"] for row in sample_rows(bundle)}
        assert families == {
            "flotation_boundary",
            "buoyancy_curve",
            "illumination_boundary",
            "illumination_centroid",
        }


class TestSvg:
    def _bundle_curves(self):
        curve = Ellipse(1.0, 1.0)
        bundle = compute_bundle(curve, DELTA, 64)
        grid = np.arange(64) * (2 * math.pi / 64)
        curves = [{"label": "body", "points": curve.derivative(grid, 0)}]
        for label, samples in (
            ("flotation_boundary", bundle.flotation),
            ("buoyancy_curve", bundle.buoyancy),
            ("illumination_boundary", bundle.illumination),
            ("illumination_centroid", bundle.illum_centroid),
        ):
            curves.append({"label": label, "points": np.array([s.point for s in samples])})
        return curves, bundle.chords

    def test_circle_bundle_renders_five_closed_curves(self, tmp_path):
        curves, chords = self._bundle_curves()
        path = tmp_path / "fig.svg"
        export_svg(curves, path, chords=chords, chord_stride=8)
        root = ET.parse(path).getroot()
        polygons = [el for el in root.iter() if el.tag.endswith("polygon")]
        lines = [el for el in root.iter() if el.tag.endswith("line")]
        texts = [el for el in root.iter() if el.tag.endswith("text")]
        assert len(polygons) == 5
        assert len(lines) == 8  # 64 chords at stride 8
        assert len(texts) == 5  # legend entry per curve

    def test_zero_stride_omits_chords(self, tmp_path):
        curves, chords = self._bundle_curves()
        path = tmp_path / "fig.svg"
        export_svg(curves, path, chords=chords, chord_stride=0)
        root = ET.parse(path).getroot()
        assert not [el for el in root.iter() if el.tag.endswith("line")]

    def test_viewbox_is_bounds_plus_margin(self, tmp_path):
        curves, chords = self._bundle_curves()
        path = tmp_path / "fig.svg"
        export_svg(curves, path)
        root = ET.parse(path).getroot()
        vb = [float(x) for x in root.attrib["viewBox"].split()]
        pts = np.concatenate([np.asarray(c["points"]) for c in curves])
        x0, y0 = pts.min(axis=0)
        x1, y1 = pts.max(axis=0)
        span = max(x1 - x0, y1 - y0)
        margin = 0.05 * span
        # svg y axis is flipped
        assert vb[0] == pytest.approx(x0 - margin, rel=1e-6)
        assert vb[1] == pytest.approx(-y1 - margin, rel=1e-6)
        assert vb[2] == pytest.approx((x1 - x0) + 2 * margin, rel=1e-6)
        assert vb[3] == pytest.approx((y1 - y0) + 2 * margin, rel=1e-6)


class TestSubcommands:
    def test_carousel_command(self, tmp_path):
        cfg = write_config(tmp_path / "c.json")
        out = tmp_path / "car"
        assert main(["carousel", str(cfg), "--q", "3", "--out", str(out)]) == EXIT_OK
        payload = json.loads((out / "carousel.json").read_text())
        assert payload["delta_star"] == pytest.approx(DELTA, abs=1e-9)
        assert abs(payload["closure_defect"]) < 1e-10
        assert payload["lambda_product_max_dev"] < 1e-8

    def test_export_command(self, tmp_path):
        cfg = write_config(tmp_path / "c.json")
        out = tmp_path / "exp"
        assert main(["export", str(cfg), "--out", str(out)]) == EXIT_OK
        assert (out / "curves.csv").exists()
        assert (out / "figure.svg").exists()
        assert not (out / "report.json").exists()

    def test_usage_error(self):
        assert main(["run"]) == EXIT_CONFIG
        assert main(["bogus-subcommand"]) == EXIT_CONFIG
