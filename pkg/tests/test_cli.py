"""End-to-end tests of the command-line surface."""
import json

import numpy as np
import pytest

from z2forms.cli import main
from z2forms.defining import from_dict


def write_spec(tmp_path, name, spec):
    path = tmp_path / name
    path.write_text(json.dumps(spec))
    return str(path)


class TestConstruct:
    def test_descriptor_echo_round_trips(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "s.json", {"kind": "node", "a": 0,
                                               "b": 0, "c": 0})
        assert main(["construct", "--spec", spec]) == 0
        echoed = json.loads(capsys.readouterr().out)
        spec2 = write_spec(tmp_path, "s2.json", echoed)
        assert main(["construct", "--spec", spec2]) == 0
        assert json.loads(capsys.readouterr().out) == echoed

    def test_planar_descriptor(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "p.json", {"kind": "planar",
                                               "p": [-2.0, 1.0]})
        assert main(["construct", "--spec", spec]) == 0
        echoed = json.loads(capsys.readouterr().out)
        assert echoed["kind"] == "planar"
        assert from_dict(echoed).value(2.0) == 0.0

    def test_unknown_kind_is_schema_error(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "bad.json", {"kind": "mystery"})
        assert main(["construct", "--spec", spec]) == 2

    def test_missing_file_is_schema_error(self, capsys):
        assert main(["construct", "--spec", "/nonexistent.json"]) == 2


class TestVerify:
    def test_monodromy_suite_passes(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "zw.json", {"kind": "node", "a": 0,
                                                "b": 0, "c": 0})
        rc = main(["verify", "--spec", spec, "--suite", "monodromy",
                   "--seed", "3"])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.count("[PASS]") == 2 and "[FAIL]" not in out

    def test_failing_tolerance_exits_one(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "n.json", {"kind": "node", "a": 1,
                                               "b": 0, "c": 0})
        rc = main(["verify", "--spec", spec, "--suite", "vanishing-order",
                   "--tol", "slope_tol=1e-12"])
        assert rc == 1
        assert "[FAIL]" in capsys.readouterr().out

    def test_bad_tolerance_syntax(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "n.json", {"kind": "node", "a": 1,
                                               "b": 0, "c": 0})
        assert main(["verify", "--spec", spec, "--suite", "vanishing-order",
                     "--tol", "slope_tol"]) == 2

    def test_report_written_and_deterministic(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "zw.json", {"kind": "node", "a": 0,
                                                "b": 0, "c": 0})
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            assert main(["verify", "--spec", spec, "--suite", "monodromy",
                         "--seed", "11", "--out", str(out)]) == 0
        capsys.readouterr()
        b1 = (out1 / "report-monodromy.json").read_bytes()
        b2 = (out2 / "report-monodromy.json").read_bytes()
        assert b1 == b2
        report = json.loads(b1)
        assert report["passed"] is True
        assert report["seed"] == 11
        assert {c["name"] for c in report["checks"]}

    def test_wrong_suite_for_descriptor(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "zw.json", {"kind": "node", "a": 0,
                                                "b": 0, "c": 0})
        assert main(["verify", "--spec", spec, "--suite", "topology"]) == 2


class TestExport:
    def test_sigma_csv_residual(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "n.json", {"kind": "node", "a": 1,
                                               "b": 0, "c": 0})
        out = tmp_path / "art"
        assert main(["export", "--spec", spec, "--what", "sigma",
                     "--out", str(out)]) == 0
        rows = (out / "sigma.csv").read_text().strip().splitlines()
        assert rows[0] == "x0,x1,x2,x3"
        h = from_dict({"kind": "node", "a": 1, "b": 0, "c": 0})
        worst = max(abs(h.value_at(np.array([float(v) for v in r.split(",")])))
                    for r in rows[1:])
        assert worst < 1e-9

    def test_fiber_obj_closed_polyline(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "f.json", {"kind": "fiber", "p": 2,
                                               "q": 3})
        out = tmp_path / "art"
        assert main(["export", "--spec", spec, "--what", "fiber",
                     "--out", str(out)]) == 0
        lines = (out / "fiber.obj").read_text().strip().splitlines()
        verts = [l for l in lines if l.startswith("v ")]
        assert len(verts) == 1024
        assert all(len(v.split()) == 4 for v in verts)
        poly = [l for l in lines if l.startswith("l ")]
        assert len(poly) == 1
        indices = poly[0].split()[1:]
        assert indices[0] == "1" and indices[-1] == "1"  # closed loop

    def test_field_grid_with_sidecar(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "s.json", {"kind": "sun", "grid": 96,
                                               "degrees": [1]})
        out = tmp_path / "art"
        assert main(["export", "--spec", spec, "--what", "field",
                     "--out", str(out)]) == 0
        rows = (out / "field.csv").read_text().strip().splitlines()
        sidecar = json.loads((out / "field.json").read_text())
        assert len(rows) == 96 == sidecar["n"]
        assert len(rows[0].split(",")) == 96
        assert sidecar["descriptor"]["kind"] == "sun"
        assert sidecar["half_width"] == pytest.approx(np.sqrt(21.0))

    def test_export_kind_mismatch(self, tmp_path, capsys):
        spec = write_spec(tmp_path, "f.json", {"kind": "fiber", "p": 2,
                                               "q": 3})
        assert main(["export", "--spec", spec, "--what", "sigma",
                     "--out", str(tmp_path / "x")]) == 2
