"""Command-line surface: construct descriptors, run suites, export artifacts.

Exit codes: 0 success / all checks passed, 1 at least one check failed,
2 schema or I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .defining import from_dict
from .errors import SchemaError, Z2FormsError
from .forms import sample_sigma
from .morphisms import fiber, stereographic_pole, stereographic_project
from .report import jsonable
from .suites import SUITES, _sun_pipeline, normalize_descriptor, run_suite
from .sun import ZonalPoly


def _load_spec(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"cannot read spec {path!r}: {exc}") from exc


def _parse_tols(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        name, _, value = item.partition("=")
        if not name or not value:
            raise SchemaError("$.tol", f"expected name=value, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise SchemaError("$.tol", f"bad tolerance value in {item!r}") from exc
    return out


def cmd_construct(args) -> int:
    descriptor = normalize_descriptor(_load_spec(args.spec))
    text = json.dumps(jsonable(descriptor), sort_keys=True, indent=2) + "\n"
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / "descriptor.json").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    descriptor = normalize_descriptor(_load_spec(args.spec))
    if args.grid and descriptor.get("kind") == "sun":
        descriptor["grid"] = args.grid
    report = run_suite(args.suite, descriptor, seed=args.seed,
                       tolerances=_parse_tols(args.tol))
    for check in report.checks:
        print(check.summary_line())
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"report-{args.suite}.json").write_text(report.to_json())
    if not report.passed:
        failed = report.first_failure()
        print(f"first failing check: {failed.name}", file=sys.stderr)
        return 1
    return 0


def _export_sigma(descriptor: dict, out: Path, seed: int) -> None:
    h = from_dict(descriptor)
    clouds = sample_sigma(h, [[-2, 2]] * (2 * h.arity), 200, seed=seed)
    rows = np.vstack(clouds)
    header = ",".join(f"x{i}" for i in range(rows.shape[1]))
    lines = [header] + [",".join(repr(float(v)) for v in row) for row in rows]
    (out / "sigma.csv").write_text("\n".join(lines) + "\n")


def _export_fiber(descriptor: dict, out: Path, n: int, seed: int) -> None:
    fb = fiber(descriptor["p"], descriptor["q"],
               complex(*descriptor["base"]), n=n)
    # stereographic projection from a pole away from the curve gives a
    # closed polyline in R^3, which is what OBJ viewers expect
    pole = stereographic_pole([fb.points], seed=seed)
    pts = stereographic_project(fb.points, pole)
    lines = [
        "v " + " ".join(repr(float(v)) for v in p) for p in pts
    ]
    loop = " ".join(str(i + 1) for i in range(len(pts)))
    lines.append(f"l {loop} 1")
    (out / "fiber.obj").write_text("\n".join(lines) + "\n")


def _export_field(descriptor: dict, out: Path) -> None:
    pipe = _sun_pipeline(descriptor)
    poly = ZonalPoly(tuple((k, 1.0) for k in descriptor["degrees"]))
    v = pipe.solve_for(poly)
    grid = pipe.grid
    lines = [",".join(repr(float(x)) for x in row) for row in v]
    (out / "field.csv").write_text("\n".join(lines) + "\n")
    sidecar = {
        "descriptor": descriptor,
        "chart": "zeta (branched double cover of the meridian half-plane)",
        "layout": "row-major; row i is xi = axis[i], column j is eta = axis[j]",
        "n": grid.n,
        "half_width": grid.half_width,
        "step": grid.h,
        "truncation": grid.truncation,
    }
    (out / "field.json").write_text(
        json.dumps(jsonable(sidecar), sort_keys=True, indent=2) + "\n")


def cmd_export(args) -> int:
    descriptor = normalize_descriptor(_load_spec(args.spec))
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.what == "sigma":
            if descriptor["kind"] not in ("lines", "node", "ramified",
                                          "bivariate", "planar"):
                raise SchemaError("$.kind", "sigma export needs a defining function")
            _export_sigma(descriptor, out, args.seed)
        elif args.what == "fiber":
            if descriptor["kind"] != "fiber":
                raise SchemaError("$.kind", "fiber export needs a fiber descriptor")
            _export_fiber(descriptor, out, args.resolution or 1024, args.seed)
        else:
            if descriptor["kind"] != "sun":
                raise SchemaError("$.kind", "field export needs a sun descriptor")
            if args.grid:
                descriptor["grid"] = args.grid
            _export_field(descriptor, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="z2forms",
        description="Construct, verify, and export two-valued harmonic "
                    "function and 1-form families.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_construct = sub.add_parser("construct",
                                 help="validate a JSON spec and echo the "
                                      "descriptor with defaults filled")
    p_construct.add_argument("--spec", required=True)
    p_construct.add_argument("--out", default=None)
    p_construct.set_defaults(func=cmd_construct)

    p_verify = sub.add_parser("verify", help="run a named verification suite")
    p_verify.add_argument("--spec", required=True)
    p_verify.add_argument("--suite", required=True, choices=SUITES)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--tol", action="append", default=[],
                          metavar="NAME=VALUE")
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--grid", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_export = sub.add_parser("export", help="write CSV/OBJ/JSON artifacts")
    p_export.add_argument("--spec", required=True)
    p_export.add_argument("--what", required=True,
                          choices=("sigma", "fiber", "field"))
    p_export.add_argument("--out", required=True)
    p_export.add_argument("--seed", type=int, default=0)
    p_export.add_argument("--grid", type=int, default=None)
    p_export.add_argument("--resolution", type=int, default=None)
    p_export.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except Z2FormsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
