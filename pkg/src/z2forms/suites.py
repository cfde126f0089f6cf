"""Named verification suites used by the command-line surface.

Each suite takes a normalized descriptor plus a seed and tolerance map and
returns a :class:`VerificationReport` whose checks re-measure the library's
claims with independent finite-difference / combinatorial oracles.
"""
from __future__ import annotations

import numpy as np

from .branch import HalfPower, continue_straight, monodromy, principal_state, winding_number
from .defining import (DefiningFunction, ProductOfLines, UnivariatePolynomial,
                       from_dict)
from .errors import SchemaError
from .fd import fd_laplacian, rms
from .forms import AxialForm, PlanarForm, ReHPowerForm, sample_sigma, vanishing_order
from .morphisms import core_fiber, covering_degree, fiber, fiber_windings, linking_on_sphere
from .paths import circle
from .report import Check, VerificationReport
from .sun import (Cutoff, DoubleCoverGrid, SunPipeline, ZonalPoly,
                  manufactured_error)

SUITES = ("harmonicity", "monodromy", "vanishing-order", "topology", "sun")

BIVARIATE_KINDS = ("lines", "node", "ramified", "bivariate")


# --------------------------------------------------------------------------
# descriptors


def normalize_descriptor(spec: dict, path: str = "$") -> dict:
    """Validate a JSON construction spec and echo it with defaults filled."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SchemaError(path, "expected an object with a 'kind' field")
    kind = spec["kind"]
    if kind in BIVARIATE_KINDS + ("planar",):
        out = from_dict(spec, path).to_dict()
        out["k"] = int(spec.get("k", 1))
        if out["k"] < 1:
            raise SchemaError(f"{path}.k", "half-power index must be >= 1")
        return out
    if kind == "axial":
        k = int(spec.get("k", 1))
        if k < 1:
            raise SchemaError(f"{path}.k", "half-power index must be >= 1")
        return {"kind": "axial", "k": k}
    if kind == "fiber":
        try:
            p, q = int(spec.get("p", 1)), int(spec.get("q", 1))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{path}.p", str(exc)) from exc
        if p < 1 or q < 1 or np.gcd(p, q) != 1:
            raise SchemaError(f"{path}.p", "need coprime positive (p, q)")
        base = spec.get("base", [0.7, 0.2])
        if not (isinstance(base, (list, tuple)) and len(base) == 2):
            raise SchemaError(f"{path}.base", "expected [re, im]")
        return {"kind": "fiber", "p": p, "q": q,
                "base": [float(base[0]), float(base[1])]}
    if kind == "sun":
        degrees = [int(k) for k in spec.get("degrees", [0, 1, 2, 3, 4])]
        cutoff = spec.get("cutoff", "quintic")
        if cutoff not in ("quintic", "cubic"):
            raise SchemaError(f"{path}.cutoff", f"unknown cutoff {cutoff!r}")
        out = {
            "kind": "sun",
            "degrees": degrees,
            "grid": int(spec.get("grid", 512)),
            "truncation": float(spec.get("truncation", 20.0)),
            "cutoff": cutoff,
            "r1": float(spec.get("r1", 3.0)),
            "r2": float(spec.get("r2", 5.0)),
        }
        if out["grid"] < 64:
            raise SchemaError(f"{path}.grid", "grid must be >= 64")
        return out
    raise SchemaError(f"{path}.kind", f"unknown descriptor kind {kind!r}")


def _form_from(descriptor: dict):
    h = from_dict(descriptor)
    if descriptor["kind"] == "planar":
        return PlanarForm(h)
    return ReHPowerForm(h, HalfPower(descriptor.get("k", 1)))


def _sun_pipeline(descriptor: dict, grid_override: int | None = None) -> SunPipeline:
    n = grid_override or descriptor["grid"]
    return SunPipeline(
        grid=DoubleCoverGrid(n=n, truncation=descriptor["truncation"]),
        cutoff=Cutoff(r1=descriptor["r1"], r2=descriptor["r2"],
                      kind=descriptor["cutoff"]))


# --------------------------------------------------------------------------
# seeded sampling


def _points_off_locus(h: DefiningFunction, count: int, seed: int,
                      min_dist: float = 0.1, window: float = 2.0):
    rng = np.random.default_rng(seed)
    dim = 4 if h.arity == 2 else 2
    points = []
    while len(points) < count:
        x = rng.uniform(-window, window, size=dim)
        if h.sigma_distance_bound(x) > min_dist:
            points.append(x)
    return points


# --------------------------------------------------------------------------
# harmonicity


def _richardson_over_points(local_field_at, points,
                            steps=(1e-2, 5e-3)) -> float:
    residuals = {s: [] for s in steps}
    for pt in points:
        f = local_field_at(pt)
        for s in steps:
            residuals[s].append(fd_laplacian(f, pt, s))
    return rms(residuals[steps[0]]) / rms(residuals[steps[1]])


def run_harmonicity(descriptor: dict, seed: int, tol: dict) -> list[Check]:
    lo = tol.get("ratio_lo", 3.4)
    hi = tol.get("ratio_hi", 4.6)
    count = int(tol.get("points", 200))
    kind = descriptor["kind"]
    checks = []
    if kind in BIVARIATE_KINDS:
        form = _form_from(descriptor)
        pts = _points_off_locus(form.h, count, seed)

        def local(pt):
            return form.f_near(principal_state(form.h, pt))

        ratio = _richardson_over_points(local, pts)
        checks.append(Check(
            "harmonicity.richardson_ratio", lo < ratio < hi,
            {"ratio_lo": lo, "ratio_hi": hi},
            {"points": count, "ratio": ratio, "steps": [1e-2, 5e-3]}))
    elif kind == "planar":
        form = _form_from(descriptor)
        pts = _points_off_locus(form.p, count, seed)
        for comp in (0, 1):
            def local(pt, comp=comp):
                st = principal_state(form.p, pt)

                def f(y):
                    return form.eval_omega(continue_straight(form.p, st, y))[comp]

                return f

            ratio = _richardson_over_points(local, pts)
            checks.append(Check(
                f"harmonicity.component[{comp}].richardson_ratio",
                lo < ratio < hi, {"ratio_lo": lo, "ratio_hi": hi},
                {"points": count, "ratio": ratio}))
    elif kind == "axial":
        form = AxialForm(HalfPower(descriptor["k"]))
        rng = np.random.default_rng(seed)
        pts = []
        while len(pts) < count:
            x = rng.uniform(-2, 2, size=3)
            if np.hypot(x[0], x[1]) > 0.3:
                pts.append(x)
        ratio = _richardson_over_points(lambda pt: form.potential, pts)
        checks.append(Check(
            "harmonicity.potential.richardson_ratio", lo < ratio < hi,
            {"ratio_lo": lo, "ratio_hi": hi},
            {"points": count, "ratio": ratio}))
    else:
        raise SchemaError("$.kind", f"suite 'harmonicity' does not apply to {kind!r}")
    return checks


# --------------------------------------------------------------------------
# monodromy


def _cluster_roots(roots, tol=1e-6):
    """Group numerically coincident roots; returns [(center, multiplicity)]."""
    clusters: list[list[complex]] = []
    for r in sorted(roots, key=lambda v: (v.real, v.imag)):
        for c in clusters:
            if abs(r - np.mean(c)) < tol:
                c.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def _meridian_loops(descriptor: dict):
    """Small loops around branching-set meridians with expected signs.

    For bivariate kinds, loops run in the w-plane around the roots of
    h(z0, .) at a generic z0 (plus z-plane loops for components on which w
    is unconstrained); expected sign is (-1)^multiplicity.
    """
    kind = descriptor["kind"]
    h = from_dict(descriptor)
    loops = []

    def w_loop(z0, center, radius, label):
        return (circle([z0.real, z0.imag, center.real, center.imag], radius,
                       n=64, plane=(2, 3), dim=4, closed=True), label)

    def z_loop(w0, center, radius, label):
        return (circle([center.real, center.imag, w0.real, w0.imag], radius,
                       n=64, plane=(0, 1), dim=4, closed=True), label)

    if kind == "planar":
        roots = np.roots(list(reversed(h.coeffs)))
        for center, mult in _cluster_roots(roots):
            radius = _clearance(center, roots)
            loops.append((circle([center.real, center.imag], radius, n=64,
                                 closed=True),
                          f"planar root {center:.3g}", (-1) ** mult))
        return loops

    z0 = complex(descriptor.get("meridian_z0", 1.1))
    coeffs = h.w_poly_coeffs(z0)
    roots = np.roots(list(reversed(coeffs))) if len(coeffs) > 1 else []
    for center, mult in _cluster_roots(roots):
        loop, label = w_loop(z0, center, _clearance(center, roots),
                             f"w-meridian at z={z0:.3g}, w={center:.3g}")
        loops.append((loop, label, (-1) ** mult))
    if kind == "lines":
        # lines with b = 0 are {z = const} and invisible to the w-poly
        for a, b in h.lines:
            if b == 0:
                center = 0.0 + 0.0j
                loop, label = z_loop(1.0 + 0.0j, center, 0.3,
                                     f"z-meridian at w=1, z={center:.3g}")
                loops.append((loop, label, -1))
    if kind == "node" and _as_complex(descriptor.get("a", 0)) == 0:
        # a = 0 factors as (z - b)(w - c); add the {z = b} meridian
        b = _as_complex(descriptor["b"])
        c = _as_complex(descriptor["c"])
        loop, label = z_loop(c + 1.0, b, 0.3, f"z-meridian around z={b:.3g}")
        loops.append((loop, label, -1))
    return loops


def _as_complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)


def _clearance(center, roots, default=0.3):
    others = [abs(center - r) for r in roots if abs(center - r) > 1e-6]
    return min(default, 0.45 * min(others)) if others else default


def run_monodromy(descriptor: dict, seed: int, tol: dict) -> list[Check]:
    kind = descriptor["kind"]
    if kind not in BIVARIATE_KINDS + ("planar",):
        raise SchemaError("$.kind", f"suite 'monodromy' does not apply to {kind!r}")
    h = from_dict(descriptor)
    checks = []
    for loop, label, expected in _meridian_loops(descriptor):
        sign = monodromy(h, loop)
        wind = winding_number(h, loop)
        refined = monodromy(h, loop.refined(2))
        ok = (sign == expected and refined == sign
              and (-1) ** wind == sign)
        checks.append(Check(
            f"monodromy[{label}]", ok, {},
            {"sign": sign, "expected": expected, "winding": wind,
             "sign_refined": refined}))
    if not checks:
        raise SchemaError("$", "no meridian loops found for this descriptor")
    return checks


# --------------------------------------------------------------------------
# vanishing order


def run_vanishing_order(descriptor: dict, seed: int, tol: dict) -> list[Check]:
    band = tol.get("slope_tol", 0.05)
    kind = descriptor["kind"]
    checks = []
    if kind == "axial":
        form = AxialForm(HalfPower(descriptor["k"]))
        for base, want, label in (([0, 0, 0], descriptor["k"] + 0.5, "origin"),
                                  ([0, 0, 1], 0.5, "axis point")):
            slope = vanishing_order(form.magnitude, base, [1, 0, 0])
            checks.append(Check(
                f"vanishing-order[{label}]", abs(slope - want) < band,
                {"slope_tol": band}, {"slope": slope, "expected": want}))
        return checks
    if kind not in BIVARIATE_KINDS + ("planar",):
        raise SchemaError("$.kind",
                          f"suite 'vanishing-order' does not apply to {kind!r}")
    form = _form_from(descriptor)
    if kind == "planar":
        roots = np.roots(list(reversed(form.p.coeffs)))
        simple = [c for c, m in _cluster_roots(roots) if m == 1]
        for root in simple[:3]:
            slope = vanishing_order(form.magnitude, [root.real, root.imag],
                                    [1, 0])
            checks.append(Check(
                f"vanishing-order[root {root:.3g}]", abs(slope - 0.5) < band,
                {"slope_tol": band}, {"slope": slope, "expected": 0.5}))
        if not checks:
            raise SchemaError("$", "no simple roots to probe")
        return checks
    h = form.h
    clouds = sample_sigma(h, [[-2, 2]] * 4, 40, seed=seed)
    rng = np.random.default_rng(seed)
    probed = 0
    for cloud in clouds:
        base = cloud[rng.integers(len(cloud))]
        hz, hw = h.partials_at(base)
        grad = np.array([hz.real, -hz.imag, hw.real, -hw.imag])
        norm = np.linalg.norm(grad)
        if norm < 1e-6:
            continue  # non-smooth point of the branching set
        slope = vanishing_order(form.magnitude, base, grad / norm,
                                r_lo=1e-4, r_hi=1e-2)
        want = (2 * descriptor.get("k", 1) - 1) / 2.0
        checks.append(Check(
            f"vanishing-order[component {probed}]", abs(slope - want) < band,
            {"slope_tol": band}, {"slope": slope, "expected": want,
                                  "base": list(base)}))
        probed += 1
    if not checks:
        raise SchemaError("$", "no smooth branching-set points sampled")
    return checks


# --------------------------------------------------------------------------
# topology


def run_topology(descriptor: dict, seed: int, tol: dict) -> list[Check]:
    if descriptor["kind"] != "fiber":
        raise SchemaError("$.kind", "suite 'topology' needs a fiber descriptor")
    p, q = descriptor["p"], descriptor["q"]
    base = complex(*descriptor["base"])
    other = -2.0 * base if base != 0 else 1.5 + 0.5j
    band = tol.get("linking_tol", 0.05 if p * q == 1 else 0.1)
    checks = []

    lk = {n: linking_on_sphere(fiber(p, q, base, n=n),
                               fiber(p, q, other, n=n), seed=seed)
          for n in (1024, 2048)}
    ok = (abs(abs(lk[1024]) - p * q) < band
          and abs(lk[1024] - lk[2048]) < band / 2)
    checks.append(Check(
        "topology.fiber_linking", ok, {"linking_tol": band},
        {"expected": p * q, "linking": lk[1024], "linking_fine": lk[2048]}))

    wind = fiber_windings(fiber(p, q, base, n=1024))
    checks.append(Check(
        "topology.windings", wind == (q, p), {},
        {"windings": list(wind), "expected": [q, p]}))

    deg = covering_degree(fiber(p, q, 5e3 + 0j, n=2048),
                          core_fiber(0, n=1024))
    checks.append(Check(
        "topology.covering_degree", deg == q, {},
        {"degree": deg, "expected": q}))
    return checks


# --------------------------------------------------------------------------
# sun


def run_sun(descriptor: dict, seed: int, tol: dict) -> list[Check]:
    if descriptor["kind"] != "sun":
        raise SchemaError("$.kind", "suite 'sun' needs a sun descriptor")
    checks = []

    coarse = manufactured_error(DoubleCoverGrid(n=160), rms=True)
    fine = manufactured_error(DoubleCoverGrid(n=320), rms=True)
    order = float(np.log2(coarse / fine))
    min_order = tol.get("min_order", 1.8)
    checks.append(Check(
        "sun.manufactured_order", order >= min_order,
        {"min_order": min_order},
        {"order": order, "rms_coarse": coarse, "rms_fine": fine}))

    pipe = _sun_pipeline(descriptor)
    out = pipe.run(descriptor["degrees"])
    norms = np.linalg.norm(out["a1_matrix"], axis=0)
    combo = float(np.linalg.norm(out["combo_a1"].as_array()))
    reduction = float(norms.max() / max(combo, 1e-300))
    min_reduction = tol.get("min_reduction", 10.0)
    checks.append(Check(
        "sun.null_combination_reduction", reduction >= min_reduction,
        {"min_reduction": min_reduction},
        {"reduction": reduction, "a1_matrix": out["a1_matrix"],
         "null_vector": out["null_vector"]}))

    min_slope = tol.get("min_slope", 1.4)
    checks.append(Check(
        "sun.decay_slope", out["decay_slope"] >= min_slope,
        {"min_slope": min_slope}, {"slope": out["decay_slope"]}))

    k0, k1 = descriptor["degrees"][0], descriptor["degrees"][-1]
    mixed = pipe.a1_of(pipe.solve_for(
        ZonalPoly(((k0, 0.7), (k1, -1.3))))).as_array()
    want = 0.7 * pipe.a1_of(out["solutions"][k0]).as_array() \
        - 1.3 * pipe.a1_of(out["solutions"][k1]).as_array()
    lin = float(np.linalg.norm(mixed - want) / max(np.linalg.norm(want), 1e-300))
    lin_tol = tol.get("linearity_tol", 1e-4)
    checks.append(Check(
        "sun.superposition_linearity", lin <= lin_tol,
        {"linearity_tol": lin_tol}, {"relative_error": lin}))
    return checks


# --------------------------------------------------------------------------
# dispatch


_RUNNERS = {
    "harmonicity": run_harmonicity,
    "monodromy": run_monodromy,
    "vanishing-order": run_vanishing_order,
    "topology": run_topology,
    "sun": run_sun,
}


def run_suite(suite: str, descriptor: dict, seed: int = 0,
              tolerances: dict | None = None) -> VerificationReport:
    if suite not in _RUNNERS:
        raise SchemaError("$.suite", f"unknown suite {suite!r}; "
                                     f"expected one of {', '.join(SUITES)}")
    checks = _RUNNERS[suite](descriptor, seed, tolerances or {})
    return VerificationReport(suite=suite, descriptor=descriptor, seed=seed,
                              checks=checks)
