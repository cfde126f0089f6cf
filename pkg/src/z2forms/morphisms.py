"""Harmonic morphisms and fiber topology on the 3-sphere.

The Hopf map and its Seifert generalizations [z1^p : z2^q], fiber
parameterization (torus knots, multiple covers), pullback of planar
forms, Gauss linking numbers, covering degrees, and chart-based
Laplace-Beltrami residuals.

Points of S^3 are real 4-vectors (Re z1, Im z1, Re z2, Im z2).
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

import numpy as np

from .errors import (ChartBoundary, CurvesTooClose, ImageAtInfinity,
                     NotInTube, NotOnSphere, SingularFiber)
from .paths import Polyline

SPHERE_TOL = 1e-10


def _split(point) -> tuple[complex, complex]:
    p = np.asarray(point, dtype=float)
    return complex(p[0], p[1]), complex(p[2], p[3])


def hopf(z: complex, w: complex) -> np.ndarray:
    """The Hopf map (z, w) -> (|z|^2 - |w|^2, 2 z conj(w)) in R + C."""
    if abs(abs(z) ** 2 + abs(w) ** 2 - 1.0) > SPHERE_TOL:
        raise NotOnSphere(f"|z|^2 + |w|^2 = {abs(z)**2 + abs(w)**2:.12f}")
    zw = 2.0 * z * w.conjugate()
    return np.array([abs(z) ** 2 - abs(w) ** 2, zw.real, zw.imag])


@dataclass(frozen=True)
class SmoothMap:
    """A map between charts with closed-form evaluation and Jacobian."""

    name: str
    source_dim: int
    target_dim: int
    func: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]

    def __call__(self, point) -> np.ndarray:
        return np.asarray(self.func(np.asarray(point, dtype=float)), dtype=float)

    def jacobian(self, point) -> np.ndarray:
        return np.asarray(self.jac(np.asarray(point, dtype=float)), dtype=float)


def identity_map(dim: int) -> SmoothMap:
    return SmoothMap("identity", dim, dim, lambda x: x,
                     lambda x: np.eye(dim))


def hopf_sphere_map() -> SmoothMap:
    """Hopf map as an ambient map R^4 -> R^3 (restricting to S^3 -> S^2)."""
    def func(x):
        a, b, c, d = x
        return np.array([a * a + b * b - c * c - d * d,
                         2.0 * (a * c + b * d),
                         2.0 * (b * c - a * d)])

    def jac(x):
        a, b, c, d = x
        return np.array([[2 * a, 2 * b, -2 * c, -2 * d],
                         [2 * c, 2 * d, 2 * a, 2 * b],
                         [-2 * d, 2 * c, 2 * b, -2 * a]])

    return SmoothMap("hopf", 4, 3, func, jac)


def _complex_jacobian_rows(*coeffs: complex) -> np.ndarray:
    """Real 2 x 2n Jacobian of zeta = sum coeffs_i * u_i for complex u_i."""
    row_re, row_im = [], []
    for a in coeffs:
        row_re += [a.real, -a.imag]
        row_im += [a.imag, a.real]
    return np.array([row_re, row_im])


def hopf_chart_map() -> SmoothMap:
    """S^3 -> C, (z, w) -> z / w: the Hopf map composed with the
    stereographic identification of S^2 minus a pole with the plane.

    The deleted set is the fiber {w = 0} over the pole.
    """
    def func(x):
        z, w = _split(x)
        if abs(w) < 1e-12:
            raise ImageAtInfinity("point lies over the deleted pole (w = 0)")
        zeta = z / w
        return np.array([zeta.real, zeta.imag])

    def jac(x):
        z, w = _split(x)
        if abs(w) < 1e-12:
            raise ImageAtInfinity("point lies over the deleted pole (w = 0)")
        return _complex_jacobian_rows(1.0 / w, -z / (w * w))

    return SmoothMap("hopf-chart", 4, 2, func, jac)


def pullback(mp: SmoothMap, covector_at_image, point) -> np.ndarray:
    """J^T v: pull a covector field back through a smooth map."""
    point = np.asarray(point, dtype=float)
    v = np.asarray(covector_at_image(mp(point)), dtype=float)
    return mp.jacobian(point).T @ v


def pullback_form(mp: SmoothMap, form, point, sign: int = +1) -> np.ndarray:
    """Pull back a planar Z2 form; the branch sign is supplied explicitly
    (continue it along a path with the composed germ to change it)."""
    from .branch import principal_state

    def cov(image_pt):
        return sign * form.eval_omega(principal_state(form.p, image_pt))

    return pullback(mp, cov, point)


@dataclass(frozen=True)
class ComposedGerm:
    """p composed with a chart map; feeds the winding/monodromy oracles."""

    p: object          # univariate defining function
    chart: SmoothMap

    def value_at(self, point) -> complex:
        y = self.chart(point)
        return self.p.value(complex(y[0], y[1]))


# --------------------------------------------------------------------------
# Seifert fibrations


@dataclass(frozen=True)
class Fiber:
    """One fiber of [z1^p : z2^q], sampled as a closed polyline on S^3."""

    p: int
    q: int
    basepoint: np.ndarray
    polyline: Polyline

    @property
    def points(self) -> np.ndarray:
        return self.polyline.points


def seifert_value(p: int, q: int, point) -> complex:
    """Chart value z1^p / z2^q of the fibration [z1^p : z2^q]."""
    z1, z2 = _split(point)
    if abs(z2) < 1e-12:
        raise ImageAtInfinity("chart value undefined on {z2 = 0}")
    return z1**p / z2**q


def _radii_for(p: int, q: int, modulus: float) -> tuple[float, float]:
    """Solve c1^p = modulus * (1 - c1^2)^(q/2), c1 in (0, 1), by bisection."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid**p - modulus * (1.0 - mid * mid) ** (q / 2.0) < 0.0:
            lo = mid
        else:
            hi = mid
    c1 = 0.5 * (lo + hi)
    return c1, np.sqrt(max(0.0, 1.0 - c1 * c1))


def fiber(p: int, q: int, base: complex, n: int = 1024) -> Fiber:
    """The fiber of [z1^p : z2^q] over chart value ``base`` (z1^p / z2^q).

    Parameterized as t -> (e^{iqt} z1, e^{ipt} z2), t in [0, 2 pi); lies on
    the torus {|z1| = c1, |z2| = c2}.
    """
    if gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    base = complex(base)
    if base == 0 or not np.isfinite(abs(base)):
        raise SingularFiber("base value lies on a singular fiber")
    c1, c2 = _radii_for(p, q, abs(base))
    if c1 < 1e-9 or c2 < 1e-9:
        raise SingularFiber("fiber meets {z1 = 0} or {z2 = 0}")
    z1 = c1 * cmath.exp(1j * cmath.phase(base) / p)
    z2 = c2
    t = 2.0 * np.pi * np.arange(n) / n
    e1, e2 = np.exp(1j * q * t) * z1, np.exp(1j * p * t) * z2
    pts = np.column_stack([e1.real, e1.imag, e2.real, e2.imag])
    basept = pts[0].copy()
    return Fiber(p, q, basept, Polyline(pts, closed=True))


def core_fiber(axis: int, n: int = 1024) -> Fiber:
    """A singular fiber: the unit circle {z2 = 0} (axis=0) or {z1 = 0} (axis=1)."""
    t = 2.0 * np.pi * np.arange(n) / n
    pts = np.zeros((n, 4))
    off = 0 if axis == 0 else 2
    pts[:, off] = np.cos(t)
    pts[:, off + 1] = np.sin(t)
    return Fiber(1, 1, pts[0].copy(), Polyline(pts, closed=True))


def fiber_windings(fb: Fiber) -> tuple[int, int]:
    """Winding numbers of arg z1 and arg z2 over one fiber period."""
    pts = fb.polyline.vertices()
    z1 = pts[:, 0] + 1j * pts[:, 1]
    z2 = pts[:, 2] + 1j * pts[:, 3]
    w1 = np.angle(z1[1:] / z1[:-1]).sum() / (2.0 * np.pi)
    w2 = np.angle(z2[1:] / z2[:-1]).sum() / (2.0 * np.pi)
    return round(w1), round(w2)


# --------------------------------------------------------------------------
# linking and covering numbers


def stereographic_pole(curves: list[np.ndarray], seed: int = 0,
                       candidates: int = 256) -> np.ndarray:
    """A point of S^3 far from all given curves (seeded deterministic search)."""
    rng = np.random.default_rng(seed)
    cand = rng.normal(size=(candidates, 4))
    cand /= np.linalg.norm(cand, axis=1, keepdims=True)
    allpts = np.vstack(curves)
    dists = np.linalg.norm(cand[:, None, :] - allpts[None, :, :], axis=2)
    return cand[np.argmax(dists.min(axis=1))]


def stereographic_project(points: np.ndarray, pole: np.ndarray) -> np.ndarray:
    """Stereographic projection of S^3 points to R^3 from ``pole``."""
    pole = np.asarray(pole, dtype=float)
    pole = pole / np.linalg.norm(pole)
    # orthonormal basis of the hyperplane orthogonal to the pole
    basis = np.linalg.svd(pole.reshape(1, 4))[2][1:]
    dots = points @ pole
    if np.any(np.abs(1.0 - dots) < 1e-9):
        raise CurvesTooClose("curve passes through the projection pole")
    return (points @ basis.T) / (1.0 - dots)[:, None]


def gauss_linking(c1: Polyline, c2: Polyline) -> float:
    """Gauss double-sum linking number of two disjoint closed curves in R^3."""
    if not (c1.closed and c2.closed):
        raise ValueError("linking number needs closed curves")
    a, b = c1.vertices(), c2.vertices()
    ra, dra = 0.5 * (a[:-1] + a[1:]), np.diff(a, axis=0)
    rb, drb = 0.5 * (b[:-1] + b[1:]), np.diff(b, axis=0)
    diff = ra[:, None, :] - rb[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    if dist.min() < 1e-3:
        raise CurvesTooClose(f"min curve distance {dist.min():.2e}")
    cross = np.cross(dra[:, None, :], drb[None, :, :])
    integrand = np.einsum("ijk,ijk->ij", cross, diff) / dist**3
    return float(integrand.sum() / (4.0 * np.pi))


def linking_on_sphere(f1: Fiber, f2: Fiber, seed: int = 0) -> float:
    """Gauss linking of two S^3 curves after a shared stereographic projection."""
    pole = stereographic_pole([f1.points, f2.points], seed=seed)
    p1 = stereographic_project(f1.points, pole)
    p2 = stereographic_project(f2.points, pole)
    return gauss_linking(Polyline(p1, closed=True), Polyline(p2, closed=True))


def covering_degree(fb: Fiber, core: Fiber, tube: float = 0.3) -> int:
    """Degree of the angular projection of ``fb`` onto the circle ``core``.

    Signed count of passes along the core direction: the winding number of
    the fiber's angular coordinate in the plane of the core.
    """
    core_pts = core.points
    center = core_pts.mean(axis=0)
    rel = fb.points - center
    dmat = np.linalg.norm(fb.points[:, None, :] - core_pts[None, :, :], axis=2)
    if dmat.min(axis=1).max() >= tube:
        raise NotInTube(f"max distance to core {dmat.min(axis=1).max():.3f}")
    # plane of the core circle from its two leading principal directions
    u, s, vt = np.linalg.svd(core_pts - center)
    e1, e2 = vt[0], vt[1]
    ang = np.unwrap(np.arctan2(rel @ e2, rel @ e1))
    closing = np.arctan2(rel[0] @ e2, rel[0] @ e1) - ang[-1]
    closing = (closing + np.pi) % (2.0 * np.pi) - np.pi
    return round((ang[-1] + closing - ang[0]) / (2.0 * np.pi))


# --------------------------------------------------------------------------
# metric charts and the Laplace-Beltrami oracle


@dataclass(frozen=True)
class MetricChart:
    """An open parameter box with a closed-form metric tensor."""

    name: str
    dim: int
    lo: np.ndarray
    hi: np.ndarray
    metric: Callable[[np.ndarray], np.ndarray]
    embed: Callable[[np.ndarray], np.ndarray] | None = None

    def check_spd(self, points) -> None:
        for y in points:
            np.linalg.cholesky(self.metric(np.asarray(y, dtype=float)))

    def contains(self, y, margin: float = 0.0) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(np.all(y >= self.lo + margin) and np.all(y <= self.hi - margin))


def stereo_s2_chart(extent: float = 4.0) -> MetricChart:
    """Stereographic chart of the round S^2; conformal factor 2/(1+|y|^2)."""
    def metric(y):
        c = 2.0 / (1.0 + y @ y)
        return c * c * np.eye(2)

    def embed(y):
        s = y @ y
        return np.array([2 * y[0], 2 * y[1], s - 1.0]) / (1.0 + s)

    return MetricChart("stereo-s2", 2, -extent * np.ones(2),
                       extent * np.ones(2), metric, embed)


def stereo_s3_chart(extent: float = 4.0) -> MetricChart:
    """Stereographic chart of the round S^3; conformal factor 2/(1+|y|^2)."""
    def metric(y):
        c = 2.0 / (1.0 + y @ y)
        return c * c * np.eye(3)

    def embed(y):
        s = y @ y
        return np.array([2 * y[0], 2 * y[1], 2 * y[2], s - 1.0]) / (1.0 + s)

    return MetricChart("stereo-s3", 3, -extent * np.ones(3),
                       extent * np.ones(3), metric, embed)


def laplace_beltrami_residual(chart: MetricChart, scalar, point,
                              step: float = 1e-2) -> float:
    """Second-order FD evaluation of (1/sqrt(g)) d_i(sqrt(g) g^{ij} d_j u).

    ``scalar`` is a function of the chart parameters.  The stencil uses
    staggered half-step fluxes; the metric is evaluated in closed form.
    """
    y0 = np.asarray(point, dtype=float)
    if not chart.contains(y0, margin=2.0 * step):
        raise ChartBoundary(f"stencil leaves chart {chart.name} at {y0}")
    d = chart.dim

    def flux(y, i):
        g = chart.metric(y)
        ginv = np.linalg.inv(g)
        sqrtg = np.sqrt(np.linalg.det(g))
        grad = np.zeros(d)
        for j in range(d):
            e = np.zeros(d)
            e[j] = step
            grad[j] = (scalar(y + e) - scalar(y - e)) / (2.0 * step)
        return sqrtg * (ginv[i] @ grad)

    total = 0.0
    for i in range(d):
        e = np.zeros(d)
        e[i] = 0.5 * step
        total += (flux(y0 + e, i) - flux(y0 - e, i)) / step
    return total / np.sqrt(np.linalg.det(chart.metric(y0)))


def lb_conformal(scalar, y0, conformal_log_grad, dim: int, step: float,
                 order: int = 4) -> float:
    """Laplace-Beltrami for a conformal metric g = c^2 * delta:

    Delta_g u = c^-2 [Delta u + (dim - 2) grad(log c) . grad u].

    Closed-form metric derivative makes this a single-level FD scheme,
    suitable for the high-accuracy cross-oracle comparison.
    """
    from .fd import (fd_gradient, fd_gradient_order4, fd_laplacian,
                     fd_laplacian_order4)
    y0 = np.asarray(y0, dtype=float)
    if order == 4:
        lap = fd_laplacian_order4(scalar, y0, step)
        grad = fd_gradient_order4(scalar, y0, step)
    else:
        lap = fd_laplacian(scalar, y0, step)
        grad = fd_gradient(scalar, y0, step)
    c = 2.0 / (1.0 + y0 @ y0)
    return (lap + (dim - 2) * conformal_log_grad(y0) @ grad) / (c * c)


def lb_round_s3_conformal(scalar, y0, step: float, order: int = 4) -> float:
    """Chart-formula oracle for the round S^3 in its stereographic chart."""
    def log_grad(y):
        return -2.0 * y / (1.0 + y @ y)

    return lb_conformal(scalar, y0, log_grad, 3, step, order=order)


def lb_cross_oracle(field_r4, x0, step: float = 0.04) -> tuple[float, float]:
    """Richardson-extrapolated Laplace-Beltrami value on round S^3 by the
    two independent discretizations (chart formula, homogeneous extension)."""
    x0 = np.asarray(x0, dtype=float)
    if abs(x0[3] - 1.0) < 1e-6:
        raise ChartBoundary("point at the stereographic pole of the S^3 chart")
    y0 = x0[:3] / (1.0 - x0[3])
    chart = stereo_s3_chart(extent=float(np.max(np.abs(y0))) + 1.0)

    def field_chart(y):
        return field_r4(chart.embed(y))

    def extrap(fn):
        return (16.0 * fn(step / 2.0) - fn(step)) / 15.0

    a = extrap(lambda s: lb_round_s3_conformal(field_chart, y0, s, order=4))
    b = extrap(lambda s: lb_homogeneous_extension(field_r4, x0, s, order=4))
    return a, b


def lb_homogeneous_extension(field_r4, x0, step: float, order: int = 4) -> float:
    """Cross-oracle on the round S^3: the flat R^4 Laplacian of the
    degree-0 homogeneous extension, evaluated on the sphere."""
    from .fd import fd_laplacian, fd_laplacian_order4
    x0 = np.asarray(x0, dtype=float)
    if abs(np.linalg.norm(x0) - 1.0) > SPHERE_TOL:
        raise NotOnSphere(f"|x| = {np.linalg.norm(x0):.12f}")

    def ext(x):
        return field_r4(x / np.linalg.norm(x))

    if order == 4:
        return fd_laplacian_order4(ext, x0, step)
    return fd_laplacian(ext, x0, step)
