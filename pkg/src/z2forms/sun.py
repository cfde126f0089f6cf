"""Symmetric construction of Z2 harmonic functions branching along a circle.

The branching set is the unit circle {x1^2 + x2^2 = 1, x3 = 0} in R^3.
Everything is rotation-invariant about the x3-axis, so the computation
lives in the meridian half-plane (s, x3) with s = sqrt(x1^2 + x2^2).  The
branched double cover is uniformized by the coordinate zeta with

    zeta^2 + 1 = s + i x3,

so zeta and -zeta are the same physical point on opposite sheets, and the
cone angle 4 pi at the circle disappears from the chart.  In this chart
the axisymmetric Laplacian becomes the degenerate divergence-form operator

    div_zeta( s(zeta) grad_zeta u ) = 4 |zeta|^2 s(zeta) * Delta_3d u,

with weight s(zeta) = 1 + xi^2 - eta^2 vanishing on the rotation axis;
the finite-volume discretization then needs no explicit axis condition,
and the regular (finite-value) scheme at zeta = 0 selects exactly the
sqrt(r)-decaying branch of solutions.

Pipeline: a cutoff chi and an axisymmetric harmonic polynomial p define
the two-sheeted function U = +-chi p; its Laplacian H = Delta U is the
compactly supported source; V solves Delta V = H with Dirichlet data at a
truncation radius; u = U - V.  Near the circle u has the expansion

    u = A1p cos(theta/2) sqrt(r) + A1m sin(theta/2) sqrt(r) + O(r^{3/2}),

and combinations of polynomial degrees annihilating (A1p, A1m) decay at
least like r^{3/2}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import RegularGridInterpolator

from .errors import (DegreeTooLarge, FitIllConditioned, GridTooCoarse,
                     NoNullDirection, SolverDiverged)

MAX_ZONAL_DEGREE = 12


# --------------------------------------------------------------------------
# zonal harmonics


def legendre_values(k: int, x):
    """P_k(x) by the three-term recurrence; accepts scalars or arrays."""
    x = np.asarray(x, dtype=float)
    if k == 0:
        return np.ones_like(x)[()] if x.ndim == 0 else np.ones_like(x)
    p_prev, p = np.ones_like(x), x.copy()
    for m in range(1, k):
        p_prev, p = p, ((2 * m + 1) * x * p - m * p_prev) / (m + 1)
    return p[()] if p.ndim == 0 else p


def zonal(k: int, point) -> float:
    """The degree-k zonal harmonic rho^k P_k(cos phi) at a point of R^3."""
    if k < 0 or k > MAX_ZONAL_DEGREE:
        raise DegreeTooLarge(f"zonal degree {k} outside [0, {MAX_ZONAL_DEGREE}]")
    x = np.asarray(point, dtype=float)
    return zonal_meridian(k, float(np.hypot(x[0], x[1])), float(x[2]))


def zonal_meridian(k: int, s: float, x3: float) -> float:
    """Zonal harmonic in meridian coordinates (s, x3)."""
    if k < 0 or k > MAX_ZONAL_DEGREE:
        raise DegreeTooLarge(f"zonal degree {k} outside [0, {MAX_ZONAL_DEGREE}]")
    rho = np.hypot(s, x3)
    if rho == 0.0:
        return 1.0 if k == 0 else 0.0
    return rho**k * legendre_values(k, x3 / rho)


@dataclass(frozen=True)
class ZonalPoly:
    """A finite combination sum_k c_k * zonal(k); harmonic by construction."""

    terms: tuple[tuple[int, float], ...]

    def __post_init__(self):
        terms = tuple((int(k), float(c)) for k, c in self.terms)
        if any(k < 0 or k > MAX_ZONAL_DEGREE for k, _ in terms):
            raise DegreeTooLarge("zonal degree outside the stability budget")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, k: int, coeff: float = 1.0) -> "ZonalPoly":
        return cls(((k, coeff),))

    def value(self, s, x3) -> float:
        return sum(c * zonal_meridian(k, s, x3) for k, c in self.terms)

    def value_3d(self, point) -> float:
        x = np.asarray(point, dtype=float)
        return self.value(float(np.hypot(x[0], x[1])), float(x[2]))


# --------------------------------------------------------------------------
# cutoff


@dataclass(frozen=True)
class Cutoff:
    """Radial cutoff: 0 inside rho <= r1, 1 outside rho >= r2.

    ``quintic`` is the C^2 default; ``cubic`` (C^1) exists to check that
    the null-direction phenomenon does not depend on the cutoff choice.
    """

    r1: float = 3.0
    r2: float = 5.0
    kind: str = "quintic"

    def __post_init__(self):
        if not (self.r2 > self.r1 > 1.0):
            raise ValueError("need r2 > r1 > 1 (the circle has rho = 1)")
        if self.kind not in ("quintic", "cubic"):
            raise ValueError(f"unknown cutoff kind {self.kind!r}")

    def _t(self, rho):
        return (rho - self.r1) / (self.r2 - self.r1)

    def chi(self, rho):
        t = np.clip(self._t(np.asarray(rho, dtype=float)), 0.0, 1.0)
        if self.kind == "quintic":
            out = t**3 * (10.0 - 15.0 * t + 6.0 * t * t)
        else:
            out = t * t * (3.0 - 2.0 * t)
        return out[()] if out.ndim == 0 else out

    def dchi(self, rho):
        t = np.asarray(self._t(np.asarray(rho, dtype=float)))
        inside = (t > 0.0) & (t < 1.0)
        tc = np.clip(t, 0.0, 1.0)
        w = self.r2 - self.r1
        if self.kind == "quintic":
            out = np.where(inside, 30.0 * tc * tc * (1.0 - tc) ** 2 / w, 0.0)
        else:
            out = np.where(inside, 6.0 * tc * (1.0 - tc) / w, 0.0)
        return out[()] if out.ndim == 0 else out

    def d2chi(self, rho):
        t = np.asarray(self._t(np.asarray(rho, dtype=float)))
        inside = (t > 0.0) & (t < 1.0)
        tc = np.clip(t, 0.0, 1.0)
        w = self.r2 - self.r1
        if self.kind == "quintic":
            out = np.where(inside,
                           60.0 * tc * (1.0 - 3.0 * tc + 2.0 * tc * tc) / w**2,
                           0.0)
        else:
            out = np.where(inside, (6.0 - 12.0 * tc) / w**2, 0.0)
        return out[()] if out.ndim == 0 else out


def source_meridian(p: ZonalPoly, chi: Cutoff, s: float, x3: float) -> float:
    """H = p * Delta(chi) + 2 grad(chi) . grad(p) without the sheet sign.

    For a radial cutoff and homogeneous harmonic terms, Euler's identity
    x . grad(p_k) = k p_k gives the closed form
    H = sum_k c_k p_k (chi'' + (2 + 2k) chi' / rho); Delta p = 0 is exact.
    Supported in the shell r1 <= rho <= r2.
    """
    rho = float(np.hypot(s, x3))
    if rho <= chi.r1 or rho >= chi.r2:
        return 0.0
    d1, d2 = chi.dchi(rho), chi.d2chi(rho)
    return sum(c * zonal_meridian(k, s, x3) * (d2 + (2.0 + 2.0 * k) * d1 / rho)
               for k, c in p.terms)


def source_on_cover(p: ZonalPoly, chi: Cutoff, xi: float, eta: float) -> float:
    """H at a double-cover chart point, including the sheet sign.

    The two large-|x| sheets are the xi > 0 and xi < 0 components of the
    chart; the support of H never meets the xi = 0 line.
    """
    s = 1.0 + xi * xi - eta * eta
    x3 = 2.0 * xi * eta
    return float(np.sign(xi)) * source_meridian(p, chi, s, x3) if xi != 0.0 else 0.0


# --------------------------------------------------------------------------
# the double-cover grid and the sparse solve


@dataclass
class DoubleCoverGrid:
    """Uniform Cartesian grid in the uniformizing coordinate zeta.

    ``n`` nodes per dimension on the square [-L, L]^2 with
    L = sqrt(truncation + 1), which contains the preimage of the physical
    ball rho <= truncation.  Unknowns are the nodes with s > 0 (inside the
    rotation-axis hyperbola) and rho < truncation; all other nodes carry
    Dirichlet zero.
    """

    n: int = 512
    truncation: float = 20.0

    def __post_init__(self):
        self.half_width = float(np.sqrt(self.truncation + 1.0))
        self.axis = np.linspace(-self.half_width, self.half_width, self.n)
        self.h = self.axis[1] - self.axis[0]
        self.xi, self.eta = np.meshgrid(self.axis, self.axis, indexing="ij")
        self.s = 1.0 + self.xi**2 - self.eta**2
        self.x3 = 2.0 * self.xi * self.eta
        self.rho = np.hypot(self.s, self.x3)
        self.sheet = np.where(self.xi >= 0.0, 1.0, -1.0)
        self.active = (self.s > 0.0) & (self.rho < self.truncation)
        idx = -np.ones((self.n, self.n), dtype=np.int64)
        idx[self.active] = np.arange(int(self.active.sum()))
        self.index = idx

    @cached_property
    def _matrix_csr(self) -> sp.csr_matrix:
        return self._matrix().tocsr()

    @cached_property
    def _lu(self):
        return spla.splu(self._matrix_csr.tocsc())

    def _matrix(self) -> sp.coo_matrix:
        """Five-point finite-volume matrix of div(s grad .), face-weighted."""
        n, h = self.n, self.h
        idx, active = self.index, self.active
        rows, cols, vals = [], [], []
        diag = np.zeros(int(active.sum()))

        ii, jj = np.nonzero(active)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = np.clip(ii + di, 0, n - 1), np.clip(jj + dj, 0, n - 1)
            xm = 0.5 * (self.axis[ii] + self.axis[ni])
            ym = 0.5 * (self.axis[jj] + self.axis[nj])
            w = np.maximum(1.0 + xm * xm - ym * ym, 0.0) / h**2
            # faces toward the axis region (neighbor with s <= 0) carry no
            # flux: that is the natural boundary condition of the weighted
            # form, and imposing Dirichlet there instead is wrong and
            # grid-alignment dependent
            w[self.s[ni, nj] <= 0.0] = 0.0
            rows_here = idx[ii, jj]
            diag[rows_here] -= w
            nb_active = active[ni, nj] & ((ni != ii) | (nj != jj))
            rows.append(rows_here[nb_active])
            cols.append(idx[ni[nb_active], nj[nb_active]])
            vals.append(w[nb_active])

        m = int(active.sum())
        rows.append(np.arange(m))
        cols.append(np.arange(m))
        vals.append(diag)
        return sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(m, m))

    def rhs_from_source(self, p: ZonalPoly, chi: Cutoff) -> np.ndarray:
        """4 |zeta|^2 s H on the active nodes (flattened)."""
        ii, jj = np.nonzero(self.active)
        xi, eta = self.xi[ii, jj], self.eta[ii, jj]
        s, x3, rho = self.s[ii, jj], self.x3[ii, jj], self.rho[ii, jj]
        out = np.zeros(ii.size)
        m = (rho > chi.r1) & (rho < chi.r2) & (xi != 0.0)
        if m.any():
            rm, cosphi = rho[m], x3[m] / rho[m]
            d1, d2 = chi.dchi(rm), chi.d2chi(rm)
            hv = np.zeros(rm.size)
            for k, c in p.terms:
                hv += (c * rm**k * legendre_values(k, cosphi)
                       * (d2 + (2.0 + 2.0 * k) * d1 / rm))
            out[m] = (np.sign(xi[m]) * 4.0 * (xi[m] ** 2 + eta[m] ** 2)
                      * s[m] * hv)
        return out

    def solve(self, rhs_active: np.ndarray, check: bool = True) -> np.ndarray:
        """Solve div(s grad V) = rhs; returns V on the full grid (0 outside)."""
        v = self._lu.solve(rhs_active)
        if check:
            res = self._matrix_csr @ v - rhs_active
            scale = max(np.linalg.norm(rhs_active), 1e-300)
            if np.linalg.norm(res) > 1e-8 * scale:
                raise SolverDiverged(
                    f"relative residual {np.linalg.norm(res) / scale:.2e}")
        full = np.zeros((self.n, self.n))
        full[self.active] = v
        return full

    def interpolator(self, values: np.ndarray):
        return RegularGridInterpolator((self.axis, self.axis), values,
                                       method="linear", bounds_error=False,
                                       fill_value=0.0)

    def ring_window(self, r_hi: float = 0.1) -> tuple[float, float]:
        """Physical-r fit window resolvable on this grid near the circle."""
        r_lo = max((3.0 * self.h) ** 2, 1e-3)
        if r_lo >= r_hi / 2.0:
            raise GridTooCoarse(f"grid step {self.h:.3f} too coarse for rings")
        return r_lo, r_hi


# --------------------------------------------------------------------------
# leading-coefficient extraction


@dataclass(frozen=True)
class LeadingCoefficients:
    """Coefficients of cos(theta/2) sqrt(r) and sin(theta/2) sqrt(r)."""

    a_plus: float
    a_minus: float
    rel_residual: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.a_plus, self.a_minus])


def extract_a1(u_fn, radii, n_theta: int = 256,
               max_rel_residual: float = 0.2) -> LeadingCoefficients:
    """Fit per-ring half-angle projections of u against sqrt(r).

    ``u_fn(r, theta)`` samples the section near the circle; theta runs over
    [0, 4 pi) on the double cover.  Per ring,
    a(r) = (1/2pi) integral u cos(theta/2) dtheta (sin likewise); then A1
    comes from least squares of a(r) against sqrt(r).
    """
    radii = np.asarray(radii, dtype=float)
    theta = 4.0 * np.pi * np.arange(n_theta) / n_theta
    cosh, sinh_ = np.cos(theta / 2.0), np.sin(theta / 2.0)
    proj_c = np.empty_like(radii)
    proj_s = np.empty_like(radii)
    for i, r in enumerate(radii):
        u = np.array([u_fn(r, t) for t in theta])
        proj_c[i] = 2.0 * np.mean(u * cosh)
        proj_s[i] = 2.0 * np.mean(u * sinh_)
    sq = np.sqrt(radii)
    denom = float(sq @ sq)
    a_plus = float(proj_c @ sq) / denom
    a_minus = float(proj_s @ sq) / denom
    resid = np.hypot(np.linalg.norm(proj_c - a_plus * sq),
                     np.linalg.norm(proj_s - a_minus * sq))
    scale = np.hypot(np.linalg.norm(proj_c), np.linalg.norm(proj_s))
    rel = resid / scale if scale > 1e-13 else 0.0
    if rel > max_rel_residual:
        raise FitIllConditioned(f"relative fit residual {rel:.3f}")
    return LeadingCoefficients(a_plus, a_minus, rel)


def ring_rms_slope(u_fn, radii, n_theta: int = 256) -> float:
    """Log-log slope of the ring RMS of u; >= 1.4 certifies r^{3/2} decay."""
    radii = np.asarray(radii, dtype=float)
    theta = 4.0 * np.pi * np.arange(n_theta) / n_theta
    vals = np.array([np.sqrt(np.mean([u_fn(r, t) ** 2 for t in theta]))
                     for r in radii])
    slope, _ = np.polyfit(np.log(radii), np.log(np.maximum(vals, 1e-300)), 1)
    return float(slope)


def null_combination(a1_matrix: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Unit vector c minimizing ||A c|| for the 2 x K matrix of (A1+, A1-)."""
    a1_matrix = np.asarray(a1_matrix, dtype=float)
    if a1_matrix.shape[0] != 2:
        raise ValueError("expected a 2 x K matrix")
    if a1_matrix.shape[1] < 3:
        raise NoNullDirection("need at least 3 polynomial degrees")
    _, _, vt = np.linalg.svd(a1_matrix)
    return vt[-1]


# --------------------------------------------------------------------------
# pipeline


@dataclass
class SunPipeline:
    """End-to-end run: sources, shared factorized solve, A1 table, null mode."""

    grid: DoubleCoverGrid = field(default_factory=DoubleCoverGrid)
    cutoff: Cutoff = field(default_factory=Cutoff)
    n_theta: int = 256
    n_rings: int = 12

    def solve_for(self, p: ZonalPoly) -> np.ndarray:
        return self.grid.solve(self.grid.rhs_from_source(p, self.cutoff))

    def near_circle_fn(self, v_grid: np.ndarray):
        """u = U - V as a function of (r, theta); U vanishes near the circle."""
        interp = self.grid.interpolator(v_grid)

        def u_fn(r, theta):
            zr = np.sqrt(r)
            return -float(interp((zr * np.cos(theta / 2.0),
                                  zr * np.sin(theta / 2.0))))

        return u_fn

    def ring_radii(self, r_hi: float = 0.1) -> np.ndarray:
        lo, hi = self.grid.ring_window(r_hi)
        return np.geomspace(lo, hi, self.n_rings)

    def a1_of(self, v_grid: np.ndarray,
              max_rel_residual: float = 0.2) -> LeadingCoefficients:
        return extract_a1(self.near_circle_fn(v_grid), self.ring_radii(),
                          self.n_theta, max_rel_residual)

    def run(self, degrees) -> dict:
        degrees = list(degrees)
        solutions = {k: self.solve_for(ZonalPoly.single(k)) for k in degrees}
        coeffs = {k: self.a1_of(solutions[k]) for k in degrees}
        matrix = np.column_stack([coeffs[k].as_array() for k in degrees])
        c = null_combination(matrix)
        combined = sum(ck * solutions[k] for ck, k in zip(c, degrees))
        # the null combination kills the sqrt(r) term, so the fit residual
        # is dominated by the next order and the quality gate must be off
        combo_a1 = self.a1_of(combined, max_rel_residual=np.inf)
        lo, _ = self.grid.ring_window()
        slope_radii = np.geomspace(lo, 0.05, self.n_rings)
        slope = ring_rms_slope(self.near_circle_fn(combined), slope_radii,
                               self.n_theta)
        return {
            "degrees": degrees,
            "a1_matrix": matrix,
            "null_vector": c,
            "combo_a1": combo_a1,
            "decay_slope": slope,
            "solutions": solutions,
            "combined": combined,
        }

    def evaluate_3d(self, point, v_grid: np.ndarray, p: ZonalPoly,
                    sheet: int = +1) -> float:
        """Rebuild u = U - V at a 3-D point on the requested sheet."""
        x = np.asarray(point, dtype=float)
        s = float(np.hypot(x[0], x[1]))
        zeta = np.sqrt(complex(s - 1.0, x[2]))  # principal: Re zeta >= 0
        if sheet == -1:
            zeta = -zeta
        interp = self.grid.interpolator(v_grid)
        v = float(interp((zeta.real, zeta.imag)))
        rho = float(np.hypot(s, x[2]))
        sign = 1.0 if zeta.real >= 0.0 else -1.0
        u_big = sign * self.cutoff.chi(rho) * p.value(s, x[2])
        return u_big - v


# --------------------------------------------------------------------------
# manufactured solution


@dataclass(frozen=True)
class RadialBump:
    """C-infinity compactly supported bump exp(1 - 1/(1 - t^2)) in the chart."""

    center: tuple[float, float] = (1.2, 0.0)
    radius: float = 0.8
    amplitude: float = 1.0

    def _profile(self, t):
        """(E, E', E'') of E(t) = exp(1 - 1/(1 - t^2)) for t < 1."""
        t = np.asarray(t, dtype=float)
        inside = t < 1.0 - 1e-9
        one = np.where(inside, 1.0 - t * t, 1.0)
        e = np.where(inside, np.exp(1.0 - 1.0 / one), 0.0)
        g = -2.0 * t / one**2                      # d/dt of (1 - 1/(1-t^2))
        dg = -2.0 / one**2 - 8.0 * t * t / one**3
        return e, e * g, e * (g * g + dg)

    def value(self, xi, eta):
        d = np.hypot(np.asarray(xi) - self.center[0],
                     np.asarray(eta) - self.center[1])
        return self.amplitude * self._profile(d / self.radius)[0]

    def weighted_laplacian(self, xi, eta):
        """div(s grad V*) in the chart: s Delta V* + grad s . grad V*."""
        xi, eta = np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
        dx, dy = xi - self.center[0], eta - self.center[1]
        d = np.hypot(dx, dy)
        e, de, d2e = self._profile(d / self.radius)
        r2 = self.radius**2
        dsafe = np.where(d < 1e-12, 1.0, d)
        lap = np.where(d < 1e-12, 2.0 * d2e / r2,
                       d2e / r2 + de / (self.radius * dsafe))
        gx = np.where(d < 1e-12, 0.0, de / (self.radius * dsafe) * dx)
        gy = np.where(d < 1e-12, 0.0, de / (self.radius * dsafe) * dy)
        svals = 1.0 + xi * xi - eta * eta
        return self.amplitude * (svals * lap + 2.0 * xi * gx - 2.0 * eta * gy)


def manufactured_error(grid: DoubleCoverGrid, bump: RadialBump | None = None,
                       rms: bool = False) -> float:
    """Error of the solve against the closed-form bump solution.

    Max-norm by default; ``rms=True`` averages over the active nodes, which
    converges more smoothly and is what the order check uses.
    """
    bump = bump or RadialBump()
    xi, eta = grid.xi[grid.active], grid.eta[grid.active]
    v = grid.solve(bump.weighted_laplacian(xi, eta))
    err = np.abs(v[grid.active] - bump.value(xi, eta))
    return float(np.sqrt(np.mean(err**2))) if rms else float(np.max(err))
