"""The catalogue of explicit Z2 harmonic functions and 1-forms.

Three construction families:

* ``ReHPowerForm`` -- f = Re h^(3/2) (and higher half powers) on R^4 for a
  bivariate holomorphic germ h; omega = df.
* ``PlanarForm`` -- omega = Re(p(z)^(1/2) dz) on R^2 for a univariate
  polynomial p.
* ``AxialForm`` -- the R^3 family with potential z * Re(w^(3/2)), whose
  vanishing order is 3/2 at the origin but 1/2 elsewhere on the axis.

Covector components are real arrays in the coordinates
(Re z, Im z, Re w, Im w), (x, y) and (x, y, z) respectively.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .branch import (BranchState, EPS_SIGMA, HalfPower, continue_straight,
                     principal_state)
from .defining import (DefiningFunction, Node, ProductOfLines,
                       UnivariatePolynomial, to_complex, to_complex_pair)
from .errors import EmptyIntersection, OnBranchLocus

#: residual contract for sampled points of the zero locus
SIGMA_RESIDUAL = 1e-9


def _require_off_locus(hv: complex):
    if abs(hv) < EPS_SIGMA:
        raise OnBranchLocus(f"|h| = {abs(hv):.3e} below cutoff {EPS_SIGMA}")


def _re_covector(a: complex) -> np.ndarray:
    """Components of Re(a dz) in the real coordinates of z = x + iy."""
    return np.array([a.real, -a.imag])


@dataclass(frozen=True)
class ReHPowerForm:
    """f = Re h^((2k+1)/2) and omega = df on R^4 (= C^2)."""

    h: DefiningFunction
    k: HalfPower = field(default_factory=HalfPower)

    def __post_init__(self):
        if self.h.arity != 2:
            raise ValueError("ReHPowerForm needs a bivariate defining function")

    dimension = 4

    def state_at(self, point) -> BranchState:
        return principal_state(self.h, point)

    def eval_f(self, state: BranchState) -> float:
        """sign * Re(h^((2k+1)/2)) continued to the state's point."""
        _require_off_locus(state.h_value)
        return (state.h_value ** self.k.k * state.sqrt_value).real

    def eval_omega(self, state: BranchState) -> np.ndarray:
        """The covector (2k+1)/2 * Re(h^((2k-1)/2) (h_z dz + h_w dw))."""
        _require_off_locus(state.h_value)
        hz, hw = self.h.partials_at(state.at)
        # h^((2k-1)/2) = h^k * sqrt(h) / h, consistent with the state's sign
        pref = self.k.exponent * state.h_value ** self.k.k \
            * state.sqrt_value / state.h_value
        return np.concatenate([_re_covector(pref * hz), _re_covector(pref * hw)])

    def magnitude(self, point) -> float:
        """|omega|; independent of the branch choice."""
        hv = self.h.value_at(point)
        _require_off_locus(hv)
        hz, hw = self.h.partials_at(point)
        return (self.k.exponent * abs(hv) ** (self.k.exponent - 1.0)
                * np.hypot(abs(hz), abs(hw)))

    def f_near(self, center: BranchState):
        """f as a plain function near ``center``, branch continued from it."""
        def f(point):
            return self.eval_f(continue_straight(self.h, center, point))
        return f

    def to_dict(self) -> dict:
        d = self.h.to_dict()
        d["k"] = self.k.k
        return d


@dataclass(frozen=True)
class PlanarForm:
    """omega = Re(p(z)^(1/2) dz) on R^2."""

    p: UnivariatePolynomial
    dimension = 2

    def state_at(self, point) -> BranchState:
        return principal_state(self.p, point)

    def eval_omega(self, state: BranchState) -> np.ndarray:
        _require_off_locus(state.h_value)
        return _re_covector(state.sqrt_value)

    def magnitude(self, point) -> float:
        pv = self.p.value_at(point)
        _require_off_locus(pv)
        return np.sqrt(abs(pv))

    def to_dict(self) -> dict:
        return self.p.to_dict()


def eval_planar(p: UnivariatePolynomial, state: BranchState) -> np.ndarray:
    """Covector of Re(p^(1/2) dz) at a continuation state."""
    return PlanarForm(p).eval_omega(state)


@dataclass(frozen=True)
class AxialForm:
    """The R^3 family: potential z * Re(w^((2k+1)/2)), omega = 2 d(potential).

    Coordinates (x, y, z) with w = x + i y; the branching set is the z-axis.
    """

    k: HalfPower = field(default_factory=HalfPower)
    dimension = 3

    def _split(self, point):
        p = np.asarray(point, dtype=float)
        return complex(p[0], p[1]), p[2]

    def potential(self, point, sign: int = +1) -> float:
        w, z = self._split(point)
        _require_off_locus(w)
        return sign * z * (w ** self.k.k * cmath.sqrt(w)).real

    def eval_omega(self, point, sign: int = +1) -> np.ndarray:
        w, z = self._split(point)
        return eval_r3_form(z, w, sign=sign, k=self.k.k)

    def magnitude(self, point) -> float:
        w, z = self._split(point)
        _require_off_locus(w)
        m = self.k.exponent
        half_low = w ** self.k.k * cmath.sqrt(w) / w  # w^((2k-1)/2)
        dz_comp = 2.0 * (w ** self.k.k * cmath.sqrt(w)).real
        return np.sqrt((2.0 * m * z) ** 2 * abs(half_low) ** 2 + dz_comp**2)

    def to_dict(self) -> dict:
        return {"kind": "r3", "k": self.k.k}


def eval_r3_form(z_coord: float, w: complex, sign: int = +1, k: int = 1) -> np.ndarray:
    """Covector 2 Re(w^((2k+1)/2)) dz + (2k+1) z Re(w^((2k-1)/2) dw) in (x, y, z).

    The paper case is k = 1: omega = 2 Re(w^(3/2)) dz + 3 z Re(w^(1/2) dw).
    """
    _require_off_locus(w)
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    high = w**k * cmath.sqrt(w)          # w^((2k+1)/2), principal
    low = high / w                       # w^((2k-1)/2)
    dw_part = sign * (2 * k + 1) * z_coord * low
    return np.array([dw_part.real, -dw_part.imag, sign * 2.0 * high.real])


def family_nodal(a: complex, b: complex, c: complex,
                 k: int = 1) -> ReHPowerForm:
    """The deformation family h = (z - b)(w - c) - a; a = 0 degenerates to
    the union of lines {z = b} and {w = c}."""
    return ReHPowerForm(Node(a=a, b=b, c=c), HalfPower(k))


# --------------------------------------------------------------------------
# sampling the zero locus


def sample_sigma(h: DefiningFunction, window, count: int,
                 seed: int = 0) -> list[np.ndarray]:
    """Point clouds on Sigma = {h = 0} inside a coordinate window.

    ``window`` is a (4, 2) array of per-coordinate bounds in
    (Re z, Im z, Re w, Im w).  For ``ProductOfLines`` the lines are
    parameterized exactly; otherwise for seeded z samples the roots in w
    come from companion-matrix rootfinding, polished by Newton to a
    residual below 1e-9.
    """
    window = np.asarray(window, dtype=float).reshape(4, 2)
    if isinstance(h, ProductOfLines):
        return _sample_lines(h, window, count)

    rng = np.random.default_rng(seed)
    points: list[np.ndarray] = []
    for _ in range(count):
        z = complex(rng.uniform(*window[0]), rng.uniform(*window[1]))
        coeffs = h.w_poly_coeffs(z)
        if np.allclose(coeffs[1:], 0.0):
            continue
        for w in np.roots(list(reversed(coeffs))):
            w = _newton_polish_w(h, z, complex(w))
            if w is None:
                continue
            if window[2, 0] <= w.real <= window[2, 1] and \
               window[3, 0] <= w.imag <= window[3, 1]:
                points.append(np.array([z.real, z.imag, w.real, w.imag]))
    if not points:
        raise EmptyIntersection("no locus points found in window")
    return [np.array(points)]


def _newton_polish_w(h, z, w, iters: int = 20):
    for _ in range(iters):
        hv = h.value(z, w)
        if abs(hv) < SIGMA_RESIDUAL:
            return w
        _, hw = h.partials(z, w)
        if hw == 0:
            return None
        w = w - hv / hw
    return w if abs(h.value(z, w)) < SIGMA_RESIDUAL else None


def _sample_lines(h: ProductOfLines, window, count) -> list[np.ndarray]:
    radius = np.max(np.abs(window))
    clouds = []
    for v in h.unit_directions():
        pts = []
        n_r, n_t = max(2, count // 32), 32
        for r in np.linspace(radius / n_r, radius, n_r):
            for t in 2.0 * np.pi * np.arange(n_t) / n_t:
                lam = r * cmath.exp(1j * t)
                z, w = lam * v[0], lam * v[1]
                p = np.array([z.real, z.imag, w.real, w.imag])
                if np.all(p >= window[:, 0]) and np.all(p <= window[:, 1]):
                    pts.append(p)
        if pts:
            clouds.append(np.array(pts))
    if not clouds:
        raise EmptyIntersection("no locus points found in window")
    return clouds


def sample_lines_on_sphere(h: ProductOfLines, radius: float,
                           count: int = 128) -> np.ndarray:
    """Exact samples of Sigma intersected with the sphere |x| = radius."""
    t = 2.0 * np.pi * np.arange(count) / count
    pts = []
    for v in h.unit_directions():
        lam = radius * np.exp(1j * t)
        z, w = np.outer(lam, [v[0]]).ravel(), np.outer(lam, [v[1]]).ravel()
        pts.append(np.column_stack([z.real, z.imag, w.real, w.imag]))
    return np.vstack(pts)


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    d2 = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
    return float(np.sqrt(max(d2.min(axis=1).max(), d2.min(axis=0).max())))


# --------------------------------------------------------------------------
# fitted vanishing orders


def vanishing_order(magnitude_fn, base_point, direction,
                    r_lo: float = 1e-3, r_hi: float = 1e-1,
                    n: int = 20) -> float:
    """Log-log slope of |omega| along base_point + r * direction.

    The window [1e-3, 1e-1] keeps the square root well conditioned below
    and higher-order terms small above.
    """
    base = np.asarray(base_point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    radii = np.geomspace(r_lo, r_hi, n)
    mags = np.array([magnitude_fn(base + r * direction) for r in radii])
    slope, _ = np.polyfit(np.log(radii), np.log(mags), 1)
    return float(slope)
