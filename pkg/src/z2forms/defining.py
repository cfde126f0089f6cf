"""Holomorphic defining functions h with closed-form partial derivatives.

Each kind evaluates ``h`` and its partials exactly; finite differences are
reserved for the test oracles.  Bivariate functions act on C^2 (points in
R^4 via z = x0 + i*x1, w = x2 + i*x3), univariate ones on C (points in
R^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SchemaError


def to_complex_pair(point) -> tuple[complex, complex]:
    p = np.asarray(point, dtype=float)
    return complex(p[0], p[1]), complex(p[2], p[3])


def to_complex(point) -> complex:
    p = np.asarray(point, dtype=float)
    return complex(p[0], p[1])


def _cx(v) -> list[float]:
    v = complex(v)
    return [v.real, v.imag]


def _from_cx(v, path: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise SchemaError(path, f"expected number or [re, im], got {v!r}")


class DefiningFunction:
    """Common interface: value, closed-form partials, JSON round trip."""

    arity: int  # 1 (univariate) or 2 (bivariate)
    kind: str

    def value(self, z: complex, w: complex | None = None) -> complex:
        raise NotImplementedError

    def partials(self, z: complex, w: complex | None = None):
        """(dh/dz,) for arity 1, (dh/dz, dh/dw) for arity 2."""
        raise NotImplementedError

    def value_at(self, point) -> complex:
        if self.arity == 1:
            return self.value(to_complex(point))
        return self.value(*to_complex_pair(point))

    def partials_at(self, point):
        if self.arity == 1:
            return self.partials(to_complex(point))
        return self.partials(*to_complex_pair(point))

    def sigma_distance_bound(self, point) -> float:
        """First-order lower-bound proxy |h| / |grad h| for dist(point, Sigma)."""
        hv = self.value_at(point)
        grad = np.array(self.partials_at(point))
        norm = np.linalg.norm(np.abs(grad))
        if norm == 0.0:
            return np.inf if hv != 0 else 0.0
        return abs(hv) / norm

    def w_poly_coeffs(self, z: complex) -> np.ndarray:
        """Ascending coefficients of w -> h(z, w); used by locus sampling."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ProductOfLines(DefiningFunction):
    """h = prod_j (a_j z + b_j w): any finite union of complex lines through 0."""

    lines: tuple[tuple[complex, complex], ...]
    arity = 2
    kind = "lines"

    def __post_init__(self):
        lines = tuple((complex(a), complex(b)) for a, b in self.lines)
        if not lines:
            raise ValueError("at least one line required")
        if any(a == 0 and b == 0 for a, b in lines):
            raise ValueError("each line needs (a, b) != (0, 0)")
        object.__setattr__(self, "lines", lines)

    def factors(self, z, w):
        return [a * z + b * w for a, b in self.lines]

    def value(self, z, w=None):
        out = 1.0 + 0.0j
        for f in self.factors(z, w):
            out *= f
        return out

    def partials(self, z, w=None):
        facs = self.factors(z, w)
        hz = 0.0 + 0.0j
        hw = 0.0 + 0.0j
        for j, (a, b) in enumerate(self.lines):
            rest = 1.0 + 0.0j
            for i, f in enumerate(facs):
                if i != j:
                    rest *= f
            hz += a * rest
            hw += b * rest
        return hz, hw

    def sigma_distance_bound(self, point) -> float:
        z, w = to_complex_pair(point)
        return min(abs(a * z + b * w) / np.hypot(abs(a), abs(b))
                   for a, b in self.lines)

    def w_poly_coeffs(self, z):
        poly = np.array([1.0 + 0.0j])
        for a, b in self.lines:
            poly = np.convolve(poly, np.array([a * z, b]))
        return poly

    def unit_directions(self) -> list[np.ndarray]:
        """Unit vectors in C^2 spanning each line {a z + b w = 0}."""
        dirs = []
        for a, b in self.lines:
            v = np.array([b, -a], dtype=complex)
            dirs.append(v / np.linalg.norm(np.abs(v)))
        return dirs

    def to_dict(self):
        return {"kind": self.kind, "lines": [[_cx(a), _cx(b)] for a, b in self.lines]}


@dataclass(frozen=True)
class Node(DefiningFunction):
    """h = (z - b)(w - c) - a: smooth for a != 0, nodal at a = 0."""

    a: complex = 0.0
    b: complex = 0.0
    c: complex = 0.0
    arity = 2
    kind = "node"

    def value(self, z, w=None):
        return (z - self.b) * (w - self.c) - self.a

    def partials(self, z, w=None):
        return (w - self.c), (z - self.b)

    def w_poly_coeffs(self, z):
        # (z-b) w - (z-b) c - a
        return np.array([-(z - self.b) * self.c - self.a, z - self.b])

    def to_dict(self):
        return {"kind": self.kind, "a": _cx(self.a), "b": _cx(self.b), "c": _cx(self.c)}


@dataclass(frozen=True)
class RamifiedCover(DefiningFunction):
    """h = w^2 - a (z^3 + 1): elliptic curve for a != 0, doubled plane at a = 0."""

    a: complex = 1.0
    arity = 2
    kind = "ramified"

    def value(self, z, w=None):
        return w * w - self.a * (z**3 + 1.0)

    def partials(self, z, w=None):
        return -3.0 * self.a * z * z, 2.0 * w

    def w_poly_coeffs(self, z):
        return np.array([-self.a * (z**3 + 1.0), 0.0 + 0.0j, 1.0 + 0.0j])

    def to_dict(self):
        return {"kind": self.kind, "a": _cx(self.a)}


@dataclass(frozen=True)
class BivariatePolynomial(DefiningFunction):
    """h = sum c_[i,j] z^i w^j given by a finite coefficient table."""

    terms: tuple[tuple[int, int, complex], ...]
    arity = 2
    kind = "bivariate"

    def __post_init__(self):
        terms = tuple((int(i), int(j), complex(c)) for i, j, c in self.terms)
        if any(i < 0 or j < 0 for i, j, _ in terms):
            raise ValueError("exponents must be nonnegative")
        object.__setattr__(self, "terms", terms)

    def value(self, z, w=None):
        return sum(c * z**i * w**j for i, j, c in self.terms)

    def partials(self, z, w=None):
        hz = sum(c * i * z ** (i - 1) * w**j for i, j, c in self.terms if i > 0)
        hw = sum(c * j * z**i * w ** (j - 1) for i, j, c in self.terms if j > 0)
        return complex(hz), complex(hw)

    def w_poly_coeffs(self, z):
        deg = max(j for _, j, _ in self.terms)
        coeffs = np.zeros(deg + 1, dtype=complex)
        for i, j, c in self.terms:
            coeffs[j] += c * z**i
        return coeffs

    def to_dict(self):
        return {"kind": self.kind,
                "terms": [[i, j, _cx(c)] for i, j, c in self.terms]}


@dataclass(frozen=True)
class UnivariatePolynomial(DefiningFunction):
    """p(z) with ascending coefficients; the germ of the planar forms."""

    coeffs: tuple[complex, ...]
    arity = 1
    kind = "planar"

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs or all(c == 0 for c in coeffs):
            raise ValueError("polynomial must be nonzero")
        object.__setattr__(self, "coeffs", coeffs)

    def value(self, z, w=None):
        out = 0.0 + 0.0j
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def partials(self, z, w=None):
        out = 0.0 + 0.0j
        for k in range(len(self.coeffs) - 1, 0, -1):
            out = out * z + k * self.coeffs[k]
        return (out,)

    def derivative(self, z) -> complex:
        return self.partials(z)[0]

    def roots(self) -> np.ndarray:
        return np.roots(list(reversed(self.coeffs)))

    def to_dict(self):
        return {"kind": self.kind, "p": [_cx(c) for c in self.coeffs]}


def from_dict(spec: dict, path: str = "$") -> DefiningFunction:
    """Rebuild a defining function from its JSON descriptor."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SchemaError(path, "expected an object with a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "lines":
            lines = spec["lines"]
            return ProductOfLines(tuple(
                (_from_cx(ab[0], f"{path}.lines[{i}][0]"),
                 _from_cx(ab[1], f"{path}.lines[{i}][1]"))
                for i, ab in enumerate(lines)))
        if kind == "node":
            return Node(a=_from_cx(spec.get("a", 0), f"{path}.a"),
                        b=_from_cx(spec.get("b", 0), f"{path}.b"),
                        c=_from_cx(spec.get("c", 0), f"{path}.c"))
        if kind == "ramified":
            return RamifiedCover(a=_from_cx(spec.get("a", 1), f"{path}.a"))
        if kind == "bivariate":
            return BivariatePolynomial(tuple(
                (t[0], t[1], _from_cx(t[2], f"{path}.terms[{i}][2]"))
                for i, t in enumerate(spec["terms"])))
        if kind == "planar":
            return UnivariatePolynomial(tuple(
                _from_cx(c, f"{path}.p[{i}]") for i, c in enumerate(spec["p"])))
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise SchemaError(path, str(exc)) from exc
    raise SchemaError(f"{path}.kind", f"unknown defining-function kind {kind!r}")
