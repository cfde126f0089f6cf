"""Polyline paths in R^n and their CSV interchange format.

All curve inputs to the library are sampled polylines.  A closed polyline
stores each vertex once; the closing edge back to the first vertex is
implicit.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Polyline:
    """An ordered list of points in R^n (n = 2, 3 or 4)."""

    points: np.ndarray  # shape (m, n)
    closed: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ValueError("polyline needs at least 2 points")
        if pts.shape[1] not in (2, 3, 4):
            raise ValueError("polyline points must live in R^2, R^3 or R^4")
        if not np.all(np.isfinite(pts)):
            raise ValueError("polyline points must be finite")
        steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(steps == 0.0):
            raise ValueError("consecutive polyline points must be distinct")
        if self.closed and np.array_equal(pts[0], pts[-1]):
            raise ValueError("closed polyline must not repeat its first point")
        object.__setattr__(self, "points", pts)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def vertices(self) -> np.ndarray:
        """Vertices for traversal; appends the first point when closed."""
        if self.closed:
            return np.vstack([self.points, self.points[:1]])
        return self.points

    def reversed(self) -> "Polyline":
        return Polyline(self.points[::-1].copy(), closed=self.closed)

    def refined(self, factor: int = 2) -> "Polyline":
        """Insert ``factor - 1`` evenly spaced points on every edge."""
        verts = self.vertices()
        out = []
        for a, b in zip(verts[:-1], verts[1:]):
            for j in range(factor):
                out.append(a + (b - a) * (j / factor))
        if not self.closed:
            out.append(verts[-1])
        return Polyline(np.array(out), closed=self.closed)


def circle(center, radius: float, n: int = 64, plane=(0, 1), dim: int = 2,
           closed: bool = True) -> Polyline:
    """A planar circle sampled with ``n`` vertices.

    ``plane`` names the two coordinate axes spanning the circle; remaining
    coordinates are taken from ``center``.
    """
    center = np.asarray(center, dtype=float)
    t = 2.0 * np.pi * np.arange(n) / n
    pts = np.tile(center, (n, 1))
    pts[:, plane[0]] += radius * np.cos(t)
    pts[:, plane[1]] += radius * np.sin(t)
    return Polyline(pts, closed=closed)


def write_csv(path, polyline: Polyline) -> None:
    """Write one point per row with header ``x0,x1,...``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(polyline.dimension)])
        for p in polyline.points:
            writer.writerow([repr(float(v)) for v in p])


def read_csv(path, closed: bool = False) -> Polyline:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not all(name.strip() == f"x{i}" for i, name in enumerate(header)):
            raise ValueError(f"unexpected CSV header: {header}")
        pts = np.array([[float(v) for v in row] for row in reader])
    return Polyline(pts, closed=closed)
