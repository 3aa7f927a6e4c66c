"""Spherical geometry primitives on the unit sphere.

Points are plain ``numpy`` arrays of shape ``(3,)``; configurations are
arrays of shape ``(N, 3)``.  All angles are in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Raised when a geometric primitive receives degenerate input."""


def unit(v) -> np.ndarray:
    """Return ``v`` scaled to unit length."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise GeometryError("cannot normalize the zero vector")
    return v / norm


def from_spherical(theta: float, phi: float) -> np.ndarray:
    """Unit vector for polar angle ``theta`` and azimuth ``phi``."""
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


@dataclass(frozen=True)
class FaceAngleVector:
    """Interior angles of one face, listed in face-vertex order."""

    face_id: int
    angles: tuple[float, ...]

    def __post_init__(self):
        if len(self.angles) < 3:
            raise GeometryError("a face needs at least three angles")
        for a in self.angles:
            if not 0.0 < a <= math.pi + 1e-12:
                raise GeometryError(f"face angle {a} outside (0, pi]")

    def __len__(self):
        return len(self.angles)


def angular_dist(a, b) -> float:
    dot = float(np.dot(a, b))
    return math.acos(min(1.0, max(-1.0, dot)))


def pairwise_dist(points) -> np.ndarray:
    """Matrix of angular distances, with the diagonal left at zero."""
    p = np.asarray(points, dtype=float)
    return np.arccos(np.clip(p @ p.T, -1.0, 1.0))


def psi(points) -> float:
    """Minimum pairwise angular distance of a point set."""
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or len(p) < 2:
        raise GeometryError("psi needs at least two points")
    g = p @ p.T
    np.fill_diagonal(g, -np.inf)
    return math.acos(min(1.0, max(-1.0, float(g.max()))))


def equilateral_triangle_angle(d: float) -> float:
    """Vertex angle of the equilateral spherical triangle with side ``d``.

    Valid for ``0 < d < 2*pi/3``; the result always exceeds ``pi/3`` and
    reaches ``pi`` as ``d`` approaches ``2*pi/3``.
    """
    if not 0.0 < d < TWO_PI / 3.0:
        raise GeometryError(f"triangle side {d} outside (0, 2pi/3)")
    c = math.cos(d)
    return math.acos(min(1.0, max(-1.0, c / (1.0 + c))))


def regular_polygon_angle(m: int, d: float) -> float:
    """Interior angle of the regular spherical ``m``-gon with side ``d``.

    Returns ``pi`` once ``d >= 2*pi/m`` (the polygon degenerates to a
    great circle).
    """
    s = math.cos(math.pi / m) / math.cos(d / 2.0)
    if s >= 1.0:
        return math.pi
    return 2.0 * math.asin(s)


def regular_polygon_area(m: int, d: float) -> float:
    """Area of the regular spherical ``m``-gon with side ``d``.

    Among convex equilateral ``m``-gons with side ``d`` this is the largest.
    """
    return m * regular_polygon_angle(m, d) - (m - 2) * math.pi


def _edge_step(d: float) -> np.ndarray:
    # frame columns: position, heading, left normal
    c, s = math.cos(d), math.sin(d)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _turn(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def polygon_transport(d: float, angles: Sequence[float]) -> np.ndarray:
    """Composite frame transform of walking an equilateral polygon.

    Each step travels a geodesic of length ``d`` and then turns left by
    the exterior angle ``pi - u`` at the vertex reached.  The polygon
    closes iff the result is the identity.
    """
    m = np.eye(3)
    step = _edge_step(d)
    k = len(angles)
    for i in range(k):
        m = m @ step @ _turn(math.pi - angles[(i + 1) % k])
    return m


def polygon_closure_residual(d: float, angles) -> float:
    if isinstance(angles, FaceAngleVector):
        angles = angles.angles
    if len(angles) < 3:
        raise GeometryError("a face needs at least three angles")
    return float(np.linalg.norm(polygon_transport(d, angles) - np.eye(3)))


def walk_polygon(start, toward, d: float, angles: Sequence[float]) -> np.ndarray:
    """Vertices of the equilateral polygon with first edge from ``start``
    in the direction of ``toward`` and interior angles ``angles`` (the
    angle of vertex ``i`` is ``angles[i]``).  The polygon is traversed
    counterclockwise as seen from outside the sphere.
    """
    p = unit(start)
    t = np.asarray(toward, dtype=float) - np.dot(toward, p) * p
    t = unit(t)
    frame = np.column_stack([p, t, np.cross(p, t)])
    step = _edge_step(d)
    k = len(angles)
    out = [p]
    for i in range(1, k):
        frame = frame @ step
        out.append(frame[:, 0].copy())
        frame = frame @ _turn(math.pi - angles[i])
    return np.array(out)


def reflect_across_arc(x, y, z) -> np.ndarray:
    """Mirror image of ``x`` in the great circle through ``y`` and ``z``."""
    n = np.cross(y, z)
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise GeometryError("reflection arc endpoints are equal or antipodal")
    n = n / norm
    x = np.asarray(x, dtype=float)
    return unit(x - 2.0 * np.dot(x, n) * n)


def _on_open_arc(q, a, b, normal, tol) -> bool:
    return (np.dot(np.cross(a, q), normal) > tol
            and np.dot(np.cross(q, b), normal) > tol)


def arcs_intersect(a1, a2, b1, b2, tol: float = 1e-12) -> bool:
    """Whether the open minor arcs ``a1a2`` and ``b1b2`` share a point."""
    n1 = np.cross(a1, a2)
    n2 = np.cross(b1, b2)
    l1, l2 = np.linalg.norm(n1), np.linalg.norm(n2)
    if l1 < 1e-12 or l2 < 1e-12:
        raise GeometryError("arc endpoints are equal or antipodal")
    n1, n2 = n1 / l1, n2 / l2
    line = np.cross(n1, n2)
    if np.linalg.norm(line) < 1e-12:
        # same great circle: overlap iff an endpoint lies inside the other arc
        return any(_on_open_arc(q, a1, a2, n1, tol) for q in (b1, b2)) or any(
            _on_open_arc(q, b1, b2, n1, tol) for q in (a1, a2)
        ) or (np.allclose(a1, b1) and np.allclose(a2, b2)) or (
            np.allclose(a1, b2) and np.allclose(a2, b1))
    line = unit(line)
    for q in (line, -line):
        if _on_open_arc(q, a1, a2, n1, tol) and _on_open_arc(q, b1, b2, n2, tol):
            return True
    return False


def orient(a, b, c) -> float:
    """Signed volume ``det[a, b, c]``; positive for a left turn at ``b``."""
    return float(np.dot(a, np.cross(b, c)))


def corner_angle(prev, v, nxt) -> float:
    """Interior angle at ``v`` of a counterclockwise polygon.

    Measured from the direction towards ``nxt`` counterclockwise to the
    direction towards ``prev`` in the tangent plane at ``v``; lies in
    ``[0, 2pi)`` and is below ``pi`` exactly at convex corners.
    """
    v = np.asarray(v, dtype=float)
    tp = np.asarray(prev, dtype=float) - np.dot(prev, v) * v
    tn = np.asarray(nxt, dtype=float) - np.dot(nxt, v) * v
    ang = math.atan2(float(np.dot(np.cross(tn, tp), v)), float(np.dot(tn, tp)))
    return ang % TWO_PI


@dataclass
class SphericalConfig:
    """A finite point set on the sphere with its contact structure.

    ``edges`` are the pairs at distance ``psi`` within ``tol``.
    """

    points: np.ndarray
    psi: float
    edges: list[tuple[int, int]]

    @classmethod
    def from_points(cls, points, tol: float = 1e-8) -> "SphericalConfig":
        p = np.array(points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3:
            raise GeometryError("points must be an (N, 3) array")
        p = p / np.linalg.norm(p, axis=1)[:, None]
        dist = pairwise_dist(p)
        n = len(p)
        m = psi(p)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if dist[i, j] <= m + tol]
        return cls(p, m, edges)

    def __len__(self):
        return len(self.points)

    def degrees(self) -> list[int]:
        deg = [0] * len(self.points)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def neighbours(self, v: int) -> list[int]:
        return [j if i == v else i for i, j in self.edges if v in (i, j)]
