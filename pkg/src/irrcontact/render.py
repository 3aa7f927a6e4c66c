"""SVG drawings of configurations by stereographic projection."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .sphere_geom import SphericalConfig

CHORD_TOL = 1e-3
SIZE = 400.0


def _fibonacci(k: int) -> np.ndarray:
    i = np.arange(k) + 0.5
    z = 1.0 - 2.0 * i / k
    r = np.sqrt(1.0 - z * z)
    a = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(a), r * np.sin(a), z])


def projection_pole(points) -> np.ndarray:
    """Centre of projection: the point antipodal to the centroid.

    Balanced configurations have no centroid direction; then the sample
    point farthest from the configuration is used.
    """
    p = np.asarray(points, dtype=float)
    c = p.sum(axis=0)
    if np.linalg.norm(c) > 1e-6 * len(p):
        return -c / np.linalg.norm(c)
    grid = _fibonacci(2000)
    return grid[int(np.argmin((grid @ p.T).max(axis=1)))]


def _rotation_to_north(s: np.ndarray) -> np.ndarray:
    """Orthogonal matrix taking ``s`` to (0, 0, 1)."""
    a = np.array([1.0, 0.0, 0.0]) if abs(s[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - np.dot(a, s) * s
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(s, e1)
    return np.vstack([e1, e2, s])


def stereographic(points, pole) -> np.ndarray:
    y = np.atleast_2d(points) @ _rotation_to_north(pole).T
    return y[:, :2] / (1.0 - y[:, 2:3])


def _arc(a, b, pole, tol=CHORD_TOL, depth=0) -> list[np.ndarray]:
    """Projected polyline of the minor arc ``ab``, subdivided until each
    segment is within ``tol`` of the projected curve at its midpoint."""
    m = a + b
    m /= np.linalg.norm(m)
    pa, pb, pm = stereographic(np.array([a, b, m]), pole)
    if depth >= 20 or np.linalg.norm(pm - 0.5 * (pa + pb)) <= tol:
        return [pa, pb]
    left = _arc(a, m, pole, tol, depth + 1)
    right = _arc(m, b, pole, tol, depth + 1)
    return left + right[1:]


def render_svg(cfg: SphericalConfig, title: str = "") -> str:
    """Deterministic SVG: one ``circle`` per point, one ``polyline`` per
    contact."""
    x = cfg.points
    pole = projection_pole(x)
    arcs = [_arc(x[i], x[j], pole) for i, j in cfg.edges]
    dots = stereographic(x, pole)
    allpts = np.vstack([dots] + [np.array(a) for a in arcs]) if arcs else dots
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    scale = 0.9 * SIZE / max(float((hi - lo).max()), 1e-9)
    off = 0.5 * SIZE - scale * 0.5 * (lo + hi)

    def fmt(q):
        u = scale * q + off
        # flip y so the drawing is seen from outside
        return f"{u[0]:.3f},{SIZE - u[1]:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE:.0f}" height="{SIZE:.0f}" '
        f'viewBox="0 0 {SIZE:.0f} {SIZE:.0f}">'
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append('<g fill="none" stroke="black" stroke-width="1.5">')
    for (i, j), arc in zip(cfg.edges, arcs):
        pts = " ".join(fmt(q) for q in arc)
        out.append(f'<polyline data-edge="{i}-{j}" points="{pts}"/>')
    out.append("</g>")
    out.append('<g fill="black">')
    for k, q in enumerate(dots):
        cx, cy = fmt(q).split(",")
        out.append(f'<circle data-vertex="{k}" cx="{cx}" cy="{cy}" r="4"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
