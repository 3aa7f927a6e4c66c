"""Shift and reflection tests on sphere configurations.

A vertex can be shifted if some nearby position is strictly farther from
all other points.  A configuration is irreducible when no vertex can be
shifted.  A D-reflection mirrors a vertex ``x`` in the great circle through
two of its contacts ``y, z``; it is admissible when the image is strictly
farther than ``psi`` from every point other than ``x, y, z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .sphere_geom import GeometryError, SphericalConfig, TWO_PI, reflect_across_arc

CONTACT_TOL = 1e-8
STRICT_TOL = 1e-9
# half-plane ties closer than this go to the second-order probe
TIE_TOL = 1e-7
PROBE_STEP = 1e-6


@dataclass
class RigidityFlags:
    irreducible: bool
    d_irreducible: bool = False
    maximal: bool = False
    shift_witness: tuple[int, tuple[float, float, float]] | None = None
    reflection_witness: tuple[int, int, int] | None = None

    def __post_init__(self):
        if self.d_irreducible and not self.irreducible:
            raise ValueError("D-irreducible flags require irreducible")

    def to_dict(self) -> dict:
        out = {"irr": self.irreducible, "dirr": self.d_irreducible, "max": self.maximal}
        if self.shift_witness is not None:
            v, u = self.shift_witness
            out["shift"] = [v, [float(a) for a in u]]
        if self.reflection_witness is not None:
            out["reflect"] = list(self.reflection_witness)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RigidityFlags":
        shift = data.get("shift")
        return cls(
            irreducible=bool(data["irr"]),
            d_irreducible=bool(data["dirr"]),
            maximal=bool(data["max"]),
            shift_witness=(int(shift[0]), tuple(shift[1])) if shift else None,
            reflection_witness=tuple(data["reflect"]) if data.get("reflect") else None,
        )


def _tangent_basis(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([1.0, 0.0, 0.0]) if abs(p[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - np.dot(a, p) * p
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(p, e1)


def _step(p, u, s):
    return p * math.cos(s) + u * math.sin(s)


def _strictly_better(y, others, cos_bound) -> bool:
    # compare cosines: farther means smaller dot product
    return bool(np.max(others @ y) < cos_bound - 1e-16)


def _open_half_plane(angles: np.ndarray) -> tuple[float, float]:
    """Largest angular gap between the directions and its bisector angle."""
    a = np.sort(np.mod(angles, TWO_PI))
    gaps = np.diff(np.append(a, a[0] + TWO_PI))
    k = int(np.argmax(gaps))
    return float(gaps[k]), float(a[k] + 0.5 * gaps[k])


def vertex_shiftable(
    cfg: SphericalConfig, v: int, tol: float = CONTACT_TOL
) -> tuple[bool, np.ndarray | None]:
    """Whether vertex ``v`` can be moved so that it gets strictly farther
    from every other point; returns the verdict and a tangent direction.

    The nearest points (within ``tol`` of the vertex's own nearest
    distance) are the active set.  First order: the vertex can move iff
    the tangent directions towards the active set lie in an open
    half-plane.  Directions spanning exactly a half-plane are settled by
    probing perpendicular to the boundary at a small step.
    """
    x = cfg.points
    n = len(x)
    if not 0 <= v < n:
        raise IndexError(f"vertex {v} out of range")
    if n < 2:
        return False, None
    p = x[v]
    others = np.delete(x, v, axis=0)
    dots = others @ p
    near = float(dots.max())
    active = others[dots >= math.cos(math.acos(min(1.0, near)) + tol)]
    e1, e2 = _tangent_basis(p)
    t = active - np.outer(active @ p, p)
    ang = np.arctan2(t @ e2, t @ e1)
    if len(active) == 1:
        gap, mid = TWO_PI, float(ang[0]) + math.pi
    else:
        gap, mid = _open_half_plane(ang)
    u = math.cos(mid) * e1 + math.sin(mid) * e2
    if gap > math.pi + TIE_TOL:
        return True, u
    if gap < math.pi - TIE_TOL:
        return False, None
    # tie: probe around the bisector, which is perpendicular to the axis
    for da in np.linspace(-1e-3, 1e-3, 5):
        w = math.cos(mid + da) * e1 + math.sin(mid + da) * e2
        if _strictly_better(_step(p, w, PROBE_STEP), others, near):
            return True, w
    return False, None


def is_irreducible(cfg: SphericalConfig) -> RigidityFlags:
    """Irreducibility flag, with the first shiftable vertex as witness.

    Only ``irreducible`` and ``shift_witness`` are filled in.
    """
    for v in range(len(cfg.points)):
        ok, u = vertex_shiftable(cfg, v)
        if ok:
            return RigidityFlags(False, shift_witness=(v, tuple(float(a) for a in u)))
    return RigidityFlags(True)


def d_reflection_exists(cfg: SphericalConfig) -> tuple[int, int, int] | None:
    """First admissible D-reflection ``(x, y, z)`` in lexicographic order.

    Pairs of contacts that are antipodal to each other do not define a
    mirror circle and are skipped.
    """
    x = cfg.points
    n = len(x)
    nbrs = [[] for _ in range(n)]
    for i, j in cfg.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    for a in range(n):
        for b, c in combinations(sorted(nbrs[a]), 2):
            try:
                image = reflect_across_arc(x[a], x[b], x[c])
            except GeometryError:
                continue
            rest = [k for k in range(n) if k not in (a, b, c)]
            if not rest:
                continue
            d = np.arccos(np.clip(x[rest] @ image, -1.0, 1.0))
            if float(d.min()) > cfg.psi + STRICT_TOL:
                return (a, b, c)
    return None


def rigidity_flags(cfg: SphericalConfig) -> RigidityFlags:
    """Irreducibility and D-irreducibility of one configuration."""
    flags = is_irreducible(cfg)
    if not flags.irreducible:
        return flags
    flags.reflection_witness = d_reflection_exists(cfg)
    flags.d_irreducible = flags.reflection_witness is None
    return flags


def realized_at(g, d: float) -> bool:
    """Whether candidate ``g`` has a strictly feasible realization with
    edge length exactly ``d``."""
    from .embedder import SLACK_MIN, SolverBudget, solve_embedding

    sol = solve_embedding(g, d_fixed=d, budget=SolverBudget(starts=16))
    return not isinstance(sol, str) and sol.slack >= SLACK_MIN


def classify(record, d_best: float | None = None, tol: float = 2e-3) -> RigidityFlags:
    """Flags of a record, evaluated at its realization near ``d_max``.

    ``d_best`` is the largest ``d_max`` over all records with the same
    number of points.  A record whose ``d_max`` is within ``tol`` of it is
    maximal only if the graph itself is realized at ``d_best``; graphs
    that merely reach ``d_best`` as a limit, where extra contacts appear
    or an angle flattens, are not.
    """
    if record.coords_at_dmax is None:
        raise ValueError("record has no coordinates to classify")
    cfg = SphericalConfig.from_points(np.asarray(record.coords_at_dmax))
    flags = rigidity_flags(cfg)
    if d_best is not None and record.d_max >= d_best - tol:
        flags.maximal = realized_at(record.candidate, d_best)
    return flags
