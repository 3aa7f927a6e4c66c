"""Linear relaxation of the face-angle system used to discard candidates.

Unknowns are the interior angles at every face corner.  For an edge
length in ``[d_lo, d_hi]`` a realizable candidate must satisfy:

* angles around each vertex sum to ``2pi``;
* every angle lies in ``[alpha(d_lo), pi]`` where ``alpha`` is the
  equilateral-triangle angle (two neighbours of a vertex are at least
  ``d`` apart);
* triangle angles are equal and lie in ``[alpha(d_lo), alpha(d_hi)]``;
* opposite angles of a quadrilateral (a spherical rhombus) are equal;
* a face's angle excess is positive and at most the area of the regular
  polygon of the same size with side ``d_hi``.

Infeasibility of this LP certifies that no embedding exists for any edge
length in the interval.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from .graph_gen import PlanarCandidate
from .sphere_geom import equilateral_triangle_angle, regular_polygon_area

# largest side for which three pairwise separated points exist
D_CEILING = 2.0 * math.pi / 3.0


class _AngleSystem:
    """Sparse structure of the angle LP for one candidate."""

    def __init__(self, g: PlanarCandidate):
        self.g = g
        faces = g.faces
        corners = []
        for fi, f in enumerate(faces):
            for j, v in enumerate(f):
                corners.append((fi, j, v))
        self.corners = corners
        self.nvar = len(corners)
        index = {(fi, j): k for k, (fi, j, _) in enumerate(corners)}
        self.index = index

        rows, cols, vals, rhs = [], [], [], []
        r = 0
        by_vertex: dict[int, list[int]] = {}
        for k, (_, _, v) in enumerate(corners):
            by_vertex.setdefault(v, []).append(k)
        for v in sorted(by_vertex):
            for k in by_vertex[v]:
                rows.append(r)
                cols.append(k)
                vals.append(1.0)
            rhs.append(2.0 * math.pi)
            r += 1
        for fi, f in enumerate(faces):
            m = len(f)
            pairs = []
            if m == 3:
                pairs = [(0, 1), (1, 2)]
            elif m == 4:
                pairs = [(0, 2), (1, 3)]
            for a, b in pairs:
                rows += [r, r]
                cols += [index[(fi, a)], index[(fi, b)]]
                vals += [1.0, -1.0]
                rhs.append(0.0)
                r += 1
        self.a_eq = coo_matrix((vals, (rows, cols)), shape=(r, self.nvar)).tocsr()
        self.b_eq = np.array(rhs)

        rows, cols, vals = [], [], []
        for fi, f in enumerate(faces):
            for j in range(len(f)):
                rows.append(fi)
                cols.append(index[(fi, j)])
                vals.append(1.0)
        self.face_sum = coo_matrix(
            (vals, (rows, cols)), shape=(len(faces), self.nvar)
        ).tocsr()
        self.sizes = np.array([len(f) for f in faces], dtype=float)

    def feasible(self, d_lo: float, d_hi: float) -> bool:
        if d_lo >= D_CEILING:
            return False
        d_hi = min(d_hi, D_CEILING - 1e-12)
        a_lo = equilateral_triangle_angle(max(d_lo, 1e-9))
        a_hi = equilateral_triangle_angle(d_hi)
        lower = np.full(self.nvar, a_lo)
        upper = np.full(self.nvar, math.pi)
        for k, (fi, _, _) in enumerate(self.corners):
            if self.sizes[fi] == 3:
                upper[k] = a_hi
        base = (self.sizes - 2.0) * math.pi
        cap = base + np.array([regular_polygon_area(int(m), d_hi) for m in self.sizes])
        # excess > 0 and excess <= regular area
        a_ub = np.vstack([self.face_sum.toarray(), -self.face_sum.toarray()])
        b_ub = np.concatenate([cap, -base])
        res = linprog(
            np.zeros(self.nvar),
            A_ub=a_ub,
            b_ub=b_ub,
            A_eq=self.a_eq,
            b_eq=self.b_eq,
            bounds=np.column_stack([lower, upper]),
            method="highs",
        )
        return res.status != 2

    def witness(self, d_lo: float, d_hi: float):
        """An angle assignment satisfying the relaxation, or ``None``."""
        a_lo = equilateral_triangle_angle(max(d_lo, 1e-9))
        a_hi = equilateral_triangle_angle(min(d_hi, D_CEILING - 1e-12))
        lower = np.full(self.nvar, a_lo)
        upper = np.full(self.nvar, math.pi)
        for k, (fi, _, _) in enumerate(self.corners):
            if self.sizes[fi] == 3:
                upper[k] = a_hi
        base = (self.sizes - 2.0) * math.pi
        cap = base + np.array([regular_polygon_area(int(m), d_hi) for m in self.sizes])
        dense = self.face_sum.toarray()
        # push angles away from the bounds by maximizing a common margin
        nv = self.nvar
        c = np.zeros(nv + 1)
        c[-1] = -1.0
        a_ub = np.vstack([
            np.hstack([dense, np.zeros((len(cap), 1))]),
            np.hstack([-dense, np.ones((len(cap), 1))]),
            np.hstack([-np.eye(nv), np.ones((nv, 1))]),
            np.hstack([np.eye(nv), np.ones((nv, 1))]),
        ])
        b_ub = np.concatenate([cap, -base, -lower, upper])
        a_eq = np.hstack([self.a_eq.toarray(), np.zeros((self.a_eq.shape[0], 1))])
        bounds = [(None, None)] * nv + [(0.0, 0.5)]
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=self.b_eq,
                      bounds=bounds, method="highs")
        if res.status != 0:
            return None
        return res.x[:nv]


def lp_prune(g: PlanarCandidate, d_interval: tuple[float, float]) -> bool:
    """``False`` certifies that ``g`` has no embedding with ``d`` in the
    interval; ``True`` is inconclusive."""
    d_lo, d_hi = d_interval
    if not 0.0 < d_lo <= d_hi < math.pi:
        raise ValueError("interval must lie inside (0, pi)")
    return _AngleSystem(g).feasible(d_lo, d_hi)


def feasible_intervals(
    g: PlanarCandidate,
    d_lo: float,
    d_hi: float,
    resolution: float = 0.01,
) -> list[tuple[float, float]]:
    """Sub-intervals of ``[d_lo, d_hi]`` that survive the relaxation.

    Bisects from the whole interval down to ``resolution`` and merges
    adjacent survivors.
    """
    system = _AngleSystem(g)
    out = []
    stack = [(d_lo, d_hi)]
    while stack:
        lo, hi = stack.pop()
        if not system.feasible(lo, hi):
            continue
        if hi - lo <= resolution:
            out.append((lo, hi))
            continue
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort()
    merged: list[tuple[float, float]] = []
    for lo, hi in out:
        if merged and abs(merged[-1][1] - lo) < 1e-15:
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged
