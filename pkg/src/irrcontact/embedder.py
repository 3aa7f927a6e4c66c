"""Geometric realization of candidate graphs as irreducible contact graphs.

A candidate is realized by unit vectors ``x_i`` and an edge cosine
``c = cos d`` subject to

* ``x_i . x_j = c`` on edges,
* ``x_i . x_j <= c - t`` on all other pairs (strictly longer than ``d``),
* ``det(x_a, x_v, x_b) >= t`` at every face corner ``a -> v -> b``
  (faces are counterclockwise, so this keeps every interior angle below
  ``pi``),
* for an isolated vertex ``x`` in face ``f``: ``det(f_j, f_{j+1}, x) >= t``
  for every edge of ``f``.

With ``t > 0`` every face is convex and every vertex of degree three to
five is held by contacts in all directions, so the contact graph is the
candidate and it is irreducible.  Feasibility is searched by multistart:
least squares on a hinge-penalized residual, then SLSQP maximizing the
common slack ``t``.  The edge-length range is found by SLSQP minimizing
and maximizing ``d`` with ``t = 0`` from every strictly feasible point.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize

from .graph_gen import PlanarCandidate, canonical_key, trace_faces
from .lp_prune import _AngleSystem, feasible_intervals, lp_prune  # noqa: F401
from .sphere_geom import (
    FaceAngleVector,
    GeometryError,
    SphericalConfig,
    TWO_PI,
    arcs_intersect,
    corner_angle,
    equilateral_triangle_angle,
    pairwise_dist,
    polygon_closure_residual,
    walk_polygon,
)

log = logging.getLogger(__name__)

ACCEPT_TOL = 1e-9
SLACK_MIN = 1e-6


class InconsistentEmbedding(RuntimeError):
    """Coordinates disagree with the candidate they were built for."""


@dataclass
class SolverBudget:
    starts: int = 64
    iters: int = 500
    tol: float = 1e-12
    accept: float = ACCEPT_TOL
    seeds_for_range: int = 6
    seed: int = 0


@dataclass
class EmbeddingSolution:
    d: float
    face_angles: list[FaceAngleVector]
    coords: SphericalConfig
    residual: float
    slack: float = 0.0

    @property
    def points(self) -> np.ndarray:
        return self.coords.points


@dataclass
class FeasibleRange:
    status: str  # feasible | infeasible | undecided
    d_min: float = math.nan
    d_max: float = math.nan
    witness_min: EmbeddingSolution | None = None
    witness_max: EmbeddingSolution | None = None
    interior: EmbeddingSolution | None = None
    max_at_bound: str | None = None
    min_at_bound: str | None = None
    near_max: EmbeddingSolution | None = None
    near_min: EmbeddingSolution | None = None
    note: str = ""


# ---------------------------------------------------------------------------
# constraint system


class _System:
    """Index arrays and residual/Jacobian evaluation for one candidate."""

    def __init__(self, g: PlanarCandidate):
        self.g = g
        n = g.n
        self.n = n
        edges = g.edges
        eset = set(edges)
        self.edges = np.array(edges, dtype=int).reshape(-1, 2)
        self.nonedges = np.array(
            [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in eset],
            dtype=int,
        ).reshape(-1, 2)
        corners = []
        for f in g.faces:
            m = len(f)
            for j in range(m):
                corners.append((f[j - 1], f[j], f[(j + 1) % m]))
        for x, fi in g.isolated:
            f = g.faces[fi]
            m = len(f)
            for j in range(m):
                corners.append((f[j], f[(j + 1) % m], x))
        self.ncorner = sum(len(f) for f in g.faces)
        self.dets = np.array(corners, dtype=int).reshape(-1, 3)

    # values -----------------------------------------------------------
    def edge_dots(self, x):
        e = self.edges
        return np.einsum("ij,ij->i", x[e[:, 0]], x[e[:, 1]])

    def nonedge_dots(self, x):
        e = self.nonedges
        return np.einsum("ij,ij->i", x[e[:, 0]], x[e[:, 1]])

    def det_values(self, x):
        t = self.dets
        return np.einsum("ij,ij->i", x[t[:, 0]], np.cross(x[t[:, 1]], x[t[:, 2]]))

    # jacobian blocks w.r.t. flattened x ---------------------------------
    def _dot_jac(self, x, pairs):
        j = np.zeros((len(pairs), 3 * self.n))
        rows = np.arange(len(pairs))
        for k in range(3):
            j[rows, 3 * pairs[:, 0] + k] = x[pairs[:, 1], k]
            j[rows, 3 * pairs[:, 1] + k] = x[pairs[:, 0], k]
        return j

    def _det_jac(self, x):
        t = self.dets
        a, b, c = x[t[:, 0]], x[t[:, 1]], x[t[:, 2]]
        j = np.zeros((len(t), 3 * self.n))
        rows = np.arange(len(t))
        ga, gb, gc = np.cross(b, c), np.cross(c, a), np.cross(a, b)
        for k in range(3):
            j[rows, 3 * t[:, 0] + k] += ga[:, k]
            j[rows, 3 * t[:, 1] + k] += gb[:, k]
            j[rows, 3 * t[:, 2] + k] += gc[:, k]
        return j

    def _unit_jac(self, x):
        j = np.zeros((self.n, 3 * self.n))
        for k in range(3):
            j[np.arange(self.n), 3 * np.arange(self.n) + k] = 2.0 * x[:, k]
        return j

    # least-squares phase ----------------------------------------------
    def penalty(self, z, margin_dot, margin_det):
        x = z[:-1].reshape(self.n, 3)
        c = z[-1]
        unit_r = np.sum(x * x, axis=1) - 1.0
        edge_r = self.edge_dots(x) - c
        ne = self.nonedge_dots(x) - c + margin_dot
        de = margin_det - self.det_values(x)
        return np.concatenate([unit_r, edge_r, np.maximum(ne, 0.0), np.maximum(de, 0.0)])

    def penalty_jac(self, z, margin_dot, margin_det):
        x = z[:-1].reshape(self.n, 3)
        c = z[-1]
        ju = np.hstack([self._unit_jac(x), np.zeros((self.n, 1))])
        je = np.hstack([self._dot_jac(x, self.edges), -np.ones((len(self.edges), 1))])
        jn = np.hstack([self._dot_jac(x, self.nonedges), -np.ones((len(self.nonedges), 1))])
        active = (self.nonedge_dots(x) - c + margin_dot) > 0.0
        jn[~active] = 0.0
        jd = np.hstack([-self._det_jac(x), np.zeros((len(self.dets), 1))])
        active = (margin_det - self.det_values(x)) > 0.0
        jd[~active] = 0.0
        return np.vstack([ju, je, jn, jd])

    # SLSQP phase: variables (x, c, t) ----------------------------------
    # points enter through u = x / |x|, so no unit-norm equalities are
    # needed and the equality count stays below the variable count
    def _normalized(self, z):
        x = z[:-2].reshape(self.n, 3)
        r = np.linalg.norm(x, axis=1)
        return x / r[:, None], r

    def _chain(self, j, u, r):
        # d/dx of f(x / |x|) from d/du: project out u and divide by |x|
        out = j.copy()
        for i in range(self.n):
            proj = (np.eye(3) - np.outer(u[i], u[i])) / r[i]
            out[:, 3 * i:3 * i + 3] = j[:, 3 * i:3 * i + 3] @ proj
        return out

    def eq(self, z):
        u, _ = self._normalized(z)
        x = z[:-2].reshape(self.n, 3)
        c = z[-2]
        return np.concatenate([
            self.edge_dots(u) - c,
            [x[0, 0], x[0, 1], x[self.gauge, 1]],
        ])

    def eq_jac(self, z):
        u, r = self._normalized(z)
        je = np.hstack([
            self._chain(self._dot_jac(u, self.edges), u, r),
            -np.ones((len(self.edges), 1)),
            np.zeros((len(self.edges), 1)),
        ])
        jg = np.zeros((3, 3 * self.n + 2))
        jg[0, 0] = 1.0
        jg[1, 1] = 1.0
        jg[2, 3 * self.gauge + 1] = 1.0
        return np.vstack([je, jg])

    def ineq(self, z):
        u, _ = self._normalized(z)
        c, t = z[-2], z[-1]
        return np.concatenate([c - self.nonedge_dots(u) - t, self.det_values(u) - t])

    def ineq_jac(self, z):
        u, r = self._normalized(z)
        nn, nd = len(self.nonedges), len(self.dets)
        jn = np.hstack([
            -self._chain(self._dot_jac(u, self.nonedges), u, r), np.ones((nn, 1)), -np.ones((nn, 1)),
        ])
        jd = np.hstack([self._chain(self._det_jac(u), u, r), np.zeros((nd, 1)), -np.ones((nd, 1))])
        return np.vstack([jn, jd])

    @property
    def gauge(self) -> int:
        # a neighbour of vertex 0 is kept in the xz-plane
        return self.g.rotation[0][0] if self.g.rotation[0] else 1

    def slacks(self, x, c):
        """Smallest non-edge slack and corner determinant."""
        ne = c - self.nonedge_dots(x)
        dv = self.det_values(x)
        return (float(ne.min()) if len(ne) else 1.0, float(dv.min()))

    def violation(self, x, c):
        """Largest violation of the closed constraint set."""
        parts = [np.abs(np.sum(x * x, axis=1) - 1.0), np.abs(self.edge_dots(x) - c)]
        if len(self.nonedges):
            parts.append(np.maximum(self.nonedge_dots(x) - c, 0.0))
        parts.append(np.maximum(-self.det_values(x), 0.0))
        return float(max(p.max() for p in parts))


# ---------------------------------------------------------------------------
# starting configurations


def _gauge_fix(x: np.ndarray, g: PlanarCandidate) -> np.ndarray:
    """Rotate so vertex 0 is the north pole and a neighbour lies in xz."""
    x = x / np.linalg.norm(x, axis=1)[:, None]
    z = x[0]
    k = g.rotation[0][0] if g.rotation[0] else 1
    y = x[k] - np.dot(x[k], z) * z
    if np.linalg.norm(y) < 1e-9:
        y = np.cross(z, [1.0, 0.0, 0.0]) if abs(z[0]) < 0.9 else np.cross(z, [0.0, 1.0, 0.0])
    e1 = y / np.linalg.norm(y)
    e2 = np.cross(z, e1)
    rot = np.vstack([e1, e2, z])
    return x @ rot.T


def spectral_start(g: PlanarCandidate) -> np.ndarray:
    """Laplacian-eigenvector embedding projected to the sphere."""
    n = g.n
    a = np.zeros((n, n))
    for i, j in g.edges:
        a[i, j] = a[j, i] = 1.0
    for x, fi in g.isolated:
        for v in g.faces[fi]:
            a[x, v] = a[v, x] = 1.0
    lap = np.diag(a.sum(1)) - a
    _, vec = np.linalg.eigh(lap)
    x = vec[:, 1:4].copy()
    x -= x.mean(0)
    norms = np.linalg.norm(x, axis=1)
    norms[norms < 1e-9] = 1.0
    return x / norms[:, None]


def angle_start(g: PlanarCandidate, d: float, angles: np.ndarray) -> np.ndarray | None:
    """Place vertices by walking faces with the given corner angles."""
    system = _AngleSystem(g)
    per_face: list[list[float]] = [[0.0] * len(f) for f in g.faces]
    for k, (fi, j, _) in enumerate(system.corners):
        per_face[fi][j] = float(angles[k])
    try:
        return _walk_faces(g, d, per_face)
    except GeometryError:
        return None


def _walk_faces(g: PlanarCandidate, d: float, per_face) -> np.ndarray:
    n = g.n
    x = np.full((n, 3), np.nan)
    placed = np.zeros(n, dtype=bool)
    faces = g.faces
    f0 = faces[0]
    x[f0[0]] = (0.0, 0.0, 1.0)
    x[f0[1]] = (math.sin(d), 0.0, math.cos(d))
    placed[f0[0]] = placed[f0[1]] = True
    done = [False] * len(faces)
    progress = True
    while progress:
        progress = False
        for fi, f in enumerate(faces):
            if done[fi]:
                continue
            m = len(f)
            for j in range(m):
                a, b = f[j], f[(j + 1) % m]
                if placed[a] and placed[b]:
                    ang = [per_face[fi][(j + k) % m] for k in range(m)]
                    pts = walk_polygon(x[a], x[b], d, ang)
                    for k in range(m):
                        v = f[(j + k) % m]
                        if not placed[v]:
                            x[v] = pts[k]
                            placed[v] = True
                    done[fi] = True
                    progress = True
                    break
    for v, fi in g.isolated:
        c = x[list(faces[fi])].sum(0)
        x[v] = c / np.linalg.norm(c)
        placed[v] = True
    if not placed.all():
        raise GeometryError("face walk did not reach every vertex")
    return x


def _orient_start(system: _System, x: np.ndarray) -> np.ndarray:
    """Mirror the start if most corners turn the wrong way."""
    if np.sum(system.det_values(x) > 0) < system.ncorner / 2:
        x = x * np.array([1.0, 1.0, -1.0])
    return x


# ---------------------------------------------------------------------------
# solving


def _phase_ls(system: _System, x0, c0, c_bounds, iters, margin=1e-4):
    z0 = np.concatenate([x0.ravel(), [c0]])
    lo_c, hi_c = c_bounds
    kw = dict(args=(margin, margin), method="trf", max_nfev=iters,
              xtol=1e-14, ftol=1e-14, gtol=1e-14)
    if hi_c - lo_c < 1e-12:
        # pinned edge length: solve for the points only
        c = 0.5 * (lo_c + hi_c)

        def fun(y, *a):
            return system.penalty(np.append(y, c), *a)

        def jac(y, *a):
            return system.penalty_jac(np.append(y, c), *a)[:, :-1]

        res = least_squares(fun, z0[:-1], jac=jac, **kw)
        zx = np.append(res.x, c)
    else:
        lo = np.full(z0.shape, -np.inf)
        hi = np.full(z0.shape, np.inf)
        lo[-1], hi[-1] = lo_c, hi_c
        z0[-1] = min(max(z0[-1], lo_c + 1e-12), hi_c - 1e-12)
        res = least_squares(system.penalty, z0, jac=system.penalty_jac,
                            bounds=(lo, hi), **kw)
        zx = res.x
    x = zx[:-1].reshape(system.n, 3)
    return x / np.linalg.norm(x, axis=1)[:, None], float(zx[-1]), float(np.max(np.abs(res.fun)))


def _slsqp(system: _System, x, c, objective, c_bounds, t_fixed=None, iters=500):
    """SLSQP over (x, c, t).  ``objective``: 'slack', 'min_d' or 'max_d'."""
    n3 = 3 * system.n
    z0 = np.concatenate([_gauge_fix(x, system.g).ravel(), [c, 0.0]])
    sl = system.slacks(z0[:-2].reshape(system.n, 3), c)
    z0[-1] = min(sl)
    bounds = [(None, None)] * n3 + [tuple(c_bounds), (None, 1.0)]
    if t_fixed is not None:
        z0[-1] = t_fixed
        bounds[-1] = (t_fixed, t_fixed)

    if objective == "slack":
        def fun(z):
            return -z[-1]

        def jac(z):
            g = np.zeros_like(z)
            g[-1] = -1.0
            return g
    else:
        sign = -1.0 if objective == "min_d" else 1.0

        # minimizing d is maximizing c
        def fun(z):
            return sign * z[-2]

        def jac(z):
            g = np.zeros_like(z)
            g[-2] = sign
            return g

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = minimize(
            fun, z0, jac=jac, method="SLSQP", bounds=bounds,
            constraints=[
                {"type": "eq", "fun": system.eq, "jac": system.eq_jac},
                {"type": "ineq", "fun": system.ineq, "jac": system.ineq_jac},
            ],
            options={"maxiter": iters, "ftol": 1e-15},
        )
    log.debug("slsqp %s: %s", objective, res.message)
    z = res.x
    x = z[:-2].reshape(system.n, 3)
    x = x / np.linalg.norm(x, axis=1)[:, None]
    return x, float(z[-2])


def _polish(system: _System, x, c, iters=20):
    """Minimum-norm Gauss-Newton cleanup of the equality constraints with
    ``c`` fixed."""
    y = x.ravel().copy()
    for _ in range(iters):
        p = y.reshape(system.n, 3)
        r = np.concatenate([np.sum(p * p, axis=1) - 1.0, system.edge_dots(p) - c])
        if np.max(np.abs(r)) < 1e-15:
            break
        jac = np.vstack([system._unit_jac(p), system._dot_jac(p, system.edges)])
        step = np.linalg.lstsq(jac, r, rcond=None)[0]
        y = y - step
    y = y.reshape(system.n, 3)
    return y / np.linalg.norm(y, axis=1)[:, None]


def face_angles_of(g: PlanarCandidate, x: np.ndarray) -> list[list[float]]:
    out = []
    for f in g.faces:
        m = len(f)
        out.append([corner_angle(x[f[j - 1]], x[f[j]], x[f[(j + 1) % m]]) for j in range(m)])
    return out


def make_solution(g: PlanarCandidate, x: np.ndarray, system: _System | None = None) -> EmbeddingSolution:
    """Package coordinates as an :class:`EmbeddingSolution`.

    ``residual`` is the largest of: closure residual of every face from
    ``d`` and its angles, deviation of vertex angle sums from ``2pi``,
    constraint violation of the coordinates.
    """
    system = system or _System(g)
    dots = system.edge_dots(x)
    c = float(dots.mean())
    d = math.acos(min(1.0, max(-1.0, c)))
    angles = face_angles_of(g, x)
    res = system.violation(x, c)
    vertex_sum = np.zeros(g.n)
    for f, a in zip(g.faces, angles):
        for v, u in zip(f, a):
            vertex_sum[v] += u
        res = max(res, polygon_closure_residual(d, a))
    for v in g.core:
        res = max(res, abs(vertex_sum[v] - TWO_PI))
    fav = []
    for fi, a in enumerate(angles):
        fav.append(FaceAngleVector(fi, tuple(min(u, math.pi) for u in a)))
    slack = min(system.slacks(x, c))
    cfg = SphericalConfig.from_points(x)
    return EmbeddingSolution(d, fav, cfg, res, slack)


def _starts(g, system, budget, rng, intervals):
    """Yield starting configurations and edge cosines."""
    lp = _AngleSystem(g)
    yielded = 0
    mids = [0.5 * (lo + hi) for lo, hi in intervals] or [1.0]
    k = 0
    while yielded < budget.starts:
        kind = k % 3
        k += 1
        d = float(rng.uniform(*intervals[rng.integers(len(intervals))])) if intervals else 1.0
        if kind == 0:
            iv = intervals[rng.integers(len(intervals))] if intervals else (d, d)
            ang = lp.witness(*iv)
            x = None
            if ang is not None:
                x = angle_start(g, mids[0] if not intervals else 0.5 * sum(iv), ang)
                if x is not None and yielded > 0:
                    x = x + rng.normal(scale=0.05, size=x.shape)
            if x is None or not np.all(np.isfinite(x)):
                continue
        elif kind == 1:
            x = spectral_start(g) + rng.normal(scale=0.15 if yielded else 0.0, size=(g.n, 3))
        else:
            x = rng.normal(size=(g.n, 3))
        x = x / np.linalg.norm(x, axis=1)[:, None]
        x = _orient_start(system, x)
        yielded += 1
        yield x, math.cos(d)


def find_interior_points(g: PlanarCandidate, budget: SolverBudget, c_bounds, intervals):
    """Strictly feasible configurations (slack ``>= SLACK_MIN``) found by
    multistart, plus the best slack seen.

    Each hit is ``(x, c, t, x_raw, c_raw)``: the slack-maximizing point
    and the first feasible point the least-squares phase reached.  The raw
    point is generic, which matters when the slack maximizer sits at a
    symmetric configuration where ``d`` is stationary.
    """
    system = _System(g)
    rng = np.random.default_rng(budget.seed)
    found = []
    best = -math.inf
    for x0, c0 in _starts(g, system, budget, rng, intervals):
        x_raw, c_raw, r = _phase_ls(system, x0, c0, c_bounds, budget.iters)
        if r > 1e-3:
            continue
        x, c = _slsqp(system, x_raw, c_raw, "slack", c_bounds, iters=budget.iters)
        if system.violation(x, c) > 1e-7:
            continue
        t = min(system.slacks(x, c))
        if not _angles_wrap_once(g, x):
            continue
        best = max(best, t)
        if t >= SLACK_MIN:
            found.append((x, c, t, x_raw, c_raw))
            if len(found) >= budget.seeds_for_range:
                break
    return found, best


def _angles_wrap_once(g: PlanarCandidate, x: np.ndarray) -> bool:
    total = np.zeros(g.n)
    for f, a in zip(g.faces, face_angles_of(g, x)):
        for v, u in zip(f, a):
            total[v] += u
    return all(abs(total[v] - TWO_PI) < 1e-6 for v in g.core)


def _c_bounds(intervals) -> tuple[float, float]:
    if not intervals:
        return (-0.5, 1.0)
    lo = min(a for a, _ in intervals)
    hi = max(b for _, b in intervals)
    return (math.cos(hi), math.cos(lo))


def solve_embedding(
    g: PlanarCandidate,
    d_fixed: float | None = None,
    budget: SolverBudget | None = None,
    intervals=None,
) -> EmbeddingSolution | str:
    """Find one realization of ``g`` as an irreducible contact graph.

    Returns an :class:`EmbeddingSolution` (strictly feasible, so the
    contact graph is exactly ``g``), or the verdict ``"infeasible"`` /
    ``"undecided"``.  With ``d_fixed`` the edge length is pinned.
    """
    budget = budget or SolverBudget()
    if d_fixed is not None:
        if g.faces and min(g.face_sizes) == 3 and d_fixed >= 2.0 * math.pi / 3.0:
            return "infeasible"
        intervals = [(d_fixed, d_fixed)]
        if not lp_prune(g, (d_fixed, d_fixed)):
            return "infeasible"
    elif intervals is None:
        intervals = feasible_intervals(g, 0.05, 2.0 * math.pi / 3.0 - 1e-9, 0.01)
    if not intervals:
        return "infeasible"
    c_bounds = _c_bounds(intervals)
    found, best = find_interior_points(g, budget, c_bounds, intervals)
    if not found:
        return "undecided" if best > 1e-9 else "infeasible"
    x, c = max(found, key=lambda t: t[2])[:2]
    system = _System(g)
    x = _polish(system, x, c)
    return make_solution(g, x, system)


def d_range(
    g: PlanarCandidate,
    budget: SolverBudget | None = None,
    intervals=None,
    d_floor: float | None = None,
) -> FeasibleRange:
    """Extreme edge lengths over all realizations of ``g``.

    ``d_floor`` restricts the search to ``d >= d_floor``.
    """
    budget = budget or SolverBudget()
    if intervals is None:
        intervals = feasible_intervals(g, 0.05, 2.0 * math.pi / 3.0 - 1e-9, 0.01)
    if not intervals:
        return FeasibleRange("infeasible", note="linear relaxation infeasible")
    # the relaxation is conservative; widen slightly so the optimizer is
    # never clipped by the interval grid
    lo = max(1e-6, intervals[0][0] - 0.02, d_floor or 0.0)
    c_bounds = _c_bounds([(lo, min(2.0, intervals[-1][1] + 0.02))])
    found, best = find_interior_points(g, budget, c_bounds, intervals)
    if not found:
        status = "undecided" if best > 1e-9 else "infeasible"
        return FeasibleRange(status, note=f"best slack {best:.3g}")
    system = _System(g)
    interior_x, interior_c = max(found, key=lambda t: t[2])[:2]
    rng = np.random.default_rng(budget.seed + 1)
    lo_best = hi_best = None
    for x, c, _, x_raw, c_raw in found:
        seeds = [(x, c), (x_raw, c_raw)]
        for _ in range(2):
            noisy = x + rng.normal(scale=0.02, size=x.shape)
            seeds.append((noisy / np.linalg.norm(noisy, axis=1)[:, None], c))
        for x0, c0 in seeds:
            for objective in ("min_d", "max_d"):
                y, cy = _slsqp(system, x0, c0, objective, c_bounds, t_fixed=0.0,
                               iters=budget.iters)
                y = _polish(system, y, cy)
                if system.violation(y, cy) > 1e-7 or not _angles_wrap_once(g, y):
                    continue
                dy = math.acos(min(1.0, cy))
                if objective == "min_d" and (lo_best is None or dy < lo_best[0]):
                    lo_best = (dy, y)
                if objective == "max_d" and (hi_best is None or dy > hi_best[0]):
                    hi_best = (dy, y)
    interior = make_solution(g, _polish(system, interior_x, interior_c), system)
    d0 = interior.d
    if lo_best is None or lo_best[0] > d0:
        lo_best = (d0, interior.points)
    if hi_best is None or hi_best[0] < d0:
        hi_best = (d0, interior.points)
    wmin = make_solution(g, lo_best[1], system)
    wmax = make_solution(g, hi_best[1], system)
    span = wmax.d - wmin.d
    near_max = settle_isolated(g, interior_near(g, system, wmax, -1.0, span) or interior)
    near_min = settle_isolated(g, interior_near(g, system, wmin, 1.0, span) or interior)
    return FeasibleRange(
        "feasible",
        d_min=wmin.d,
        d_max=wmax.d,
        witness_min=wmin,
        witness_max=wmax,
        interior=interior,
        max_at_bound=_active_bound(system, wmax),
        min_at_bound=_active_bound(system, wmin),
        near_max=near_max,
        near_min=near_min,
    )


def interior_near(g, system, endpoint: EmbeddingSolution, direction: float, span: float):
    """Strictly feasible realization a little inside a range endpoint.

    At an endpoint itself an angle is flat or an extra contact forms, so
    the endpoint witness does not realize ``g`` as an irreducible graph.
    Steps of growing size are tried from the endpoint into the range.
    """
    if span < 1e-7:
        return None
    for step in (1e-4, 1e-3, 1e-2):
        step = min(step, 0.25 * span)
        c = math.cos(endpoint.d + direction * step)
        x, c = _slsqp(system, endpoint.points, c, "slack", (c - 1e-13, c + 1e-13))
        x = _polish(system, x, c)
        if system.violation(x, c) > 1e-9 or not _angles_wrap_once(g, x):
            continue
        if min(system.slacks(x, c)) > 1e-9:
            sol = make_solution(g, x, system)
            if verify_config(sol.coords, g):
                return sol
    return None


def _active_bound(system: _System, sol: EmbeddingSolution, tol=1e-6) -> str | None:
    """Which closed constraint is tight at a range endpoint."""
    x = sol.points
    c = math.cos(sol.d)
    ne, dv = system.slacks(x, c)
    kinds = []
    if ne < tol:
        kinds.append("contact")
    if dv < tol:
        kinds.append("flat_angle")
    return "+".join(kinds) or None


# ---------------------------------------------------------------------------
# coordinates from angles, verification


def realize_coordinates(g: PlanarCandidate, sol: EmbeddingSolution) -> SphericalConfig:
    """Rebuild coordinates from ``d`` and the face angles.

    A root edge is laid along the meridian ``phi = 0`` from the north
    pole, faces are walked breadth-first, the result is polished, and
    isolated vertices are moved to the point of their face farthest from
    all other points.
    """
    if sol.residual > 1e-8:
        raise InconsistentEmbedding("solution residual too large to realize")
    per_face = [list(fa.angles) for fa in sol.face_angles]
    x = _walk_faces(g, sol.d, per_face)
    system = _System(g)
    x = _polish(system, x, math.cos(sol.d))
    for v, fi in g.isolated:
        x[v] = best_interior_point(x, g.faces[fi], exclude=v)
    cfg = SphericalConfig.from_points(x)
    if not verify_config(cfg, g):
        raise InconsistentEmbedding("rebuilt coordinates do not realize the candidate")
    return cfg


def settle_isolated(g: PlanarCandidate, sol: EmbeddingSolution) -> EmbeddingSolution:
    """Move isolated vertices to the point of their face farthest from all
    other points, which is where an irreducible configuration holds them."""
    if not g.isolated:
        return sol
    x = sol.points.copy()
    for v, fi in g.isolated:
        x[v] = best_interior_point(x, g.faces[fi], exclude=v)
    out = make_solution(g, x)
    if not verify_config(out.coords, g):
        raise InconsistentEmbedding("isolated vertex does not fit its face")
    return out


def best_interior_point(x: np.ndarray, face, exclude: int) -> np.ndarray:
    """Point inside a convex face maximizing the distance to all points."""
    others = np.array([p for k, p in enumerate(x) if k != exclude])
    f = list(face)
    m = len(f)
    start = x[f].sum(0)
    start /= np.linalg.norm(start)

    def cons(z):
        y = z[:3]
        return np.concatenate([
            z[3] - others @ y,
            [np.dot(x[f[j]], np.cross(x[f[(j + 1) % m]], y)) for j in range(m)],
        ])

    res = minimize(
        lambda z: z[3], np.concatenate([start, [float((others @ start).max())]]),
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": cons},
                     {"type": "eq", "fun": lambda z: np.dot(z[:3], z[:3]) - 1.0}],
        options={"maxiter": 500, "ftol": 1e-15},
    )
    y = res.x[:3]
    return y / np.linalg.norm(y)


def contact_rotation(cfg: SphericalConfig, tol: float = 1e-8) -> tuple[tuple[int, ...], ...]:
    """Rotation system of the contact graph read off the coordinates."""
    x = cfg.points
    n = len(x)
    nbrs = [[] for _ in range(n)]
    for i, j in cfg.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    rot = []
    for v in range(n):
        p = x[v]
        ref = None
        keyed = []
        for w in nbrs[v]:
            t = x[w] - np.dot(x[w], p) * p
            if ref is None:
                ref = t / np.linalg.norm(t)
                other = np.cross(p, ref)
            keyed.append((math.atan2(np.dot(t, other), np.dot(t, ref)) % TWO_PI, w))
        keyed.sort()
        rot.append(tuple(w for _, w in keyed))
    return tuple(rot)


def contact_candidate(cfg: SphericalConfig, tol: float = 1e-8) -> PlanarCandidate | None:
    """The embedded contact graph of ``cfg``, isolated vertices attached to
    the face containing them; ``None`` if it is not a proper plane map."""
    x = cfg.points
    rot = contact_rotation(cfg, tol)
    core = [v for v in range(len(x)) if rot[v]]
    if not core:
        return None
    faces = _faces_or_none(rot)
    if faces is None:
        return None
    iso = []
    for v in range(len(x)):
        if rot[v]:
            continue
        inside = [
            fi for fi, f in enumerate(faces)
            if all(np.dot(x[f[j]], np.cross(x[f[(j + 1) % len(f)]], x[v])) > 0 for j in range(len(f)))
        ]
        if len(inside) != 1:
            return None
        iso.append((v, inside[0]))
    try:
        return PlanarCandidate(len(x), rot, tuple(iso))
    except ValueError:
        return None


def _faces_or_none(rot):
    try:
        return trace_faces(rot)
    except ValueError:
        return None


def verify_config(cfg: SphericalConfig, g: PlanarCandidate, tol: float = 1e-8) -> bool:
    """Does ``cfg`` realize ``g`` with convex faces and no crossing arcs?

    The contact graph of ``cfg`` (pairs within ``tol`` of ``psi``) must be
    isomorphic to ``g`` as an embedded graph, including the faces holding
    isolated vertices.
    """
    x = cfg.points
    if len(x) != g.n:
        return False
    cfg = SphericalConfig.from_points(x, tol)
    if len(cfg.edges) != len(g.edges):
        return False
    e = cfg.edges
    for a in range(len(e)):
        for b in range(a + 1, len(e)):
            p, q = e[a], e[b]
            if set(p) & set(q):
                continue
            if arcs_intersect(x[p[0]], x[p[1]], x[q[0]], x[q[1]]):
                return False
    h = contact_candidate(cfg, tol)
    if h is None or not h.euler_ok():
        return False
    for f, angs in zip(h.faces, face_angles_of(h, x)):
        if any(a > math.pi + tol for a in angs):
            return False
    return canonical_key(h) == canonical_key(g)


def equilateral_angle_floor(d: float) -> float:
    return equilateral_triangle_angle(d)
