"""Enumeration driver: candidates -> pruning -> realization -> records.

Records are merged in canonical-key order, so output does not depend on
the number of workers.  Completed runs are cached as JSON lines under a
directory keyed by a hash of the run manifest.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .embedder import SolverBudget, d_range
from .extremal import MATCH_TOL, fejes_toth_bound
from .graph_gen import PlanarCandidate, combinatorial_filter, generate_candidates
from .lp_prune import feasible_intervals
from .rigidity import RigidityFlags, classify, rigidity_flags
from .sphere_geom import SphericalConfig

log = logging.getLogger(__name__)

CACHE_ENV = "IRRCONTACT_CACHE"
D_FLOOR = 0.05


@dataclass
class GraphRecord:
    n: int
    canonical_key: str
    adjacency: list[list[int]]
    faces: list[list[int]]
    isolated: list[list[int]]
    d_min: float | None
    d_max: float | None
    status: str
    flags: dict
    edge_count: int
    coords_at_dmax: list[list[float]] | None = None
    coords_at_dmin: list[list[float]] | None = None
    max_at_bound: str | None = None
    min_at_bound: str | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def candidate(self) -> PlanarCandidate:
        return PlanarCandidate(
            self.n,
            tuple(tuple(r) for r in self.adjacency),
            tuple((v, f) for v, f in self.isolated),
        )

    @property
    def face_sizes(self) -> list[int]:
        return sorted(len(f) for f in self.faces)

    @property
    def rigidity(self) -> RigidityFlags:
        return RigidityFlags.from_dict(self.flags)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "GraphRecord":
        return cls(**json.loads(line))


@dataclass(frozen=True)
class RunManifest:
    n: int
    max_face_size: int | None = None
    d_lower: float | None = None
    allow_isolated: bool = True
    starts: int = 64
    iters: int = 500
    tol: float = 1e-12
    code_version: str = __version__

    def key(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def budget(self) -> SolverBudget:
        return SolverBudget(starts=self.starts, iters=self.iters, tol=self.tol)


def _coords(sol):
    return None if sol is None else [[float(a) for a in p] for p in sol.points]


def solve_candidate(g: PlanarCandidate, manifest: RunManifest) -> GraphRecord | None:
    """Realize one candidate; ``None`` when it is not realizable."""
    d_lo = max(D_FLOOR, manifest.d_lower or 0.0)
    d_hi = fejes_toth_bound(g.n) + 1e-6
    if d_lo >= d_hi:
        return None
    intervals = feasible_intervals(g, d_lo, d_hi, 0.01)
    if not intervals:
        return None
    fr = d_range(g, manifest.budget(), intervals=intervals, d_floor=manifest.d_lower)
    base = dict(
        n=g.n,
        canonical_key=g.canonical_key().hex(),
        adjacency=[list(r) for r in g.rotation],
        faces=[list(f) for f in g.faces],
        isolated=[list(p) for p in g.isolated],
        edge_count=len(g.edges),
    )
    if fr.status == "infeasible":
        return None
    if fr.status == "undecided":
        return GraphRecord(d_min=None, d_max=None, status="undecided",
                           flags={"irr": False, "dirr": False, "max": False},
                           warnings=[fr.note], **base)
    rec = GraphRecord(
        d_min=round(fr.d_min, 12),
        d_max=round(fr.d_max, 12),
        status="feasible",
        flags={},
        coords_at_dmax=_coords(fr.near_max),
        coords_at_dmin=_coords(fr.near_min),
        max_at_bound=fr.max_at_bound,
        min_at_bound=fr.min_at_bound,
        **base,
    )
    return rec


def _finish(records: list[GraphRecord]) -> list[GraphRecord]:
    """Rigidity flags at both ends of every range, maximality across the run."""
    done = [r for r in records if r.status == "feasible"]
    d_best = max((r.d_max for r in done), default=None)
    for r in done:
        flags = classify(r, d_best, MATCH_TOL)
        r.flags = flags.to_dict()
        if r.coords_at_dmin is not None:
            low = rigidity_flags(SphericalConfig.from_points(np.asarray(r.coords_at_dmin)))
            if (low.irreducible, low.d_irreducible) != (flags.irreducible, flags.d_irreducible):
                r.warnings.append("rigidity flags differ between d_min and d_max")
    return records


def _solve_star(args):
    return solve_candidate(*args)


def enumerate_records(
    manifest: RunManifest,
    jobs: int = 1,
    cache_dir: str | os.PathLike | None = None,
    progress=None,
) -> list[GraphRecord]:
    """All records for ``manifest``: feasible ones plus any undecided."""
    cache = _cache_path(manifest, cache_dir)
    if cache is not None and cache.exists():
        return load_records(cache)
    cands = list(generate_candidates(
        manifest.n,
        max_face_size=manifest.max_face_size,
        allow_isolated=manifest.allow_isolated,
        max_degree=5,
    ))
    if manifest.d_lower is not None:
        cands = [g for g in cands if combinatorial_filter(g, manifest.d_lower)]
    t0 = time.time()
    work = [(g, manifest) for g in cands]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            out = list(pool.map(_solve_star, work, chunksize=1))
    else:
        out = []
        for k, item in enumerate(work):
            out.append(_solve_star(item))
            if progress:
                progress(k + 1, len(work))
    records = [r for r in out if r is not None]
    records.sort(key=lambda r: r.canonical_key)
    _finish(records)
    log.info("n=%d: %d candidates, %d records in %.1fs", manifest.n, len(cands), len(records), time.time() - t0)
    if cache is not None:
        cache.parent.mkdir(parents=True, exist_ok=True)
        save_records(records, cache)
        meta = dict(asdict(manifest), timestamp=time.strftime("%Y-%m-%dT%H:%M:%S"))
        cache.with_suffix(".manifest.json").write_text(json.dumps(meta, indent=1, sort_keys=True))
    return records


def _cache_path(manifest: RunManifest, cache_dir) -> Path | None:
    root = cache_dir or os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / f"n{manifest.n}-{manifest.key()}.jsonl"


def save_records(records: list[GraphRecord], path) -> None:
    Path(path).write_text("".join(r.to_json() + "\n" for r in records))


def load_records(path) -> list[GraphRecord]:
    text = Path(path).read_text()
    return [GraphRecord.from_json(line) for line in text.splitlines() if line.strip()]
