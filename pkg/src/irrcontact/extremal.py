"""Extremal quantities derived from complete enumerations.

Records are anything with ``n``, ``d_min``, ``d_max``, ``status`` and
``edge_count`` attributes (normally :class:`pipeline.GraphRecord`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from .sphere_geom import SphericalConfig

log = logging.getLogger(__name__)

MATCH_TOL = 2e-3
# edge length of the regular icosahedron
D_12 = math.acos(1.0 / math.sqrt(5.0))


def fejes_toth_bound(n: int) -> float:
    """Upper bound ``arccos((cot^2 w - 1)/2)``, ``w = pi n / (6n - 12)``,
    on the Tammes distance of ``n`` points; tight for n = 3, 4, 6, 12."""
    if n <= 2:
        raise ValueError("bound needs n > 2")
    w = math.pi * n / (6 * n - 12)
    # w lies in (pi/6, pi/2] for n >= 3
    cot = math.cos(w) / math.sin(w)
    return math.acos(min(1.0, max(-1.0, (cot * cot - 1.0) / 2.0)))


def contact_upper_bound(n: int) -> int:
    """``3n - 6``; attained only for n = 3, 4, 6, 12."""
    if n <= 2:
        raise ValueError("bound needs n > 2")
    return 3 * n - 6


def _feasible(records):
    out = [r for r in records if r.status == "feasible"]
    if len(out) != len(records):
        log.warning("%d undecided records ignored", len(records) - len(out))
    return out


def tammes_from_records(records, tol: float = MATCH_TOL):
    """``(d_n, maximal records)``: the largest ``d_max`` and the records
    reaching it within ``tol``.

    Records that carry rigidity flags must also be flagged maximal, which
    drops graphs that only approach ``d_n`` as a degenerate limit.
    """
    done = _feasible(records)
    if not done:
        raise ValueError("no records")
    d_n = max(r.d_max for r in done)
    top = [r for r in done if r.d_max >= d_n - tol]
    flagged = [r for r in top if (getattr(r, "flags", None) or {}).get("max", True)]
    return d_n, flagged


def count_irreducible(records) -> int:
    return len(_feasible(records))


def k_star(records) -> int:
    done = _feasible(records)
    if not done:
        raise ValueError("no records")
    return max(r.edge_count for r in done)


def kappa(records) -> int:
    done = _feasible(records)
    if not done:
        raise ValueError("no records")
    return min(r.edge_count for r in done)


def delta(records) -> float:
    """Smallest ``d_min`` over the records."""
    done = _feasible(records)
    if not done:
        raise ValueError("no records")
    return min(r.d_min for r in done)


# ---------------------------------------------------------------------------
# explicit configurations


def icosahedron() -> np.ndarray:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    pts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            pts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    p = np.array(pts)
    return p / np.linalg.norm(p, axis=1)[:, None]


def icosa_config(n: int) -> SphericalConfig:
    """Icosahedron with ``12 - n`` mutually adjacent vertices removed."""
    if n not in (9, 10, 11, 12):
        raise ValueError("n must be 9, 10, 11 or 12")
    p = icosahedron()
    if n == 12:
        return SphericalConfig.from_points(p)
    dots = p @ p.T
    adjacent = dots > 0.4
    np.fill_diagonal(adjacent, False)
    # a vertex, a neighbour, and a common neighbour of both
    drop = [0]
    if n <= 10:
        drop.append(int(np.flatnonzero(adjacent[0])[0]))
    if n == 9:
        drop.append(int(np.flatnonzero(adjacent[drop[0]] & adjacent[drop[1]])[0]))
    keep = [i for i in range(12) if i not in drop]
    return SphericalConfig.from_points(p[keep])


def k5_config() -> SphericalConfig:
    """North pole and a square on the equator."""
    p = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float)
    return SphericalConfig.from_points(p)


def antipodal_optimum(m: int) -> tuple[SphericalConfig, float]:
    """Optimal antipodal set of ``2m`` points and its distance ``a_m``."""
    if m == 2:
        p = np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float)
    elif m == 3:
        p = np.vstack([np.eye(3), -np.eye(3)])
    elif m == 4:
        p = np.array([(a, b, c) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)], dtype=float)
        p /= math.sqrt(3.0)
    elif m == 5:
        ico = icosahedron()
        # drop one antipodal pair
        far = int(np.argmin(ico @ ico[0]))
        p = ico[[i for i in range(12) if i not in (0, far)]]
    elif m == 6:
        p = icosahedron()
    else:
        raise ValueError("m must be in 2..6")
    cfg = SphericalConfig.from_points(p)
    return cfg, cfg.psi


def is_antipodal(points, tol: float = 1e-9) -> bool:
    p = np.asarray(points)
    return all(np.min(np.linalg.norm(p + q, axis=1)) < tol for q in p)


def danzer_question_scan(records_by_n: dict, ns=None, threshold: float = D_12):
    """Least ``n`` whose smallest ``d_min`` is below ``threshold``, with the
    witness record; ``(None, None)`` if none.  Every ``n`` in ``ns`` must
    be present."""
    ns = sorted(records_by_n) if ns is None else list(ns)
    missing = [n for n in ns if n not in records_by_n]
    if missing:
        raise ValueError(f"missing enumerations for n = {missing}")
    for n in ns:
        done = _feasible(records_by_n[n])
        if not done:
            continue
        best = min(done, key=lambda r: r.d_min)
        if best.d_min < threshold:
            return n, best
    return None, None


def construction_contacts(n: int) -> int:
    """Largest contact count among the explicit (possibly reducible)
    constructions, 0 if none is known here."""
    if n == 5:
        return len(k5_config().edges)
    if 9 <= n <= 12:
        return len(icosa_config(n).edges)
    return 0


@dataclass
class ExtremalReport:
    n: int
    count: int
    d_n: float
    delta_n: float
    k_star: int
    kappa: int
    ft_bound: float
    k_lower: int
    undecided: int = 0

    def __post_init__(self):
        if not self.kappa <= self.k_star <= contact_upper_bound(self.n):
            raise ValueError("edge counts violate kappa <= k_star <= 3n - 6")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_records(cls, n: int, records) -> "ExtremalReport":
        d_n, _ = tammes_from_records(records)
        ks = k_star(records)
        return cls(
            n=n,
            count=count_irreducible(records),
            d_n=d_n,
            delta_n=delta(records),
            k_star=ks,
            kappa=kappa(records),
            ft_bound=fejes_toth_bound(n),
            k_lower=max(ks, construction_contacts(n)),
            undecided=sum(r.status == "undecided" for r in records),
        )


def report_table(reports, fmt: str = "md") -> str:
    """Summary table, one row per ``n``."""
    cols = ["n", "count", "d_n", "delta_n", "k_star", "kappa", "k_lower", "ft_bound", "undecided"]
    rows = []
    for r in reports:
        d = r.to_dict()
        rows.append([f"{d[c]:.5f}" if isinstance(d[c], float) else str(d[c]) for c in cols])
    if fmt == "csv":
        return "\n".join(",".join(x) for x in [cols] + rows) + "\n"
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def bounds_table(ns, fmt: str = "csv") -> str:
    rows = [(n, fejes_toth_bound(n), contact_upper_bound(n)) for n in ns]
    if fmt == "md":
        out = ["| n | ft_bound | 3n-6 |", "|---|---|---|"]
        out += [f"| {n} | {b:.5f} | {k} |" for n, b, k in rows]
        return "\n".join(out) + "\n"
    return "n,ft_bound,contact_bound\n" + "".join(f"{n},{b:.5f},{k}\n" for n, b, k in rows)
