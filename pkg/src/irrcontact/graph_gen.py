"""Candidate contact graphs: embedded planar graphs and their generation.

A candidate is stored as a rotation system: ``rotation[v]`` lists the
neighbours of ``v`` in counterclockwise order as seen from outside the
sphere.  Faces are traced so that each face lies to the left of its darts,
which makes every face counterclockwise.  Isolated vertices carry an empty
rotation and are attached to the face that contains them.

The candidate list for ``n`` vertices is built in two stages.  Sphere
triangulations are grown from the tetrahedron by the vertex insertions of
degree 3, 4 and 5; every 3-connected planar graph is then reached by
deleting edges one at a time while 3-connectivity holds (the reverse of
triangulating faces).  Duplicates are removed with a canonical code taken
over all starting darts and both orientations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

Rotation = tuple[tuple[int, ...], ...]

MAX_N = 12


class StructureError(ValueError):
    """Raised for malformed rotation systems or candidate files."""


# ---------------------------------------------------------------------------
# rotation-system helpers


def trace_faces(rot: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Faces of a rotation system, each as its counterclockwise vertex cycle."""
    pos = [{w: i for i, w in enumerate(r)} for r in rot]
    seen = set()
    faces = []
    for u in range(len(rot)):
        for v in rot[u]:
            if (u, v) in seen:
                continue
            face = []
            a, b = u, v
            while (a, b) not in seen:
                seen.add((a, b))
                face.append(a)
                r = rot[b]
                try:
                    c = r[pos[b][a] - 1]
                except KeyError:
                    raise StructureError(f"dart {a}->{b} has no reverse") from None
                a, b = b, c
            faces.append(tuple(face))
    return faces


def _edges(rot) -> list[tuple[int, int]]:
    return sorted((u, v) for u, r in enumerate(rot) for v in r if u < v)


def is_polyhedral(rot, faces=None) -> bool:
    """3-connectivity test for a plane graph without isolated vertices.

    A connected plane graph on at least four vertices whose faces are
    simple cycles is 3-connected exactly when every two faces meet in
    nothing, a single vertex, or a single common edge.
    """
    n = len(rot)
    if n < 4 or any(len(r) < 3 for r in rot):
        return False
    if faces is None:
        faces = trace_faces(rot)
    if n - len(_edges(rot)) + len(faces) != 2:
        return False
    sets = []
    face_edges = []
    for f in faces:
        s = set(f)
        if len(s) != len(f):
            return False
        sets.append(s)
        face_edges.append({frozenset((f[i], f[(i + 1) % len(f)])) for i in range(len(f))})
    for i in range(len(faces)):
        for j in range(i + 1, len(faces)):
            common = sets[i] & sets[j]
            if len(common) <= 1:
                continue
            if len(common) > 2:
                return False
            e = frozenset(common)
            if e not in face_edges[i] or e not in face_edges[j]:
                return False
    return True


def _code(rot, pos, start, first, orient):
    label = {start: 1}
    order = [start]
    parent = {start: first}
    code = []
    nxt = 2
    i = 0
    while i < len(order):
        v = order[i]
        r = rot[v]
        k = len(r)
        j0 = pos[v][parent[v]]
        for t in range(k):
            w = r[(j0 + orient * t) % k]
            lw = label.get(w)
            if lw is None:
                lw = label[w] = nxt
                nxt += 1
                order.append(w)
                parent[w] = v
            code.append(lw)
        code.append(0)
        i += 1
    return code, label


def _min_rotation(seq: list[int]) -> tuple[int, ...]:
    k = len(seq)
    return min(tuple(seq[i:] + seq[:i]) for i in range(k))


def canonical_form(rot, face_marks=None) -> tuple[tuple[int, ...], dict[int, int], int]:
    """Canonical code of a connected rotation system.

    ``face_marks`` maps a face (as returned by :func:`trace_faces`) to a
    positive mark that must be respected, e.g. a count of isolated
    vertices inside it.  Returns ``(code, labelling, orientation)`` for the
    lexicographically least code over all starting darts and both
    orientations; the labelling maps old vertices to ``0..n-1``.
    """
    core = [v for v in range(len(rot)) if rot[v]]
    pos = [{w: i for i, w in enumerate(r)} for r in rot]
    faces = trace_faces(rot)
    face_len = {}
    for f in faces:
        for i in range(len(f)):
            face_len[(f[i], f[(i + 1) % len(f)])] = len(f)

    def invariant(u, v, orient):
        left = face_len[(u, v)]
        right = face_len[(v, u)]
        if orient < 0:
            left, right = right, left
        return (len(rot[u]), len(rot[v]), left, right)

    starts = []
    best_inv = None
    for u in core:
        for v in rot[u]:
            for orient in (1, -1):
                inv = invariant(u, v, orient)
                if best_inv is None or inv > best_inv:
                    best_inv = inv
                    starts = [(u, v, orient)]
                elif inv == best_inv:
                    starts.append((u, v, orient))
    best = None
    for u, v, orient in starts:
        code, label = _code(rot, pos, u, v, orient)
        if len(label) != len(core):
            raise StructureError("core graph is not connected")
        if face_marks:
            extra = []
            for f, mark in face_marks.items():
                seq = [label[x] for x in f]
                if orient < 0:
                    seq.reverse()
                extra.append((_min_rotation(seq), mark))
            extra.sort()
            full = list(code) + [255]
            for seq, mark in extra:
                full.extend(seq)
                full.extend((254, mark))
            code = full
        code = tuple(code)
        if best is None or code < best[0]:
            best = (code, label, orient)
    return best


def _relabel(rot, label, orient, n_total):
    new = [()] * n_total
    for v, r in enumerate(rot):
        if not r:
            continue
        nr = [label[w] - 1 for w in r]
        if orient < 0:
            nr.reverse()
        new[label[v] - 1] = nr
    # rotate each list to start at its smallest neighbour for readability
    return tuple(tuple(_min_rotation(list(r))) if r else () for r in new)


# ---------------------------------------------------------------------------
# candidates


@dataclass(frozen=True)
class PlanarCandidate:
    """An embedded candidate graph with optional isolated vertices.

    ``isolated`` holds ``(vertex, face_index)`` pairs; face indices refer
    to :attr:`faces`.
    """

    n: int
    rotation: Rotation
    isolated: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if len(self.rotation) != self.n:
            raise StructureError("rotation length does not match n")
        for v, r in enumerate(self.rotation):
            if len(set(r)) != len(r) or v in r:
                raise StructureError(f"vertex {v} has a loop or repeated neighbour")
            for w in r:
                if not 0 <= w < self.n or v not in self.rotation[w]:
                    raise StructureError(f"edge {v}-{w} is not symmetric")
        iso = {v for v, _ in self.isolated}
        for v in range(self.n):
            if not self.rotation[v] and v not in iso:
                raise StructureError(f"vertex {v} has no edges and no face")
            if self.rotation[v] and v in iso:
                raise StructureError(f"vertex {v} is both isolated and connected")

    @cached_property
    def faces(self) -> list[tuple[int, ...]]:
        return trace_faces(self.rotation)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        return _edges(self.rotation)

    @property
    def core(self) -> list[int]:
        return [v for v in range(self.n) if self.rotation[v]]

    @property
    def isolated_vertices(self) -> list[int]:
        return [v for v, _ in self.isolated]

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    @property
    def face_sizes(self) -> list[int]:
        return [len(f) for f in self.faces]

    def euler_ok(self) -> bool:
        core = self.core
        return len(core) - len(self.edges) + len(self.faces) == 2

    def face_marks(self) -> dict[tuple[int, ...], int]:
        marks: dict[tuple[int, ...], int] = {}
        for _, fi in self.isolated:
            f = self.faces[fi]
            marks[f] = marks.get(f, 0) + 1
        return marks

    def mirror(self) -> "PlanarCandidate":
        rot = tuple(tuple(reversed(r)) for r in self.rotation)
        return self._with_rotation(rot, {v: v for v in range(self.n)}, mirrored=True)

    def relabel(self, perm: Sequence[int]) -> "PlanarCandidate":
        """Candidate with vertex ``v`` renamed to ``perm[v]``."""
        rot = [()] * self.n
        for v, r in enumerate(self.rotation):
            rot[perm[v]] = tuple(perm[w] for w in r)
        return self._with_rotation(tuple(rot), {v: perm[v] for v in range(self.n)})

    def _with_rotation(self, rot, vmap, mirrored=False):
        new_faces = trace_faces(rot)
        index = {}
        for i, f in enumerate(new_faces):
            index[frozenset(f)] = i
        iso = []
        for v, fi in self.isolated:
            f = frozenset(vmap[x] for x in self.faces[fi])
            iso.append((vmap[v], index[f]))
        return PlanarCandidate(self.n, rot, tuple(sorted(iso)))

    def canonical_key(self) -> bytes:
        return canonical_key(self)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rotation": [list(r) for r in self.rotation],
            "faces": [list(f) for f in self.faces],
            "isolated": [list(p) for p in self.isolated],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlanarCandidate":
        return cls(
            data["n"],
            tuple(tuple(r) for r in data["rotation"]),
            tuple(sorted(tuple(p) for p in data.get("isolated", ()))),
        )


def canonical_key(g: PlanarCandidate) -> bytes:
    """Key equal for candidates isomorphic up to relabelling and reflection."""
    if not g.core:
        raise StructureError("candidate has no edges")
    code, _, _ = canonical_form(g.rotation, g.face_marks())
    return bytes([g.n]) + bytes(code)


def canonicalize(g: PlanarCandidate) -> PlanarCandidate:
    """The representative of ``g``'s class with canonical vertex labels."""
    code, label, orient = canonical_form(g.rotation, g.face_marks())
    n_core = len(label)
    rot = _relabel(g.rotation, label, orient, g.n)
    new_faces = trace_faces(rot)
    index = {frozenset(f): i for i, f in enumerate(new_faces)}
    groups = sorted(
        index[frozenset(label[x] - 1 for x in g.faces[fi])] for _, fi in g.isolated
    )
    iso = tuple((n_core + k, fi) for k, fi in enumerate(groups))
    return PlanarCandidate(g.n, rot, iso)


# ---------------------------------------------------------------------------
# generation


def _insert_after(r: list[int], after: int, x: int) -> None:
    r.insert(r.index(after) + 1, x)


def _expansions(rot: Rotation) -> Iterator[Rotation]:
    """Triangulations one vertex larger: insertions of degree 3, 4, 5."""
    n = len(rot)
    x = n
    for f in trace_faces(rot):
        a, b, c = f
        new = [list(r) for r in rot] + [[a, b, c]]
        _insert_after(new[a], b, x)
        _insert_after(new[b], c, x)
        _insert_after(new[c], a, x)
        yield tuple(map(tuple, new))
    for a in range(n):
        for b in rot[a]:
            if b < a:
                continue
            rb, ra = rot[b], rot[a]
            c = rb[rb.index(a) - 1]
            d = ra[ra.index(b) - 1]
            new = [list(r) for r in rot] + [[a, d, b, c]]
            new[a][new[a].index(b)] = x
            new[b][new[b].index(a)] = x
            _insert_after(new[c], a, x)
            _insert_after(new[d], b, x)
            yield tuple(map(tuple, new))
    for p in range(n):
        r = rot[p]
        k = len(r)
        if k < 4:
            continue
        for i in range(k):
            q1, q2, q3, q4 = (r[(i + j) % k] for j in range(4))
            new = [list(rr) for rr in rot] + [[p, q1, q2, q3, q4]]
            rp = [w for w in r if w not in (q2, q3)]
            rp.insert(rp.index(q1) + 1, x)
            new[p] = rp
            new[q2][new[q2].index(p)] = x
            new[q3][new[q3].index(p)] = x
            _insert_after(new[q1], q2, x)
            _insert_after(new[q4], p, x)
            yield tuple(map(tuple, new))


TETRAHEDRON: Rotation = ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1))


def triangulations(n: int) -> list[Rotation]:
    """All simple sphere triangulations on ``n`` vertices, canonical labels."""
    if n < 4:
        raise ValueError("triangulations need at least four vertices")
    level = {canonical_form(TETRAHEDRON)[0]: TETRAHEDRON}
    for _ in range(4, n):
        nxt = {}
        for rot in level.values():
            for child in _expansions(rot):
                code, label, orient = canonical_form(child)
                if code not in nxt:
                    nxt[code] = _relabel(child, label, orient, len(child))
        level = nxt
    return [level[k] for k in sorted(level)]


def _remove_edge(rot: Rotation, u: int, v: int) -> Rotation:
    new = list(rot)
    new[u] = tuple(w for w in rot[u] if w != v)
    new[v] = tuple(w for w in rot[v] if w != u)
    return tuple(new)


def polyhedra(n: int) -> list[Rotation]:
    """All 3-connected planar graphs on ``n`` vertices, canonical labels.

    Each graph has a unique embedding up to reflection, so this is also
    the list of embedded classes.
    """
    level = {canonical_form(t)[0]: t for t in triangulations(n)}
    found = dict(level)
    while level:
        nxt = {}
        for rot in level.values():
            for u, v in _edges(rot):
                if len(rot[u]) == 3 or len(rot[v]) == 3:
                    continue
                child = _remove_edge(rot, u, v)
                if not is_polyhedral(child):
                    continue
                code, label, orient = canonical_form(child)
                if code not in nxt and code not in found:
                    nxt[code] = _relabel(child, label, orient, n)
        found.update(nxt)
        level = nxt
    return [found[k] for k in sorted(found)]


_POLY_CACHE: dict[int, list[Rotation]] = {}


def _polyhedra_cached(n: int) -> list[Rotation]:
    if n not in _POLY_CACHE:
        _POLY_CACHE[n] = polyhedra(n)
    return _POLY_CACHE[n]


def isolated_face_ok(n: int, face_size: int) -> bool:
    """Whether an isolated vertex may sit in a face of this size.

    For more than ten points isolated vertices need faces with six or more
    vertices.  Below that the test is geometric only: no point of a
    convex equilateral quadrilateral or triangle can be farther than its
    side from all corners at the edge lengths that occur, so faces of size
    five and up are allowed.
    """
    return face_size >= (6 if n > 10 else 5)


def _with_isolated(rot: Rotation, n: int, k: int) -> Iterator[PlanarCandidate]:
    faces = trace_faces(rot)
    n_core = len(rot)
    ok = [i for i, f in enumerate(faces) if isolated_face_ok(n, len(f))]

    def choose(start, left):
        if left == 0:
            yield ()
            return
        for j in range(start, len(ok)):
            for rest in choose(j + 1, left - 1):
                yield (ok[j],) + rest

    for combo in choose(0, k):
        full = rot + ((),) * k
        iso = tuple((n_core + i, fi) for i, fi in enumerate(combo))
        yield PlanarCandidate(n, full, iso)


def generate_candidates(
    n: int,
    max_face_size: int | None = None,
    allow_isolated: bool = False,
    max_degree: int | None = None,
    max_isolated: int = 1,
) -> Iterator[PlanarCandidate]:
    """Stream one candidate per isomorphism class, ordered by canonical key.

    Without filters this is the list of all 3-connected planar graphs on
    ``n`` vertices.  ``max_degree`` and ``max_face_size`` cut the list
    down; ``allow_isolated`` adds candidates whose core has ``n - k``
    vertices (``1 <= k <= max_isolated``) with the isolated vertices placed
    in distinct qualifying faces.
    """
    if not 3 <= n <= MAX_N:
        raise ValueError(f"n={n} outside the supported range 3..{MAX_N}")
    if max_face_size is not None and max_face_size < 3:
        raise ValueError("max_face_size must be at least 3")
    found = []
    pools = [(n, 0)]
    if allow_isolated:
        pools += [(n - k, k) for k in range(1, max_isolated + 1) if n - k >= 4]
    for core_n, k in pools:
        if core_n < 4:
            if core_n == 3 and k == 0:
                found.append(PlanarCandidate(3, ((1, 2), (2, 0), (0, 1))))
            continue
        for rot in _polyhedra_cached(core_n):
            if max_degree is not None and max(len(r) for r in rot) > max_degree:
                continue
            sizes = [len(f) for f in trace_faces(rot)]
            if max_face_size is not None and max(sizes) > max_face_size:
                continue
            if k == 0:
                found.append(PlanarCandidate(n, rot))
            else:
                seen = set()
                for cand in _with_isolated(rot, n, k):
                    key = canonical_key(cand)
                    if key not in seen:
                        seen.add(key)
                        found.append(canonicalize(cand))
    keyed = sorted(((canonical_key(g), g) for g in found), key=lambda t: t[0])
    for _, g in keyed:
        yield g


def combinatorial_filter(g: PlanarCandidate, d_lower: float) -> bool:
    """Necessary combinatorial conditions for an irreducible contact graph
    whose edge length is at least ``d_lower``."""
    if not 0.0 < d_lower < math.pi:
        raise ValueError("d_lower must lie in (0, pi)")
    limit = math.floor(2.0 * math.pi / d_lower)
    if any(len(f) > limit for f in g.faces):
        return False
    for v in g.core:
        if g.degree(v) not in (3, 4, 5):
            return False
    per_face: dict[int, int] = {}
    for _, fi in g.isolated:
        per_face[fi] = per_face.get(fi, 0) + 1
    for fi, count in per_face.items():
        size = len(g.faces[fi])
        if g.n > 10 and (size < 6 or (size == 6 and count > 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# import / export


def to_text(g: PlanarCandidate) -> str:
    """Compact text format: ``n m f`` header, one rotation line per vertex
    (``-`` for isolated ones), then ``iso <face_id>`` lines."""
    lines = [f"{g.n} {len(g.edges)} {len(g.faces)}"]
    for r in g.rotation:
        lines.append(" ".join(map(str, r)) if r else "-")
    for _, fi in g.isolated:
        lines.append(f"iso {fi}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> PlanarCandidate:
    rows = [ln.split("#")[0].strip() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    try:
        n, m, f = map(int, rows[0].split())
    except (IndexError, ValueError):
        raise StructureError("bad header line") from None
    rot = []
    for r in rows[1 : n + 1]:
        rot.append(() if r == "-" else tuple(int(t) for t in r.split()))
    if len(rot) != n:
        raise StructureError("fewer rotation lines than vertices")
    iso_faces = []
    for r in rows[n + 1 :]:
        parts = r.split()
        if len(parts) != 2 or parts[0] != "iso":
            raise StructureError(f"unexpected line {r!r}")
        iso_faces.append(int(parts[1]))
    empty = [v for v in range(n) if not rot[v]]
    if len(empty) != len(iso_faces):
        raise StructureError("isolated annotations do not match empty rotations")
    g = PlanarCandidate(n, tuple(rot), tuple(zip(empty, iso_faces)))
    if len(g.edges) != m or len(g.faces) != f:
        raise StructureError("header counts disagree with the rotation system")
    return g


def to_planar_code(g: PlanarCandidate) -> bytes:
    """Planar-code record: vertex count, then 1-based neighbour lists in
    clockwise order, each terminated by 0.  Isolated vertices are not
    representable and are rejected."""
    if g.isolated:
        raise StructureError("planar code cannot carry isolated vertices")
    out = bytearray([g.n])
    for r in g.rotation:
        # planar code lists neighbours clockwise
        out.extend(w + 1 for w in reversed(r))
        out.append(0)
    return bytes(out)


def read_planar_code(data: bytes) -> list[PlanarCandidate]:
    """Parse a stream of planar-code records (optional ``>>planar_code<<``
    header)."""
    header = b">>planar_code<<"
    if data.startswith(header):
        data = data[len(header):]
    out = []
    i = 0
    while i < len(data):
        n = data[i]
        i += 1
        rot = []
        for _ in range(n):
            r = []
            while i < len(data) and data[i] != 0:
                if data[i] > n:
                    raise StructureError(f"neighbour {data[i]} out of range for n = {n}")
                r.append(data[i] - 1)
                i += 1
            if i >= len(data):
                raise StructureError("truncated planar code")
            i += 1
            rot.append(tuple(reversed(r)))
        try:
            out.append(PlanarCandidate(n, tuple(rot)))
        except ValueError as exc:
            raise StructureError(f"invalid planar code: {exc}") from exc
    return out


def to_json(g: PlanarCandidate) -> str:
    return json.dumps(g.to_dict(), sort_keys=True)


def from_json(text: str) -> PlanarCandidate:
    return PlanarCandidate.from_dict(json.loads(text))
