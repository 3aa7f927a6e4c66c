import itertools
import math

import networkx as nx
import numpy as np
import pytest

from irrcontact.graph_gen import (
    PlanarCandidate,
    StructureError,
    canonical_key,
    canonicalize,
    combinatorial_filter,
    from_json,
    from_text,
    generate_candidates,
    is_polyhedral,
    isolated_face_ok,
    read_planar_code,
    to_json,
    to_planar_code,
    to_text,
    trace_faces,
    triangulations,
)


def as_nx(g: PlanarCandidate) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def atlas_polyhedra(n):
    """3-connected planar graphs on n vertices from the graph atlas."""
    out = []
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() != n or not nx.is_connected(h):
            continue
        if nx.check_planarity(h)[0] and nx.node_connectivity(h) >= 3:
            out.append(h)
    return out


def cube():
    for g in generate_candidates(8):
        if len(g.edges) == 12 and set(g.face_sizes) == {4}:
            return g
    raise AssertionError("cube missing")


# -- counts -----------------------------------------------------------------


@pytest.mark.parametrize("n,count", [(6, 7), (7, 34), (8, 257)])
def test_candidate_counts(candidates_by_n, n, count):
    assert len(candidates_by_n[n]) == count


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_counts_match_atlas_oracle(candidates_by_n, n):
    assert len(candidates_by_n[n]) == len(atlas_polyhedra(n))


@pytest.mark.parametrize("n", [6, 7])
def test_classes_match_atlas_oracle(candidates_by_n, n):
    ours = [as_nx(g) for g in candidates_by_n[n]]
    theirs = atlas_polyhedra(n)
    for h in theirs:
        assert sum(nx.is_isomorphic(h, g) for g in ours) == 1


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_atlas_embeddings_match_keys(candidates_by_n, n):
    # every graph on n vertices is in the atlas; embed the 3-connected
    # planar ones with networkx and compare canonical keys exactly
    keys = set()
    for h in atlas_polyhedra(n):
        h = nx.convert_node_labels_to_integers(h)
        emb = nx.check_planarity(h)[1]
        rot = tuple(tuple(emb.neighbors_cw_order(v)) for v in range(n))
        keys.add(canonical_key(PlanarCandidate(n, rot)))
    assert keys == {canonical_key(g) for g in candidates_by_n[n]}


def _rotation_systems(h):
    nodes = sorted(h.nodes)
    per_vertex = []
    for v in nodes:
        nb = sorted(h[v])
        first, rest = nb[0], nb[1:]
        per_vertex.append([(first,) + p for p in itertools.permutations(rest)])
    for choice in itertools.product(*per_vertex):
        yield tuple(choice)


def _genus_zero(rot):
    e = sum(len(r) for r in rot) // 2
    try:
        f = len(trace_faces(rot))
    except ValueError:
        return False
    return len(rot) - e + f == 2


@pytest.mark.parametrize("n", [4, 5, 6])
def test_brute_force_rotation_systems(candidates_by_n, n):
    # every spherical embedding of every 3-connected planar graph, reduced
    # by canonical key, must give exactly the generated list; graphs with
    # too many rotation systems are left to the atlas oracle
    keys = set()
    expected = set()
    for h in atlas_polyhedra(n):
        h = nx.convert_node_labels_to_integers(h)
        if math.prod(math.factorial(d - 1) for _, d in h.degree) > 50000:
            continue
        expected |= {canonical_key(g) for g in candidates_by_n[n] if nx.is_isomorphic(as_nx(g), h)}
        for rot in _rotation_systems(h):
            if _genus_zero(rot):
                keys.add(canonical_key(PlanarCandidate(n, rot)))
    assert expected and keys == expected


def test_triangulation_counts():
    assert [len(triangulations(n)) for n in range(4, 10)] == [1, 1, 2, 5, 14, 50]


# -- invariants of the stream --------------------------------------------------


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_stream_invariants(candidates_by_n, n):
    cands = candidates_by_n[n]
    keys = [canonical_key(g) for g in cands]
    assert len(set(keys)) == len(keys)
    assert keys == sorted(keys)
    for g in cands:
        assert g.euler_ok()
        assert min(g.degree(v) for v in range(g.n)) >= 3
        assert is_polyhedral(g.rotation)
        assert nx.check_planarity(as_nx(g))[0]


def test_degree_cap_and_face_cap():
    capped = list(generate_candidates(8, max_degree=5))
    assert len(capped) == 151
    assert all(max(g.degree(v) for v in range(8)) <= 5 for g in capped)
    small = list(generate_candidates(8, max_face_size=4))
    assert small and all(max(g.face_sizes) <= 4 for g in small)


def test_isolated_candidates():
    cands = [g for g in generate_candidates(9, allow_isolated=True, max_degree=5) if g.isolated]
    assert cands
    for g in cands:
        (v, fi), = g.isolated
        assert g.degree(v) == 0
        assert len(g.faces[fi]) >= 5
        assert g.euler_ok()
    keys = [canonical_key(g) for g in cands]
    assert len(set(keys)) == len(keys)


def test_isolated_face_rule():
    assert isolated_face_ok(9, 5) and not isolated_face_ok(9, 4)
    assert isolated_face_ok(11, 6) and not isolated_face_ok(11, 5)


@pytest.mark.parametrize("n", [2, 13])
def test_generate_domain(n):
    with pytest.raises(ValueError):
        list(generate_candidates(n))


# -- canonical key --------------------------------------------------------------


def test_key_relabel_invariance(octahedron):
    rng = np.random.default_rng(0)
    base = canonical_key(octahedron)
    for _ in range(10):
        assert canonical_key(octahedron.relabel(rng.permutation(6))) == base


def test_key_distinguishes(octahedron):
    assert canonical_key(octahedron) != canonical_key(cube())


def test_key_mirror_invariance(candidates_by_n):
    chiral = 0
    for g in candidates_by_n[8]:
        m = g.mirror()
        assert canonical_key(m) == canonical_key(g)
        chiral += m.rotation != g.rotation
    assert chiral


def test_canonicalize_is_idempotent(candidates_by_n):
    rng = np.random.default_rng(3)
    for g in candidates_by_n[7][:10]:
        h = g.relabel(rng.permutation(7))
        assert canonicalize(h).rotation == canonicalize(g).rotation


def test_malformed_rotation():
    with pytest.raises(ValueError):
        PlanarCandidate(3, ((1,), (2,), (0,)))


# -- filter -----------------------------------------------------------------


def test_filter_examples(octahedron):
    assert combinatorial_filter(octahedron, math.pi / 2)
    hepta = [g for g in generate_candidates(8) if 7 in g.face_sizes]
    assert hepta and not any(combinatorial_filter(g, 1.0) for g in hepta)
    wheel = [g for g in generate_candidates(7) if max(g.degree(v) for v in range(7)) == 6]
    assert wheel and not any(combinatorial_filter(g, 0.5) for g in wheel)


def test_filter_domain(octahedron):
    with pytest.raises(ValueError):
        combinatorial_filter(octahedron, 0.0)


# -- formats ----------------------------------------------------------------


def test_text_round_trip(candidates_by_n):
    for g in candidates_by_n[7]:
        assert from_text(to_text(g)) == g
    iso = next(g for g in generate_candidates(9, allow_isolated=True, max_degree=5) if g.isolated)
    assert from_text(to_text(iso)) == iso


def test_text_rejects_bad_input(octahedron):
    with pytest.raises(StructureError):
        from_text("not a header")
    text = to_text(octahedron).replace("6 12 8", "6 13 8")
    with pytest.raises(StructureError):
        from_text(text)


def test_planar_code_round_trip(candidates_by_n):
    data = b">>planar_code<<" + b"".join(to_planar_code(g) for g in candidates_by_n[6])
    back = read_planar_code(data)
    assert [canonical_key(g) for g in back] == [canonical_key(g) for g in candidates_by_n[6]]


def test_planar_code_layout(octahedron):
    code = to_planar_code(octahedron)
    assert code[0] == 6
    assert code.count(0) == 6
    assert len(code) == 1 + 24 + 6


def test_json_round_trip(candidates_by_n):
    for g in candidates_by_n[6]:
        assert from_json(to_json(g)) == g


@pytest.mark.parametrize("data", [b"nonsense", b"\x03\x02\x00", b"\x02\x05\x00\x01\x00"])
def test_planar_code_rejects_bad_input(data):
    with pytest.raises(StructureError):
        read_planar_code(data)
