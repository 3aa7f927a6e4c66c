import json

import numpy as np
import pytest

from irrcontact.embedder import SolverBudget, solve_embedding, verify_config
from irrcontact.pipeline import (
    GraphRecord,
    RunManifest,
    enumerate_records,
    load_records,
    save_records,
    solve_candidate,
)
from irrcontact.sphere_geom import SphericalConfig


def all_records(records_by_n):
    return [r for recs in records_by_n.values() for r in recs]


def test_record_json_round_trip(records_by_n):
    for r in all_records(records_by_n):
        back = GraphRecord.from_json(r.to_json())
        assert back.to_json() == r.to_json()
        for a, b in ((r.d_min, back.d_min), (r.d_max, back.d_max)):
            assert abs(a - b) <= 1e-12
        assert np.allclose(back.coords_at_dmax, r.coords_at_dmax, atol=1e-12, rtol=0)


def test_record_file_round_trip(records_by_n, tmp_path):
    recs = records_by_n[7]
    save_records(recs, tmp_path / "r.jsonl")
    assert [r.to_json() for r in load_records(tmp_path / "r.jsonl")] == [r.to_json() for r in recs]


def test_manifest_key():
    assert RunManifest(6).key() == RunManifest(6).key()
    assert RunManifest(6).key() != RunManifest(6, starts=8).key()
    assert RunManifest(6, starts=8).budget().starts == 8


def test_determinism_and_cache(tmp_path, octahedron):
    a = enumerate_records(RunManifest(6))
    b = enumerate_records(RunManifest(6))
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    cached = enumerate_records(RunManifest(6), cache_dir=tmp_path)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert len(files) == 2 and files[0].endswith(".jsonl")
    meta = json.loads((tmp_path / files[1]).read_text())
    assert meta["n"] == 6 and "timestamp" in meta
    again = enumerate_records(RunManifest(6), cache_dir=tmp_path)
    assert [r.to_json() for r in again] == [r.to_json() for r in cached] == [r.to_json() for r in a]


def test_infeasible_candidate_dropped():
    from irrcontact.graph_gen import PlanarCandidate

    k4 = PlanarCandidate(4, ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)))
    # four points cannot reach beyond the tetrahedron distance
    assert solve_candidate(k4, RunManifest(4, d_lower=1.95)) is None


def test_records_sorted_and_unique(records_by_n):
    for recs in records_by_n.values():
        keys = [r.canonical_key for r in recs]
        assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_soundness(records_by_n):
    # stored coordinates realize exactly the recorded contact graph
    for r in all_records(records_by_n):
        assert r.status == "feasible"
        assert r.d_min <= r.d_max
        for pts in (r.coords_at_dmax, r.coords_at_dmin):
            assert verify_config(SphericalConfig.from_points(np.asarray(pts)), r.candidate)


def test_all_triangle_quad_faces_irreducible(records_by_n):
    hits = 0
    for r in all_records(records_by_n):
        if not r.isolated and max(r.face_sizes) <= 4:
            assert r.flags["irr"]
            hits += 1
    assert hits


def test_dense_graphs_irreducible(records_by_n):
    hits = 0
    for r in all_records(records_by_n):
        if r.n > 6 and r.edge_count >= 3 * r.n - 8:
            assert r.flags["irr"]
            hits += 1
    assert hits


def test_flag_chain(records_by_n):
    for r in all_records(records_by_n):
        f = r.rigidity
        assert not f.d_irreducible or f.irreducible
        assert not f.maximal or f.irreducible
        if r.n > 5:
            assert not f.maximal or f.d_irreducible


@pytest.mark.slow
def test_range_midpoints_realizable(records_by_n):
    budget = SolverBudget(starts=16)
    for n in (6, 7, 8):
        for r in records_by_n[n]:
            if r.d_max - r.d_min < 1e-4:
                continue
            mid = 0.5 * (r.d_min + r.d_max)
            sol = solve_embedding(r.candidate, d_fixed=mid, budget=budget)
            assert not isinstance(sol, str), (r.face_sizes, mid)
