import math

import pytest

from irrcontact.embedder import SolverBudget, contact_candidate, solve_embedding
from irrcontact.extremal import D_12, icosa_config
from irrcontact.graph_gen import PlanarCandidate, generate_candidates
from irrcontact.lp_prune import _AngleSystem, feasible_intervals, lp_prune


@pytest.fixture(scope="module")
def ico11():
    return contact_candidate(icosa_config(11))


def test_three_triangles_at_a_vertex_pruned():
    # K4: three triangles meet at every vertex, so 3 alpha(d) = 2 pi
    k4 = PlanarCandidate(4, ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)))
    assert not lp_prune(k4, (1.5, 1.6))
    assert lp_prune(k4, (1.9, 1.92))
    assert not lp_prune(k4, (1.95, 2.0))


def test_octahedron_survives(octahedron):
    assert lp_prune(octahedron, (1.5, 1.6))


def test_icosahedron_minus_vertex(ico11):
    assert sorted(ico11.face_sizes) == [3] * 15 + [5]
    assert not lp_prune(ico11, (1.2, 1.3))
    assert lp_prune(ico11, (D_12 - 0.01, D_12 + 0.01))


def test_interval_validation(octahedron):
    with pytest.raises(ValueError):
        lp_prune(octahedron, (0.0, 1.0))
    with pytest.raises(ValueError):
        lp_prune(octahedron, (1.2, 1.0))


def test_feasible_intervals_bracket(octahedron):
    iv = feasible_intervals(octahedron, 0.05, 2.0, 0.01)
    assert iv
    assert any(lo <= math.pi / 2 <= hi for lo, hi in iv)
    assert all(hi - lo <= 2.0 for lo, hi in iv)


def test_witness_satisfies_vertex_sums(octahedron):
    system = _AngleSystem(octahedron)
    ang = system.witness(1.5, 1.6)
    assert ang is not None
    sums = system.a_eq[: octahedron.n] @ ang
    assert sums == pytest.approx([2 * math.pi] * 6, abs=1e-8)


def test_pruning_is_conservative():
    # candidates pruned on an interval have no solution inside it
    budget = SolverBudget(starts=8)
    checked = 0
    for g in generate_candidates(7, max_degree=5):
        for lo, hi in ((1.30, 1.34), (1.40, 1.45)):
            if lp_prune(g, (lo, hi)):
                continue
            # search the interval directly, bypassing the relaxation
            assert isinstance(solve_embedding(g, budget=budget, intervals=[(lo, hi)]), str)
            checked += 1
    assert checked
