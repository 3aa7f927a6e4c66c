import math
from types import SimpleNamespace

import numpy as np
import pytest

from irrcontact.extremal import (
    D_12,
    ExtremalReport,
    antipodal_optimum,
    bounds_table,
    construction_contacts,
    contact_upper_bound,
    danzer_question_scan,
    delta,
    fejes_toth_bound,
    icosa_config,
    is_antipodal,
    k5_config,
    k_star,
    kappa,
    report_table,
    tammes_from_records,
)
from irrcontact.rigidity import d_reflection_exists, is_irreducible


def rec(d_min, d_max, e, status="feasible", flags=None):
    return SimpleNamespace(d_min=d_min, d_max=d_max, edge_count=e, status=status, flags=flags or {})


def test_bound_examples():
    assert fejes_toth_bound(3) == pytest.approx(2 * math.pi / 3, abs=1e-12)
    # the regular tetrahedron is optimal for four points
    tet = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / math.sqrt(3)
    assert fejes_toth_bound(4) == pytest.approx(math.acos(float(tet[0] @ tet[1])), abs=1e-12)
    assert fejes_toth_bound(4) == pytest.approx(1.91063, abs=1e-5)
    assert fejes_toth_bound(6) == pytest.approx(math.pi / 2, abs=1e-9)
    assert fejes_toth_bound(12) == pytest.approx(D_12, abs=1e-9)


def test_bound_decreasing():
    b = [fejes_toth_bound(n) for n in range(3, 201)]
    assert all(x > y for x, y in zip(b, b[1:]))


def test_bound_domain():
    with pytest.raises(ValueError):
        fejes_toth_bound(2)
    with pytest.raises(ValueError):
        contact_upper_bound(1)


def test_contact_bound():
    assert [contact_upper_bound(n) for n in (3, 6, 12)] == [3, 12, 30]


def test_construction_edges():
    assert len(icosa_config(12).edges) == 30
    assert len(icosa_config(11).edges) == 25
    assert len(icosa_config(10).edges) == 21
    assert len(icosa_config(9).edges) == 18
    assert len(k5_config().edges) == 8
    assert construction_contacts(10) == 21
    assert construction_contacts(7) == 0
    for n in (9, 10, 11, 12):
        assert icosa_config(n).psi == pytest.approx(D_12, abs=1e-12)
    with pytest.raises(ValueError):
        icosa_config(8)


@pytest.mark.parametrize(
    "m,a",
    [
        (2, math.pi / 2),
        (3, math.pi / 2),
        (4, math.acos(1 / 3)),
        (5, math.acos(1 / math.sqrt(5))),
        (6, math.acos(1 / math.sqrt(5))),
    ],
)
def test_antipodal_optima(m, a):
    cfg, am = antipodal_optimum(m)
    assert len(cfg) == 2 * m
    assert am == pytest.approx(a, abs=1e-9)
    assert is_antipodal(cfg.points)
    if m >= 3:
        assert is_irreducible(cfg).irreducible
        assert d_reflection_exists(cfg) is None


def test_antipodal_below_tammes_bound():
    for m in range(2, 7):
        assert antipodal_optimum(m)[1] <= fejes_toth_bound(2 * m) + 1e-12


def test_antipodal_domain():
    with pytest.raises(ValueError):
        antipodal_optimum(7)
    assert not is_antipodal(k5_config().points)


def test_summaries_on_synthetic_records():
    recs = [rec(1.1, 1.2, 14), rec(1.0, 1.3, 16, flags={"max": True}), rec(None, None, 18, "undecided")]
    d_n, top = tammes_from_records(recs)
    assert d_n == 1.3 and len(top) == 1
    assert k_star(recs) == 16 and kappa(recs) == 14
    assert delta(recs) == 1.0
    assert danzer_question_scan({8: recs}, threshold=1.05) == (8, recs[1])
    assert danzer_question_scan({8: recs}, threshold=0.9) == (None, None)
    with pytest.raises(ValueError):
        danzer_question_scan({8: recs}, ns=[7, 8])


def test_maximal_flag_filters_top():
    recs = [rec(1.2, 1.3, 16, flags={"max": False}), rec(1.3, 1.3005, 17, flags={"max": True})]
    d_n, top = tammes_from_records(recs)
    assert top == [recs[1]]


def test_report_checks_edge_order():
    with pytest.raises(ValueError):
        ExtremalReport(n=6, count=1, d_n=1.0, delta_n=1.0, k_star=13, kappa=12, ft_bound=1.0, k_lower=13)
    r = ExtremalReport.from_records(8, [rec(1.2, 1.3, 16), rec(1.18, 1.19, 14)])
    assert (r.k_star, r.kappa, r.count) == (16, 14, 2)
    assert "| 8 | 2 |" in report_table([r])
    assert report_table([r], "csv").splitlines()[0].startswith("n,count")


def test_bounds_table():
    csv = bounds_table([6, 12])
    assert csv.splitlines() == ["n,ft_bound,contact_bound", "6,1.57080,12", "12,1.10715,30"]
    assert bounds_table([6], "md").splitlines()[-1] == "| 6 | 1.57080 | 12 |"


def test_scan_real_records(records_by_n):
    assert danzer_question_scan(records_by_n, ns=[6, 7, 8]) == (None, None)
    n, witness = danzer_question_scan(records_by_n, ns=[6, 7, 8, 9])
    assert n == 9
    assert witness.d_min == pytest.approx(1.10525, abs=2e-3)


def test_tammes_bound_dominates(records_by_n):
    for n, recs in records_by_n.items():
        assert tammes_from_records(recs)[0] <= fejes_toth_bound(n) + 1e-9
