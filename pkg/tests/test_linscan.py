import json

import pytest

from matchlab.certificates import verify_certificate
from matchlab.linscan import (
    acyclic_linear_scan,
    build_property_report,
    intermediate_degrees,
    linear_property_scan,
    products_meet,
    strong_theorem_scan,
)
from matchlab.linear import UnsupportedQuantifier
from matchlab.reporting import canonical, merge_partials, partial_body


def test_intermediate_degrees():
    assert intermediate_degrees(4) == [2]
    assert intermediate_degrees(5) == []
    assert intermediate_degrees(6) == [2, 3]


def test_property_scan_gf4_dim1_holds():
    rep = linear_property_scan("gf(2^2)", 1)
    assert rep["pairs_admissible"] == 6
    assert rep["verdict"]["status"] == "holds"


def test_property_scan_gf16_fails_with_certificate():
    rep = linear_property_scan("gf(2^4)", 2)
    assert rep["verdict"]["status"] == "fails"
    assert rep["predicted"] == "fails" and rep["agrees_with_prediction"]
    assert rep["pairs_admissible"] == 35 * 28
    assert verify_certificate(rep["verdict"]["certificate"])[0]
    assert rep["discrepancies"] == []


def test_property_scan_shards_merge():
    full = linear_property_scan("gf(2^4)", 2)
    parts = []
    for i in range(4):
        params, res = linear_property_scan("gf(2^4)", 2, shard=(i, 4), return_result=True)
        parts.append(json.loads(canonical(partial_body(params, res, (i, 4)))))
    assert canonical(merge_partials(parts)) == canonical(full)


def test_property_scan_rejects_transcendental():
    with pytest.raises(UnsupportedQuantifier):
        linear_property_scan("fp(2)(t)", 1)


def test_strong_scan_gf9_agrees():
    rep = strong_theorem_scan("gf(3^2)", 2)
    assert rep["discrepancy_count"] == 0


def test_strong_scan_gf16_gap_certificates():
    rep = strong_theorem_scan("gf(2^4)", 2)
    dims = {row["dim"]: row for row in rep["per_dim"]}
    assert dims[1]["discrepancies"] == 0
    assert all(row["discrepancies_product_criterion"] == 0 for row in rep["per_dim"])
    for d in rep["discrepancies"]:
        assert d["evidence"]["kind"] == "linear-criterion-gap"
        assert verify_certificate(d)[0]


def test_products_meet_implies_criterion_fails():
    from matchlab.fields import all_subspaces, parse_tower
    from matchlab.linear import strong_matching_exists

    t = parse_tower("gf(2^4)")
    subs = all_subspaces(t, 2)
    for A in subs[:10]:
        for B in subs:
            if products_meet(A, B):
                assert not strong_matching_exists(A, B)


@pytest.mark.parametrize("tower,n", [("gf(2^2)", 1), ("gf(2^3)", 1), ("gf(3^2)", 1), ("gf(2^4)", 2)])
def test_acyclic_scan_finite(tower, n):
    rep = acyclic_linear_scan(tower, n)
    assert rep["verdict"]["status"] == "holds"
    assert rep["discrepancies"] == []
    assert len(rep["acyclic_witnesses"]) == rep["pairs_admissible"]


def test_acyclic_scan_sampled_is_deterministic_and_never_holds():
    a = acyclic_linear_scan("fp(2)(t)", 2, samples=10, seed=5)
    b = acyclic_linear_scan("fp(2)(t)", 2, samples=10, seed=5)
    assert canonical(a) == canonical(b)
    assert a["verdict"]["status"] in ("inconclusive", "fails")
    assert a["samples_accepted"] == 10


def test_acyclic_scan_rejects_rationals():
    with pytest.raises(UnsupportedQuantifier):
        acyclic_linear_scan("q(t)", 1)


def test_budget_zero_is_inconclusive():
    params, res = linear_property_scan("gf(2^5)", 2, budget=0.0, return_result=True)
    rep = build_property_report(params, res)
    assert rep["verdict"]["status"] == "inconclusive"
