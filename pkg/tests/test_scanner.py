import itertools
import json
import math
import random

import pytest

from matchlab.certificates import verify_certificate
from matchlab.engine import load_stream
from matchlab.groups import parse_group, validate_pair
from matchlab.reporting import canonical, merge_partials, partial_body
from matchlab.scanner import (
    build_group_report,
    canonicalize_pair,
    classify_primes,
    predicted_matching_property,
    scan_group,
    scan_torsion_free,
    total_pairs,
)


def _affine(n, c, t, xs):
    return [((c * x[0] + t) % n,) for x in xs]


@pytest.mark.parametrize("n", [6, 7, 8])
def test_canonical_key_is_orbit_invariant(n):
    g = parse_group(f"z{n}")
    rng = random.Random(n)
    units = [u for u in range(1, n) if math.gcd(u, n) == 1]
    els = list(g.elements())
    for _ in range(50):
        k = rng.randint(1, n - 1)
        A = rng.sample(els, k)
        B = rng.sample(els[1:], k)
        key = canonicalize_pair(g, validate_pair(g, A, B))
        c, t = rng.choice(units), rng.randrange(n)
        image = validate_pair(g, _affine(n, c, t, A), [((c * b[0]) % n,) for b in B])
        assert canonicalize_pair(g, image) == key
        assert (0,) in key.a


@pytest.mark.parametrize("n", [5, 6, 7])
def test_orbit_sizes_cover_every_pair(n):
    rep = scan_group(f"z{n}", n - 1, properties="matching")
    for row in rep["per_size"]:
        assert row["pairs_covered"] == row["pairs_total"] == total_pairs(n, row["size"])
    assert rep["coverage"]["complete"]


def test_symmetry_reduction_matches_exhaustive_z7():
    a = scan_group("z7", 6, "symmetry_reduced")
    b = scan_group("z7", 6, "exhaustive")
    for key in ("verdicts", "counterexamples"):
        assert a[key] == b[key]
    for ra, rb in zip(a["per_size"], b["per_size"]):
        for field in ("pairs_total", "pairs_covered", "unmatchable_pairs", "no_acyclic_pairs"):
            assert ra[field] == rb[field]


def test_unmatchable_counts_against_brute_force_z6():
    g = parse_group("z6")
    rep = scan_group(g, 3, "symmetry_reduced", properties="matching")
    els = list(g.elements())
    for row in rep["per_size"]:
        k = row["size"]
        bad = 0
        for A in itertools.combinations(els, k):
            for B in itertools.combinations(els[1:], k):
                aset = set(A)
                if not any(all(g.add(a, b) not in aset for a, b in zip(A, p)) for p in itertools.permutations(B)):
                    bad += 1
        assert row["unmatchable_pairs"] == bad


@pytest.mark.parametrize("n,holds", [(2, True), (3, True), (5, True), (4, False), (6, False), (8, False),
                                     (9, False), (10, False)])
def test_matching_property_verdicts(n, holds):
    rep = scan_group(f"z{n}", n - 1, properties="matching")
    v = rep["verdicts"]["matching_property"]
    assert v["status"] == ("holds" if holds else "fails")
    assert predicted_matching_property(parse_group(f"z{n}")) == holds
    if not holds:
        assert verify_certificate(v["certificate"])[0]
    assert rep["discrepancies"] == []


def test_known_witnesses():
    w4 = scan_group("z4", 3)["verdicts"]["matching_property"]["witness"]
    assert (w4["a"], w4["b"]) <= ([[0], [2]], [[1], [2]])
    w6 = scan_group("z6", 5)["verdicts"]["matching_property"]["witness"]
    assert w6["a"] == [[0], [3]] and w6["b"] == [[1], [3]]


def test_non_cyclic_group_scan():
    rep = scan_group("z2xz2", 3)
    assert rep["mode"] == "exhaustive"
    assert rep["verdicts"]["matching_property"]["status"] == "fails"
    assert verify_certificate(rep["verdicts"]["matching_property"]["certificate"])[0]


def test_workers_do_not_change_body():
    one = scan_group("z7", 6, workers=1)
    two = scan_group("z7", 6, workers=2)
    assert canonical(one) == canonical(two)


def test_resume_from_truncated_stream(tmp_path):
    full = scan_group("z7", 6)
    stream = tmp_path / "s.jsonl"
    scan_group("z7", 6, stream_path=stream)
    lines = stream.read_text().splitlines()
    stream.write_text("\n".join(lines[: len(lines) // 2]) + "\n{\"torn")
    resume, done = load_stream(stream)
    assert 0 < len(done) < len(lines)
    resumed = scan_group("z7", 6, stream_path=tmp_path / "s2.jsonl", resume=resume)
    assert canonical(resumed) == canonical(full)


def test_shards_merge_to_full_report():
    full = scan_group("z7", 6)
    parts = []
    for i in range(3):
        params, res = scan_group("z7", 6, shard=(i, 3), return_result=True)
        parts.append(json.loads(canonical(partial_body(params, res, (i, 3)))))
    assert canonical(merge_partials(parts[::-1])) == canonical(full)
    partial = merge_partials(parts[:2])
    assert partial["verdicts"]["matching_property"]["status"] in ("inconclusive", "fails")
    assert not partial["coverage"]["complete"]


def test_budget_exhaustion_is_inconclusive():
    params, res = scan_group("z11", 5, budget=0.0, return_result=True)
    rep = build_group_report(params, res, params["cap"])
    assert not rep["coverage"]["complete"]
    assert rep["verdicts"]["matching_property"]["status"] != "holds"


def test_classify_primes_small():
    rep = classify_primes({2: 1, 3: 2, 5: 4}, 0)
    assert [e["acyclic_verdict"] for e in rep["primes"]] == ["holds", "holds", "holds"]
    assert all(e["full_range"] for e in rep["primes"])


def test_classify_primes_z7_fails_with_certificate():
    rep = classify_primes([7], 6)
    (entry,) = rep["primes"]
    assert entry["acyclic_verdict"] == "fails"
    assert entry["witness"]["size"] == 3
    assert verify_certificate(entry["certificate"])[0]


def test_torsion_free_sampling_is_seeded():
    a = scan_torsion_free(1, 10, 5, 40, seed=3)
    b = scan_torsion_free(1, 10, 5, 40, seed=3)
    assert canonical(a) == canonical(b)
    v = a["verdicts"]["acyclic_matching_property"]
    assert v["status"] in ("inconclusive", "fails")
    assert v["with_acyclic_matching"] + v["undecided"] + len(a["discrepancies"]) == 40
