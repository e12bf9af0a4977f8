import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_matchings
from matchlab.groups import parse_group, validate_pair
from matchlab.matching import (
    Fingerprint,
    Matching,
    acyclic_report,
    classify_pair,
    enumerate_matchings,
    find_matching,
    fingerprint,
    hall_violator,
    is_valid_matching,
    neighbourhood,
)

GROUPS = ["z4", "z6", "z7", "z9", "z2xz4", "z3xz3"]


def brute_has_acyclic(g, matchings):
    prints = Counter(tuple(sorted(Counter(g.add(a, b) for a, b in m).items())) for m in matchings)
    return any(c == 1 for c in prints.values())


@st.composite
def pairs(draw):
    g = parse_group(draw(st.sampled_from(GROUPS)))
    els = list(g.elements())
    k = draw(st.integers(1, min(5, len(els) - 1)))
    A = draw(st.lists(st.sampled_from(els), min_size=k, max_size=k, unique=True))
    B = draw(st.lists(st.sampled_from(els), min_size=k, max_size=k, unique=True))
    return validate_pair(g, A, B)


@settings(max_examples=300, deadline=None)
@given(pair=pairs())
def test_enumeration_equals_brute_force(pair):
    ms, exhaustive = enumerate_matchings(pair)
    assert exhaustive
    assert sorted(m.pairs for m in ms) == brute_matchings(pair.group, pair.A, pair.B)


@settings(max_examples=300, deadline=None)
@given(pair=pairs())
def test_find_matching_and_hall(pair):
    truth = brute_matchings(pair.group, pair.A, pair.B)
    m = find_matching(pair)
    S = hall_violator(pair)
    if truth:
        assert m is not None and is_valid_matching(pair, m)
        assert S is None
    else:
        assert m is None
        assert S is not None and len(neighbourhood(pair, S)) < len(S)


@settings(max_examples=300, deadline=None)
@given(pair=pairs())
def test_acyclic_status_equals_brute_force(pair):
    truth = brute_matchings(pair.group, pair.A, pair.B)
    status = classify_pair(pair)
    assert status.matching_count == len(truth)
    assert status.has_acyclic == brute_has_acyclic(pair.group, truth)
    rep = acyclic_report(pair)
    assert (rep.status == "has-acyclic") == status.has_acyclic
    if status.witness is not None:
        w = Matching(tuple((a, pair.B[j]) for a, j in zip(pair.A, status.witness)))
        fp = fingerprint(pair.group, pair.A, w)
        same = [m for m in truth if Counter(pair.group.add(a, b) for a, b in m) == Counter(dict(fp.items))]
        assert len(same) == 1


def test_z4_witness_has_no_matching():
    g = parse_group("z4")
    pair = validate_pair(g, g.parse_set("0,2"), g.parse_set("1,2"))
    assert find_matching(pair) is None
    assert enumerate_matchings(pair)[0] == []


def test_zero_in_b_blocks_matching():
    g = parse_group("z7")
    pair = validate_pair(g, g.parse_set("1,2"), g.parse_set("0,3"))
    assert pair.zero_in_B
    assert find_matching(pair) is None
    assert classify_pair(pair).matching_count == 0


def test_fingerprint_is_exact_multiset():
    g = parse_group("z5")
    f = Matching((((1,), (2,)), ((2,), (1,))))
    fp = fingerprint(g, [(1,), (2,)], f)
    assert fp == Fingerprint.from_counts({(3,): 2})
    assert fp.total() == 2 and fp[(3,)] == 2 and fp[(0,)] == 0
    assert fp.to_json() == {"3": 2}


def test_cap_gives_inconclusive():
    g = parse_group("z13")
    pair = validate_pair(g, g.parse_set("0,1,2,3,4,5"), g.parse_set("6,7,8,9,10,11"))
    status = classify_pair(pair, cap=3)
    assert not status.exhaustive and status.has_acyclic is None
    assert acyclic_report(pair, cap=3).status == "inconclusive"


def test_matching_json_roundtrip():
    f = Matching((((0,), (1,)), ((3,), (2,))))
    assert Matching.from_json(f.to_json()) == f


def test_z7_small_sizes_exhaustively():
    g = parse_group("z7")
    els = list(g.elements())
    for k in (1, 2, 3):
        for A in itertools.combinations(els, k):
            for B in itertools.combinations(els[1:], k):
                pair = validate_pair(g, A, B)
                ms, _ = enumerate_matchings(pair)
                assert sorted(m.pairs for m in ms) == brute_matchings(g, pair.A, pair.B)
