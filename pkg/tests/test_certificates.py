import copy

import pytest

from matchlab.certificates import (
    CertificateError,
    group_no_acyclic,
    group_unmatchable,
    theorem_discrepancy,
    verify_certificate,
)
from matchlab.groups import parse_group, validate_pair
from matchlab.matching import acyclic_report


def pair(group, a, b):
    g = parse_group(group)
    return validate_pair(g, g.parse_set(a), g.parse_set(b))


def test_unmatchable_z6_witness():
    cert = group_unmatchable(pair("z6", "0,3", "1,3"))
    ok, msg = verify_certificate(cert)
    assert ok, msg


def test_unmatchable_rejects_matchable_pair():
    cert = group_unmatchable(pair("z4", "0,2", "1,2"))
    assert verify_certificate(cert)[0]
    forged = copy.deepcopy(cert)
    forged["instance"]["b"] = [[1], [3]]
    assert not verify_certificate(forged)[0]


def test_no_acyclic_certificate_z7():
    p = pair("z7", "0,1,3", "1,2,4")
    rep = acyclic_report(p)
    assert rep.status == "no-acyclic"
    cert = group_no_acyclic(p, rep)
    assert verify_certificate(cert)[0]
    forged = copy.deepcopy(cert)
    forged["classes"][0]["matchings"] = forged["classes"][0]["matchings"][:1]
    assert not verify_certificate(forged)[0]


def test_discrepancy_wraps_evidence():
    inner = group_unmatchable(pair("z6", "0,3", "1,3"))
    ok, msg = verify_certificate(theorem_discrepancy("demo", "claim", inner))
    assert ok and msg.startswith("[demo]")


def test_unknown_kind():
    with pytest.raises(CertificateError):
        verify_certificate({"kind": "nope"})
