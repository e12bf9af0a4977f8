"""Self-contained witness certificates and their verification.

Every certificate embeds its problem instance.  ``verify_certificate``
re-checks it from the embedded data with independent brute-force code; it
never re-runs the scan that produced it.
"""

from __future__ import annotations

from collections import Counter
from itertools import permutations

from .groups import GroupError, parse_group, validate_pair

SCHEMA = "matchlab.certificate/1"

KINDS = ("group-unmatchable", "group-no-acyclic", "linear-unmatched", "linear-no-acyclic", "theorem-discrepancy")


class CertificateError(ValueError):
    pass


def _bf_matchings(g, A, B):
    aset = set(A)
    for perm in permutations(B):
        if all(g.add(a, b) not in aset for a, b in zip(A, perm)):
            yield tuple(zip(A, perm))


def group_unmatchable(pair) -> dict:
    from .matching import hall_violator, neighbourhood

    S = hall_violator(pair)
    if S is None:
        raise CertificateError("pair has a matching")
    return {
        "schema": SCHEMA,
        "kind": "group-unmatchable",
        "instance": pair.to_json(),
        "hall_set": [list(x) for x in S],
        "neighbourhood": [list(x) for x in neighbourhood(pair, S)],
    }


def group_no_acyclic(pair, report) -> dict:
    """Exhaustion record: every matching with its fingerprint class."""
    if not report.exhaustive or report.acyclic_matchings:
        raise CertificateError("pair is not an exhaustive no-acyclic instance")
    classes = [
        {"fingerprint": fp.to_json(), "matchings": [f.to_json() for f in ms]} for fp, ms in report.classes
    ]
    return {
        "schema": SCHEMA,
        "kind": "group-no-acyclic",
        "instance": pair.to_json(),
        "matching_count": sum(len(ms) for _, ms in report.classes),
        "classes": classes,
    }


def theorem_discrepancy(theorem: str, claim: str, evidence: dict) -> dict:
    return {"schema": SCHEMA, "kind": "theorem-discrepancy", "theorem": theorem, "claim": claim, "evidence": evidence}


def _verify_group_unmatchable(cert) -> tuple[bool, str]:
    pair = _load_pair(cert["instance"])
    g = pair.group
    S = [g.normalize(x) for x in cert["hall_set"]]
    if not set(S) <= set(pair.A):
        return False, "hall set is not inside A"
    if pair.zero_in_B:
        return True, "0 lies in B, so no element of A has an admissible partner for 0"
    aset = set(pair.A)
    nbrs = {b for a in S for b in pair.B if g.add(a, b) not in aset}
    if sorted(nbrs) != sorted(g.normalize(x) for x in cert["neighbourhood"]):
        return False, "recorded neighbourhood does not match"
    if len(nbrs) >= len(S):
        return False, f"|N(S)|={len(nbrs)} is not smaller than |S|={len(S)}"
    return True, f"Hall violation: |S|={len(S)} but only {len(nbrs)} admissible partners"


def _verify_group_no_acyclic(cert) -> tuple[bool, str]:
    pair = _load_pair(cert["instance"])
    g = pair.group
    truth = set(_bf_matchings(g, pair.A, pair.B))
    listed = []
    for cls in cert["classes"]:
        ms = [tuple((g.normalize(a), g.normalize(b)) for a, b in m) for m in cls["matchings"]]
        if len(ms) < 2:
            return False, "a fingerprint class is a singleton, so an acyclic matching exists"
        fps = {tuple(sorted(Counter(g.add(a, b) for a, b in m).items())) for m in ms}
        if len(fps) != 1:
            return False, "matchings within a class have different fingerprints"
        listed.extend(ms)
    if len(listed) != len(set(listed)) or set(listed) != truth:
        return False, "listed matchings differ from brute-force enumeration"
    prints = Counter(tuple(sorted(Counter(g.add(a, b) for a, b in m).items())) for m in truth)
    if any(c == 1 for c in prints.values()):
        return False, "brute force finds a singleton fingerprint class"
    return True, f"all {len(truth)} matchings lie in fingerprint classes of size >= 2"


def _load_pair(inst):
    try:
        return validate_pair(parse_group(inst["group"]), inst["a"], inst["b"])
    except (GroupError, KeyError) as exc:
        raise CertificateError(f"bad instance: {exc}") from exc


def verify_certificate(cert: dict) -> tuple[bool, str]:
    kind = cert.get("kind")
    if kind == "group-unmatchable":
        return _verify_group_unmatchable(cert)
    if kind == "group-no-acyclic":
        return _verify_group_no_acyclic(cert)
    if kind in ("linear-unmatched", "linear-no-acyclic", "linear-not-strong", "linear-criterion-gap"):
        from .linear_certificates import verify_linear

        return verify_linear(cert)
    if kind == "theorem-discrepancy":
        ok, msg = verify_certificate(cert["evidence"])
        return ok, f"[{cert['theorem']}] {msg}"
    raise CertificateError(f"unknown certificate kind {kind!r}")
