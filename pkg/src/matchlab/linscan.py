"""Scanners for the linear matching statements.

* ``linear_property_scan``: is every n-dimensional A matched to every
  n-dimensional B with 1 not in B?
* ``strong_theorem_scan``: does ``AB n A = {0}`` predict strong-matching
  behaviour of (sampled) isomorphisms?
* ``acyclic_linear_scan``: does every admissible pair carry an acyclic strong
  matching?  Exhaustive over finite towers, seeded sampling over F_p(t).
"""

from __future__ import annotations

import random
from functools import lru_cache

from . import linalg
from . import linear_certificates as lcerts
from .certificates import theorem_discrepancy
from .engine import RunResult, run_units
from .fields import Subspace, all_subspaces, intersect, parse_tower, preimage_in, product, span
from .linear import (
    LinearMap,
    UnsupportedQuantifier,
    is_acyclic_strong_matching,
    is_matched_subspace,
    is_strong_matching,
    isomorphisms,
    strong_matching_exists,
)
from .scanner import manifest

THM_LINEAR_PROPERTY = "linear matching property <=> no intermediate field K < M < L"
THM_STRONG = "strong matching A -> B exists <=> span(AB) n A = 0, and then all isomorphisms are strong"
THM_TRANSCENDENTAL = "K(t)/K has the linear acyclic matching property"


@lru_cache(maxsize=32)
def _subspaces(desc: str, n: int) -> tuple[Subspace, ...]:
    return tuple(all_subspaces(parse_tower(desc), n))


def intermediate_degrees(d: int) -> list[int]:
    return [e for e in range(2, d) if d % e == 0]


def _require_finite_tower(tower):
    if tower.transcendental or not tower.K.is_finite:
        raise UnsupportedQuantifier("exhaustive scans need a finite extension of a prime field")


def _matrix_key(m):
    return [[int(x) for x in row] for row in m]


# -- linear matching property ---------------------------------------------------


def _property_unit(unit):
    uid, desc, n, ai = unit
    tower = parse_tower(desc)
    subs = _subspaces(desc, n)
    A = subs[ai]
    one = tower.one()
    out = []
    for bi, B in enumerate(subs):
        if B.contains(one):
            continue
        res = is_matched_subspace(A, B)
        rec = {"unit": uid, "a_index": ai, "b_index": bi, "matched": res.matched}
        if not res.matched:
            rec["rado_subset"] = list(res.rado_subset)
            rec["failing_basis"] = [[int(x) for x in v] for v in res.failing_basis.vectors]
        out.append(rec)
    return out


def linear_property_scan(tower, n: int, *, workers=1, budget=None, stream_path=None, resume=None, shard=None,
                         return_result=False):
    if isinstance(tower, str):
        tower = parse_tower(tower)
    _require_finite_tower(tower)
    d = tower.degree
    if not 1 <= n <= d:
        raise ValueError(f"dimension must be in 1..{d}")
    desc = tower.descriptor()
    subs = _subspaces(desc, n)
    units = [(f"A{ai}", desc, n, ai) for ai in range(len(subs))]
    params = {"command": "linear-scan-property", "tower": desc, "dim": n}
    result = run_units(_property_unit, units, workers=workers, budget=budget, stream_path=stream_path,
                       resume=resume, shard=shard)
    if return_result:
        return params, result
    return build_property_report(params, result)


def build_property_report(params, result: RunResult) -> dict:
    tower = parse_tower(params["tower"])
    n = params["dim"]
    subs = _subspaces(params["tower"], n)
    recs = sorted(result.records, key=lambda r: (r["a_index"], r["b_index"]))
    fails = [r for r in recs if not r["matched"]]
    admissible_b = sum(1 for B in subs if not B.contains(tower.one()))
    total = len(subs) * admissible_b
    d = tower.degree
    inter = intermediate_degrees(d)
    predicted = "fails" if inter else "holds"
    if fails:
        r = fails[0]
        A, B = subs[r["a_index"]], subs[r["b_index"]]
        from .linear import BasisSeq

        basis = BasisSeq(tuple(tuple(v) for v in r["failing_basis"]), A)
        cert = lcerts.linear_unmatched(A, B, basis, r["rado_subset"])
        verdict = {"status": "fails", "witness": {"a": A.to_json(), "b": B.to_json()}, "certificate": cert}
    else:
        verdict = {"status": "holds" if result.complete and len(recs) == total else "inconclusive"}
    discrepancies = []
    if predicted == "holds" and verdict["status"] == "fails":
        discrepancies.append(theorem_discrepancy("linear-matching-property", THM_LINEAR_PROPERTY, verdict["certificate"]))
    return {
        "schema": "matchlab.scan-report/1",
        "kind": "linear-property",
        "manifest": manifest(params),
        "tower": params["tower"],
        "dim": n,
        "mode": "exhaustive",
        "coverage": {"complete": result.complete, "units_total": result.units_total,
                     "units_done": len(result.units_done), "budget_exceeded": result.budget_exceeded},
        "subspaces": len(subs),
        "pairs_total": len(subs) ** 2,
        "pairs_admissible": total,
        "pairs_checked": len(recs),
        "pairs_unmatched": len(fails),
        "unmatched_pairs": [[r["a_index"], r["b_index"]] for r in fails[:100]],
        "intermediate_field_degrees": inter,
        "predicted": predicted,
        "prediction_note": "failure is predicted for some dimension, not necessarily this one",
        "verdict": verdict,
        "agrees_with_prediction": verdict["status"] == predicted,
        "discrepancies": discrepancies,
    }


# -- strong matching criterion --------------------------------------------------------


def products_meet(A: Subspace, B: Subspace) -> bool:
    """Some nonzero a in A, b in B with ab in A (finite K).

    This differs from ``AB n A != {0}``: a sum of products can land in A
    while no single product does.
    """
    K = A.tower.K
    return any(not preimage_in(B, A.vector(c), A).is_zero for c in linalg.projective_points(K, A.dim))



def _strong_unit(unit):
    uid, desc, n, ai, samples, seed = unit
    subs = _subspaces(desc, n)
    A = subs[ai]
    K = A.tower.K
    mats = linalg.general_linear(K, n)
    out = []
    for bi, B in enumerate(subs):
        crit = strong_matching_exists(A, B)
        pure = not products_meet(A, B)
        if len(mats) <= samples:
            chosen = mats
        else:
            rng = random.Random(f"{seed}:{ai}:{bi}")
            chosen = sorted(rng.sample(mats, samples))
        verdicts = []
        failing = None
        for m in chosen:
            ok, basis = is_strong_matching(LinearMap(A, B, m))
            verdicts.append(ok)
            if not ok and failing is None:
                failing = (m, basis)
        agree = all(verdicts) if crit else not any(verdicts)
        agree_pure = all(verdicts) if pure else not any(verdicts)
        rec = {"unit": uid, "a_index": ai, "b_index": bi, "criterion": crit, "isos": len(chosen),
               "strong": sum(verdicts), "agrees": agree, "product_criterion": pure,
               "agrees_product_criterion": agree_pure}
        if failing is not None and not crit:
            rec["example_failure"] = {"map": _matrix_key(failing[0]),
                                      "basis": [[int(x) for x in v] for v in failing[1].vectors]}
        out.append(rec)
    return out


def strong_theorem_scan(tower, max_dim: int = 2, samples: int = 20, seed: int = 0, *, workers=1, budget=None):
    if isinstance(tower, str):
        tower = parse_tower(tower)
    _require_finite_tower(tower)
    desc = tower.descriptor()
    units = []
    for n in range(1, min(max_dim, tower.degree) + 1):
        units += [(f"{n}:A{ai}", desc, n, ai, samples, seed) for ai in range(len(_subspaces(desc, n)))]
    result = run_units(_strong_unit, units, workers=workers, budget=budget)
    params = {"command": "linear-scan-strong", "tower": desc, "max_dim": max_dim, "samples": samples, "seed": seed}
    recs = sorted(result.records, key=lambda r: (r["unit"].split(":")[0], r["a_index"], r["b_index"]))
    bad = [r for r in recs if not r["agrees"]]
    discrepancies = []
    for r in bad[:10]:
        n = int(r["unit"].split(":")[0])
        subs = _subspaces(desc, n)
        A, B = subs[r["a_index"]], subs[r["b_index"]]
        if not r["criterion"] and r["product_criterion"]:
            evidence = lcerts.linear_criterion_gap(A, B)
        else:
            evidence = {"a": A.to_json(), "b": B.to_json(), "record": r}
        discrepancies.append(theorem_discrepancy("strong-matching-criterion", THM_STRONG, evidence))
    per_dim = []
    for n in range(1, min(max_dim, tower.degree) + 1):
        rs = [r for r in recs if r["unit"].startswith(f"{n}:")]
        per_dim.append({"dim": n, "pairs": len(rs), "criterion_true": sum(r["criterion"] for r in rs),
                        "criterion_false": sum(not r["criterion"] for r in rs),
                        "isomorphisms_checked": sum(r["isos"] for r in rs),
                        "discrepancies": sum(not r["agrees"] for r in rs),
                        "discrepancies_product_criterion": sum(not r["agrees_product_criterion"] for r in rs)})
    witnesses = [dict(r["example_failure"], a_index=r["a_index"], b_index=r["b_index"], dim=int(r["unit"][0]))
                 for r in recs if "example_failure" in r][:20]
    return {
        "schema": "matchlab.scan-report/1",
        "kind": "linear-strong",
        "manifest": manifest(params),
        "tower": desc,
        "mode": "exhaustive pairs, sampled isomorphisms",
        "coverage": {"complete": result.complete, "units_total": result.units_total,
                     "units_done": len(result.units_done)},
        "per_dim": per_dim,
        "discrepancy_count": len(bad),
        "discrepancy_count_product_criterion": sum(not r["agrees_product_criterion"] for r in recs),
        "failure_witnesses": witnesses,
        "discrepancies": discrepancies,
    }


# -- acyclic strong matchings -----------------------------------------------------------


def classify_linear_pair(A: Subspace, B: Subspace) -> dict:
    """Search the strong matchings of an admissible pair for an acyclic one."""
    K = A.tower.K
    rec = {"admissible": strong_matching_exists(A, B)}
    if not rec["admissible"]:
        return rec
    cache: dict = {}
    entries = []
    not_strong = []
    found = None
    for f in isomorphisms(A, B):
        ok, basis = is_strong_matching(f)
        cache[f.matrix] = ok
        if not ok:
            not_strong.append((f, basis))
            entries.append({"f": _matrix_key(f.matrix), "not_strong_basis": [[int(x) for x in v] for v in basis.vectors]})
            continue
        res = is_acyclic_strong_matching(f, cache)
        if res.acyclic:
            found = f
            break
        entries.append({"f": _matrix_key(f.matrix), **{k: _matrix_key(v) if v is not None else None
                        for k, v in (("phi", res.witness.phi.matrix), ("g", res.witness.g.matrix))}})
    rec["has_acyclic"] = found is not None
    rec["acyclic_witness"] = _matrix_key(found.matrix) if found is not None else None
    rec["isomorphism_classes_checked"] = len(entries) + (found is not None)
    rec["non_strong"] = len(not_strong)
    if found is None:
        rec["certificate"] = lcerts.linear_no_acyclic(A, B, entries)
    if not_strong:
        rec["not_strong_certificate"] = lcerts.linear_not_strong(*not_strong[0])
    return rec


def _acyclic_unit(unit):
    uid, desc, n, ai = unit
    subs = _subspaces(desc, n)
    A = subs[ai]
    out = []
    for bi, B in enumerate(subs):
        rec = classify_linear_pair(A, B)
        if rec["admissible"]:
            rec.update(unit=uid, dim=n, a_index=ai, b_index=bi)
            out.append(rec)
        else:
            out.append({"unit": uid, "dim": n, "a_index": ai, "b_index": bi, "admissible": False})
    return out


def _sample_generators(rng, tower, dim, max_deg):
    K = tower.K
    return [tuple(rng.randrange(K.p) for _ in range(max_deg + 1)) for _ in range(dim)]


def acyclic_linear_scan(tower, n: int, *, samples: int | None = None, seed: int = 0, max_deg: int = 3,
                        workers=1, budget=None, max_attempts: int = 100_000):
    if isinstance(tower, str):
        tower = parse_tower(tower)
    if not tower.K.is_finite:
        raise UnsupportedQuantifier("acyclicity is decided only over finite base fields")
    desc = tower.descriptor()
    if tower.transcendental:
        return _acyclic_sampled(tower, n, samples or 50, seed, max_deg, max_attempts)
    units = [(f"{k}:A{ai}", desc, k, ai) for k in [n] for ai in range(len(_subspaces(desc, k)))]
    result = run_units(_acyclic_unit, units, workers=workers, budget=budget)
    params = {"command": "linear-scan-acyclic", "tower": desc, "dim": n}
    recs = sorted(result.records, key=lambda r: (r["a_index"], r["b_index"]))
    adm = [r for r in recs if r["admissible"]]
    fails = [r for r in adm if not r["has_acyclic"]]
    theorem_bad = [r for r in adm if r.get("non_strong")]
    subs = _subspaces(desc, n)
    if fails:
        r = fails[0]
        verdict = {"status": "fails", "witness": {"a": subs[r["a_index"]].to_json(), "b": subs[r["b_index"]].to_json()},
                   "certificate": r["certificate"]}
    else:
        verdict = {"status": "holds" if result.complete else "inconclusive"}
    discrepancies = [theorem_discrepancy("strong-matching-criterion", THM_STRONG, r["not_strong_certificate"])
                     for r in theorem_bad[:10]]
    return {
        "schema": "matchlab.scan-report/1",
        "kind": "linear-acyclic",
        "manifest": manifest(params),
        "tower": desc,
        "dim": n,
        "mode": "exhaustive",
        "extension_degree": tower.degree,
        "degree_is_prime": not intermediate_degrees(tower.degree) and tower.degree > 1,
        "coverage": {"complete": result.complete, "units_total": result.units_total,
                     "units_done": len(result.units_done)},
        "pairs_total": len(recs),
        "pairs_admissible": len(adm),
        "pairs_without_acyclic": len(fails),
        "acyclic_witnesses": [{"a": subs[r["a_index"]].to_json()["rows"], "b": subs[r["b_index"]].to_json()["rows"],
                               "f": r["acyclic_witness"]}
                              for r in adm if r["has_acyclic"]],
        "verdict": verdict,
        "discrepancies": discrepancies,
    }


def _acyclic_sampled(tower, max_dim, samples, seed, max_deg, max_attempts):
    rng = random.Random(seed)
    records = []
    attempts = 0
    while len(records) < samples:
        attempts += 1
        if attempts > max_attempts:
            break
        dim = rng.randint(1, max_dim)
        ga = _sample_generators(rng, tower, dim, max_deg)
        gb = _sample_generators(rng, tower, dim, max_deg)
        A = span(tower, ga, max_deg + 1)
        B = span(tower, gb, max_deg + 1)
        if A.dim != dim or B.dim != dim:
            continue
        if not intersect(product(A, B), A).is_zero:
            continue
        rec = classify_linear_pair(A, B)
        rec.update(sample=len(records), attempt=attempts, dim=dim, a=A.to_json(), b=B.to_json())
        records.append(rec)
    fails = [r for r in records if not r["has_acyclic"]]
    discrepancies = [theorem_discrepancy("transcendental-acyclic", THM_TRANSCENDENTAL, r["certificate"])
                     for r in fails]
    discrepancies += [theorem_discrepancy("strong-matching-criterion", THM_STRONG, r["not_strong_certificate"])
                      for r in records if r.get("non_strong")]
    params = {"command": "linear-scan-acyclic", "tower": tower.descriptor(), "dim": max_dim, "samples": samples,
              "seed": seed, "max_deg": max_deg}
    for r in records:
        r.pop("certificate", None)
    return {
        "schema": "matchlab.scan-report/1",
        "kind": "linear-acyclic",
        "manifest": manifest(params),
        "tower": tower.descriptor(),
        "mode": "sampled",
        "attempts": attempts,
        "samples_accepted": len(records),
        "samples_with_acyclic": len(records) - len(fails),
        "verdict": {"status": "fails" if fails else "inconclusive",
                    "note": "sampled evidence never yields 'holds'"},
        "sample_records": records,
        "discrepancies": discrepancies,
    }
