"""Exhaustive and symmetry-reduced scans of all admissible pairs in a group.

For a cyclic group the affine maps ``(A, B) -> (cA + t, cB)`` with ``c`` a
unit preserve matchability, matching counts and fingerprint class sizes, so
``symmetry_reduced`` mode classifies one representative per orbit and
weights it by the orbit size.
"""

from __future__ import annotations

import random
from itertools import combinations
from math import comb
from typing import NamedTuple, Sequence

from . import __version__
from . import certificates as certs
from .engine import RunResult, run_units
from .groups import AbelianGroup, Element, SubsetPair, parse_group, validate_pair
from .matching import DEFAULT_CAP, acyclic_report, classify_pair, find_matching

MODES = ("exhaustive", "symmetry_reduced", "sampled")
THM_MATCHING = "matching property <=> G torsion-free or Z/p"
THM_TORSION_FREE = "G torsion-free => acyclic matching property"
MAX_LISTED_ORBITS = 100


class PairKey(NamedTuple):
    b: tuple[Element, ...]
    a: tuple[Element, ...]


def _affine(n: int, c: int, t: int, xs) -> tuple[Element, ...]:
    return tuple(sorted(((c * x[0] + t) % n,) for x in xs))


def canonicalize_pair(g: AbelianGroup, pair: SubsetPair) -> PairKey:
    """Least image of the pair under translation of A and unit scaling.

    Keys compare ``B`` first, then ``A``.  Groups that are not cyclic get
    the identity key.
    """
    if not g.is_cyclic:
        return PairKey(pair.B, pair.A)
    n = g.torsion_factors[0]
    best = None
    for c in g.units():
        b = _affine(n, c, 0, pair.B)
        if best is not None and b > best.b:
            continue
        a = min(_affine(n, c, t, pair.A) for t in range(n))
        cand = PairKey(b, a)
        if best is None or cand < best:
            best = cand
    return best


def total_pairs(order: int, k: int) -> int:
    return comb(order, k) * comb(order - 1, k)


def predicted_matching_property(g: AbelianGroup) -> bool:
    if not g.is_finite:
        return not g.torsion_factors
    if not g.is_cyclic:
        return False
    n = g.torsion_factors[0]
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


# -- per-pair classification -------------------------------------------------


def classify_record(pair: SubsetPair, props: str, cap: int) -> dict:
    rec = {
        "size": pair.size,
        "a": [list(x) for x in pair.A],
        "b": [list(x) for x in pair.B],
    }
    if props == "matching":
        f = find_matching(pair)
        rec.update(matchable=f is not None, matching_count=None, enumeration_exhaustive=None,
                   has_acyclic=None, witness=f.to_json() if f else None)
        return rec
    st = classify_pair(pair, cap)
    witness = None
    if st.witness is not None:
        witness = [[list(a), list(pair.B[j])] for a, j in zip(pair.A, st.witness)]
    elif st.matching_count:
        f = find_matching(pair)
        witness = f.to_json() if f else None
    rec.update(matchable=st.matching_count > 0, matching_count=st.matching_count,
               enumeration_exhaustive=st.exhaustive, has_acyclic=st.has_acyclic, witness=witness)
    return rec


# -- unit planning -----------------------------------------------------------


def plan_units(g: AbelianGroup, n_max: int, mode: str) -> list[tuple]:
    desc = g.descriptor()
    nonzero = [x for x in g.elements() if x != g.zero]
    units = []
    for k in range(1, n_max + 1):
        for B in combinations(nonzero, k):
            if mode == "symmetry_reduced" and g.is_cyclic:
                n = g.torsion_factors[0]
                if any(_affine(n, c, 0, B) < B for c in g.units()):
                    continue
            units.append((f"{k}:{'/'.join(','.join(map(str, x)) for x in B)}", desc, k, B, mode))
    return units


def _scan_unit(unit) -> list[dict]:
    uid, desc, k, B, mode, props, cap = unit
    g = parse_group(desc)
    elements = g.elements()
    out = []
    if mode == "symmetry_reduced" and g.is_cyclic:
        n = g.torsion_factors[0]
        units = g.units()
        stab_b = [c for c in units if _affine(n, c, 0, B) == B]
        group_size = n * len(units)
        for rest in combinations(elements[1:], k - 1):
            A = ((0,),) + rest
            stab = 0
            canonical = True
            for c in stab_b:
                for t in range(n):
                    img = _affine(n, c, t, A)
                    if img < A:
                        canonical = False
                        break
                    stab += img == A
                if not canonical:
                    break
            if not canonical:
                continue
            rec = classify_record(validate_pair(g, A, B), props, cap)
            rec.update(unit=uid, orbit_size=group_size // stab)
            out.append(rec)
    else:
        for A in combinations(elements, k):
            rec = classify_record(validate_pair(g, A, B), props, cap)
            rec.update(unit=uid, orbit_size=1)
            out.append(rec)
    return out


# -- report assembly ---------------------------------------------------------


def _record_key(rec) -> tuple:
    return (rec["size"], [tuple(x) for x in rec["b"]], [tuple(x) for x in rec["a"]])


def _pair_of(g, rec) -> SubsetPair:
    return validate_pair(g, [tuple(x) for x in rec["a"]], [tuple(x) for x in rec["b"]])


def _key_json(key: PairKey) -> dict:
    return {"a": [list(x) for x in key.a], "b": [list(x) for x in key.b]}


def build_group_report(params: dict, result: RunResult, cap: int) -> dict:
    """Aggregate sorted per-pair records into a report body."""
    g = parse_group(params["group"])
    records = sorted(result.records, key=_record_key)
    n_max, props = params["max_size"], params["properties"]
    order = g.order
    sizes = []
    failing = {"matching": {}, "acyclic": {}}
    for k in range(1, n_max + 1):
        recs = [r for r in records if r["size"] == k]
        row = {
            "size": k,
            "pairs_total": total_pairs(order, k),
            "pairs_covered": sum(r["orbit_size"] for r in recs),
            "classified": len(recs),
            "unmatchable_pairs": sum(r["orbit_size"] for r in recs if not r["matchable"]),
        }
        if props == "both":
            row["no_acyclic_pairs"] = sum(r["orbit_size"] for r in recs if r["has_acyclic"] is False)
            row["inconclusive_pairs"] = sum(r["orbit_size"] for r in recs if r["has_acyclic"] is None)
            row["max_matching_count"] = max((r["matching_count"] for r in recs), default=0)
        for prop, bad in (("matching", lambda r: not r["matchable"]), ("acyclic", lambda r: r["has_acyclic"] is False)):
            if prop == "acyclic" and props != "both":
                continue
            keys = sorted({canonicalize_pair(g, _pair_of(g, r)) for r in recs if bad(r)})
            if keys:
                failing[prop][k] = keys
        sizes.append(row)

    full = result.complete and all(r["pairs_covered"] == r["pairs_total"] for r in sizes)
    verdicts = {"matching_property": _verdict(g, failing["matching"], full, cap, "matching")}
    if props == "both":
        undecided = any(r["inconclusive_pairs"] for r in sizes)
        verdicts["acyclic_matching_property"] = _verdict(g, failing["acyclic"], full and not undecided, cap, "acyclic")

    counterexamples = []
    for prop, per_size in failing.items():
        for k, keys in per_size.items():
            counterexamples.append({
                "property": prop,
                "size": k,
                "failing_orbits": len(keys),
                "orbits": [_key_json(key) for key in keys[:MAX_LISTED_ORBITS]],
            })

    discrepancies = []
    predicted = predicted_matching_property(g)
    status = verdicts["matching_property"]["status"]
    if predicted and status == "fails":
        discrepancies.append(certs.theorem_discrepancy(
            "matching-property-classification", THM_MATCHING, verdicts["matching_property"]["certificate"]))
    elif not predicted and status == "holds" and n_max >= order - 1:
        discrepancies.append({"schema": certs.SCHEMA, "kind": "theorem-discrepancy",
                              "theorem": "matching-property-classification", "claim": THM_MATCHING,
                              "evidence": {"exhaustive_scan": params["group"], "max_size": n_max}})

    orbit_stats = {
        "mode": params["mode"],
        "classified_per_size": [r["classified"] for r in sizes],
        "covered_per_size": [r["pairs_covered"] for r in sizes],
    }
    return {
        "schema": "matchlab.scan-report/1",
        "kind": "group-scan",
        "manifest": manifest(params),
        "group": params["group"],
        "n_max": n_max,
        "mode": params["mode"],
        "coverage": {
            "complete": full,
            "units_total": result.units_total,
            "units_done": len(result.units_done),
            "budget_exceeded": result.budget_exceeded,
        },
        "predicted_matching_property": "holds" if predicted else "fails",
        "verdicts": verdicts,
        "per_size": sizes,
        "orbit_statistics": orbit_stats,
        "counterexamples": counterexamples,
        "discrepancies": discrepancies,
    }


def _verdict(g, failing: dict, full: bool, cap: int, prop: str) -> dict:
    if failing:
        k = min(failing)
        key = failing[k][0]
        pair = validate_pair(g, key.a, key.b)
        if prop == "matching":
            cert = certs.group_unmatchable(pair)
        else:
            rep = acyclic_report(pair, cap)
            cert = certs.group_unmatchable(pair) if not rep.classes else certs.group_no_acyclic(pair, rep)
        return {"status": "fails", "witness": {"size": k, **_key_json(key)}, "certificate": cert}
    return {"status": "holds" if full else "inconclusive"}


def manifest(params: dict) -> dict:
    return {"tool": "matchlab", "tool_version": __version__, "parameters": params, "seed": params.get("seed")}


def scan_group(
    g: AbelianGroup | str,
    n_max: int,
    mode: str = "symmetry_reduced",
    cap: int = DEFAULT_CAP,
    *,
    properties: str = "both",
    workers: int = 1,
    budget: float | None = None,
    stream_path=None,
    resume=None,
    shard=None,
    return_result: bool = False,
):
    if isinstance(g, str):
        g = parse_group(g)
    if not g.is_finite:
        raise ValueError("scan_group needs a finite group; use scan_torsion_free")
    if not 1 <= n_max <= g.order - 1:
        raise ValueError(f"n_max must be in 1..{g.order - 1}")
    if mode not in ("exhaustive", "symmetry_reduced"):
        raise ValueError(f"mode {mode!r} not supported for finite scans")
    if properties not in ("both", "matching"):
        raise ValueError("properties must be 'both' or 'matching'")
    eff_mode = mode if g.is_cyclic else "exhaustive"
    params = {"command": "scan-group", "group": g.descriptor(), "max_size": n_max, "mode": eff_mode,
              "cap": cap, "properties": properties}
    units = [u + (properties, cap) for u in plan_units(g, n_max, eff_mode)]
    result = run_units(_scan_unit, units, workers=workers, budget=budget, stream_path=stream_path,
                       resume=resume, shard=shard)
    if return_result:
        return params, result
    return build_group_report(params, result, cap)


# -- primes ------------------------------------------------------------------


def classify_primes(
    primes: Sequence[int] | dict[int, int],
    n_max: int,
    budget: float | None = None,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> dict:
    """Acyclic-property verdict for each Z/p up to the given subset size.

    ``primes`` may map a prime to its own size bound.
    """
    bounds = dict(primes) if isinstance(primes, dict) else {p: n_max for p in primes}
    entries = []
    for p in sorted(bounds):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        size = min(bounds[p], p - 1)
        rep = scan_group(AbelianGroup((p,)), size, "symmetry_reduced", cap, workers=workers, budget=budget)
        acyc = rep["verdicts"]["acyclic_matching_property"]
        entries.append({
            "p": p,
            "max_size": size,
            "full_range": size == p - 1,
            "acyclic_verdict": acyc["status"],
            "witness": acyc.get("witness"),
            "certificate": acyc.get("certificate"),
            "matching_verdict": rep["verdicts"]["matching_property"]["status"],
            "per_size": [{"size": r["size"], "no_acyclic_pairs": r["no_acyclic_pairs"],
                          "pairs_total": r["pairs_total"], "inconclusive_pairs": r["inconclusive_pairs"]}
                         for r in rep["per_size"]],
        })
    params = {"command": "scan-primes", "primes": {str(p): bounds[p] for p in sorted(bounds)}, "cap": cap}
    discrepancies = [d for e in entries for d in ([] if e["matching_verdict"] != "fails" else [
        certs.theorem_discrepancy("matching-property-classification", THM_MATCHING, {"p": e["p"]})])]
    return {
        "schema": "matchlab.scan-report/1",
        "kind": "prime-classification",
        "manifest": manifest(params),
        "mode": "symmetry_reduced",
        "primes": entries,
        "discrepancies": discrepancies,
    }


# -- torsion-free sampling ---------------------------------------------------


def sample_free_pair(rng: random.Random, rank: int, window: int, max_size: int) -> tuple[list, list]:
    k = rng.randint(1, max_size)
    side = 2 * window + 1
    total = side**rank

    def point(i):
        out = []
        for _ in range(rank):
            i, r = divmod(i, side)
            out.append(r - window)
        return tuple(out)

    zero_index = sum(window * side**j for j in range(rank))
    A = [point(i) for i in rng.sample(range(total), k)]
    B = [point(i) for i in rng.sample([i for i in range(total) if i != zero_index], k)]
    return A, B


def scan_torsion_free(
    rank: int = 1,
    window: int = 10,
    max_size: int = 5,
    samples: int = 500,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
) -> dict:
    if rank < 1:
        raise ValueError("rank must be >= 1")
    if (2 * window + 1) ** rank - 1 < max_size:
        raise ValueError("window too small for the requested sizes")
    g = AbelianGroup((), rank)
    rng = random.Random(seed)
    records = []
    failures = []
    for idx in range(samples):
        A, B = sample_free_pair(rng, rank, window, max_size)
        pair = validate_pair(g, A, B)
        rec = classify_record(pair, "both", cap)
        rec["sample"] = idx
        records.append(rec)
        if rec["has_acyclic"] is False:
            rep = acyclic_report(pair, cap)
            inner = certs.group_unmatchable(pair) if not rep.classes else certs.group_no_acyclic(pair, rep)
            failures.append(certs.theorem_discrepancy("torsion-free-acyclic", THM_TORSION_FREE, inner))
    ok = sum(r["has_acyclic"] is True for r in records)
    undecided = sum(r["has_acyclic"] is None for r in records)
    params = {"command": "scan-free", "rank": rank, "window": window, "max_size": max_size,
              "samples": samples, "seed": seed, "cap": cap}
    status = "fails" if failures else "inconclusive"
    return {
        "schema": "matchlab.scan-report/1",
        "kind": "free-sample",
        "manifest": manifest(params),
        "group": g.descriptor(),
        "mode": "sampled",
        "verdicts": {
            "acyclic_matching_property": {
                "status": status,
                "sampled_pairs": samples,
                "with_acyclic_matching": ok,
                "undecided": undecided,
                "note": "sampled evidence never yields 'holds'",
            }
        },
        "sample_records": records,
        "discrepancies": failures,
    }
