"""``matchlab`` command line.

Exit codes: 0 completed, 2 completed with theorem-discrepancy certificates,
1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .certificates import CertificateError, group_no_acyclic, group_unmatchable, verify_certificate
from .fields import FieldError, parse_subspace, parse_tower
from .groups import GroupError, format_element, parse_group, validate_pair
from .kernels import BACKEND
from .matching import DEFAULT_CAP, acyclic_report, enumerate_matchings, find_matching
from .reporting import MergeError, make_header, merge_partials, now, partial_body, read_report, write_report

DEFAULT_MAX_PAIRS = 5_000_000


class UsageError(Exception):
    pass


# -- helpers -----------------------------------------------------------------------


def _parse_shard(text):
    if text is None:
        return None
    try:
        i, n = (int(x) for x in text.split("/"))
    except ValueError:
        raise UsageError(f"--shard expects i/N, got {text!r}") from None
    if not (n >= 1 and 0 <= i < n):
        raise UsageError("--shard needs 0 <= i < N")
    return i, n


def _parse_primes(text):
    """``2,3,5,7,11:5`` -> {2: 1, 3: 2, 5: 4, 7: 6, 11: 5}."""
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            p, k = part.split(":")
            out[int(p)] = int(k)
        else:
            out[int(part)] = int(part) - 1
    if not out:
        raise UsageError("empty prime list")
    return out


def _pair(args):
    g = parse_group(args.group)
    return validate_pair(g, g.parse_set(args.set_a), g.parse_set(args.set_b))


def _instance(pair):
    return pair.to_json()


def _stream_and_resume(args):
    stream = None
    if args.emit_pairs:
        if not args.out or args.out == "-":
            raise UsageError("--emit-pairs needs --out PATH")
        stream = args.out + ".pairs.jsonl"
    resume = None
    if args.resume:
        from .engine import load_stream

        resume, _ = load_stream(args.resume)
        if stream is None:
            stream = args.resume
    return stream, resume


def _group_pair_estimate(order: int, n_max: int, cyclic: bool) -> int:
    total = sum(math.comb(order, k) * math.comb(order - 1, k) for k in range(1, n_max + 1))
    if cyclic:
        units = sum(1 for u in range(1, order) if math.gcd(u, order) == 1)
        total = total // max(1, order * units)
    return total


def _check_feasible(estimate: int, what: str, limit: int):
    if estimate > limit:
        raise UsageError(f"{what}: about {estimate:,} pairs to classify, above the limit of {limit:,} "
                         "(raise --max-pairs to force)")


def _gaussian_binomial(q: int, d: int, n: int) -> int:
    num = den = 1
    for i in range(n):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


# -- commands ----------------------------------------------------------------------


def cmd_match(args):
    pair = _pair(args)
    body = {"schema": "matchlab.match-report/1", "kind": f"match-{args.action}", "instance": _instance(pair),
            "manifest": {"tool": "matchlab", "tool_version": __version__,
                         "parameters": {"command": f"match-{args.action}", "cap": args.cap}}}
    if args.action == "find":
        m = find_matching(pair)
        body["matching"] = m.to_json() if m else None
        if m is None:
            body["certificate"] = group_unmatchable(pair)
    elif args.action == "enumerate":
        ms, exhaustive = enumerate_matchings(pair, args.cap)
        body.update(count=len(ms), exhaustive=exhaustive, matchings=[m.to_json() for m in ms])
    else:
        rep = acyclic_report(pair, args.cap)
        g = pair.group
        body["status"] = rep.status
        body["classes"] = [{"fingerprint": fp.to_json(), "size": len(ms)} for fp, ms in rep.classes]
        body["acyclic_matchings"] = [m.to_json() for m in rep.acyclic_matchings]
        if rep.status == "no-acyclic":
            body["certificate"] = group_unmatchable(pair) if not rep.classes else group_no_acyclic(pair, rep)
        body["summary"] = {"A": [format_element(a) for a in pair.A], "B": [format_element(b) for b in pair.B],
                           "group": g.descriptor()}
    return body


def cmd_scan_group(args):
    from .scanner import build_group_report, scan_group

    g = parse_group(args.group)
    n_max = args.max_size if args.max_size is not None else g.order - 1
    _check_feasible(_group_pair_estimate(g.order, n_max, g.is_cyclic and args.mode != "exhaustive"),
                    f"scan of {g.descriptor()} up to size {n_max}", args.max_pairs)
    stream, resume = _stream_and_resume(args)
    shard = _parse_shard(args.shard)
    params, result = scan_group(g, n_max, args.mode, args.cap, properties=args.properties, workers=args.workers,
                                budget=args.budget, stream_path=stream, resume=resume, shard=shard,
                                return_result=True)
    if shard is not None:
        return partial_body(params, result, shard)
    return build_group_report(params, result, args.cap)


def cmd_scan_primes(args):
    from .scanner import classify_primes

    bounds = _parse_primes(args.primes)
    for p, k in bounds.items():
        _check_feasible(_group_pair_estimate(p, min(k, p - 1), True), f"Z/{p}", args.max_pairs)
    return classify_primes(bounds, 0, budget=args.budget, cap=args.cap, workers=args.workers)


def cmd_scan_free(args):
    from .scanner import scan_torsion_free

    return scan_torsion_free(args.rank, args.window, args.max_size, args.samples, args.seed, args.cap)


def _subspaces(args):
    tower = parse_tower(args.tower)
    A, sa = parse_subspace(tower, args.a)
    B, sb = parse_subspace(tower, args.b)
    if tower.transcendental:
        w = max(A.width, B.width)
        A, B = A.promote(w), B.promote(w)
    notes = {}
    if sa is not None:
        notes["a_scaled_by"] = tower.format(sa)
    if sb is not None:
        notes["b_scaled_by"] = tower.format(sb)
    return tower, A, B, notes


def cmd_linear_strong(args):
    import random

    from . import linalg
    from .linear import LinearMap, is_strong_matching, sampled_strong_matching, strong_matching_exists

    tower, A, B, notes = _subspaces(args)
    if A.dim != B.dim:
        raise UsageError("A and B must have the same dimension")
    K = tower.K
    crit = strong_matching_exists(A, B)
    body = {"schema": "matchlab.linear-report/1", "kind": "linear-strong-check", "tower": tower.descriptor(),
            "a": A.to_json(), "b": B.to_json(), "normalization": notes, "criterion_ab_meets_a_trivially": crit,
            "manifest": {"tool": "matchlab", "tool_version": __version__,
                         "parameters": {"command": "linear-strong-check", "samples": args.samples,
                                        "seed": args.seed}}}
    n = A.dim
    checks = []
    if K.is_finite:
        mats = sorted({linalg.normalize_scalar(m, K) for m in linalg.general_linear(K, n)})
        if len(mats) > args.samples:
            mats = sorted(random.Random(args.seed).sample(mats, args.samples))
        for m in mats:
            ok, basis = is_strong_matching(LinearMap(A, B, m))
            entry = {"map": [[K.to_json(x) for x in r] for r in m], "strong": ok}
            if not ok:
                from .linear_certificates import linear_not_strong

                entry["certificate"] = linear_not_strong(LinearMap(A, B, m), basis)
            checks.append(entry)
        body["mode"] = "exhaustive bases, " + ("all" if len(mats) <= args.samples else "sampled") + " isomorphisms"
    else:
        rng = random.Random(args.seed)
        while len(checks) < args.samples:
            m = tuple(tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(n))
            if linalg.rank(m, K) != n:
                continue
            ok, _ = sampled_strong_matching(LinearMap(A, B, m), 20, rng.randrange(2**31))
            checks.append({"map": [[K.to_json(x) for x in r] for r in m], "strong_on_sampled_bases": ok})
        body["mode"] = "sampled isomorphisms, sampled bases"
    body["isomorphisms"] = checks
    key = "strong" if K.is_finite else "strong_on_sampled_bases"
    body["strong_count"] = sum(c[key] for c in checks)
    body["isomorphisms_checked"] = len(checks)
    return body


def cmd_linear_matched(args):
    from .linear import basis_seq, find_matched_basis, is_matched_basis, is_matched_subspace, sampled_matched_subspace
    from .linear_certificates import linear_unmatched

    tower, A, B, notes = _subspaces(args)
    if A.dim != B.dim:
        raise UsageError("A and B must have the same dimension")
    K = tower.K
    body = {"schema": "matchlab.linear-report/1", "kind": "linear-matched-check", "tower": tower.descriptor(),
            "a": A.to_json(), "b": B.to_json(), "normalization": notes,
            "manifest": {"tool": "matchlab", "tool_version": __version__,
                         "parameters": {"command": "linear-matched-check", "samples": args.samples,
                                        "seed": args.seed}}}
    if args.basis_a:
        vecs = [tower.parse_element(t) for t in args.basis_a.split(",")]
        ba = basis_seq(A, vecs)
        bb = find_matched_basis(ba, B)
        body["basis_a"] = ba.to_json()
        body["matched_basis_b"] = bb.to_json() if bb else None
        if bb is not None:
            ok, cert = is_matched_basis(ba, bb)
            body["certificate"] = cert.to_json()
        return body
    if K.is_finite:
        res = is_matched_subspace(A, B)
        body["mode"] = "exhaustive over bases of A up to scaling"
    else:
        res = sampled_matched_subspace(A, B, args.samples, args.seed)
        body["mode"] = "sampled bases of A"
    body["bases_checked"] = res.bases_checked
    if res.matched:
        body["matched"] = True if K.is_finite else None
        body["status"] = "matched" if K.is_finite else "inconclusive"
    else:
        body["matched"] = False
        body["status"] = "not-matched"
        body["failing_basis_a"] = res.failing_basis.to_json()
        body["rado_subset"] = list(res.rado_subset)
        if K.is_finite:
            body["certificate"] = linear_unmatched(A, B, res.failing_basis, res.rado_subset)
    return body


def _linear_tower_feasible(args, n):
    tower = parse_tower(args.tower)
    if not tower.transcendental:
        count = _gaussian_binomial(tower.K.order, tower.degree, n)
        _check_feasible(count * count, f"{tower.descriptor()} at dim {n}", args.max_pairs)
    return tower


def cmd_linear_scan_property(args):
    from .linscan import build_property_report, linear_property_scan

    tower = _linear_tower_feasible(args, args.dim)
    stream, resume = _stream_and_resume(args)
    shard = _parse_shard(args.shard)
    params, result = linear_property_scan(tower, args.dim, workers=args.workers, budget=args.budget,
                                          stream_path=stream, resume=resume, shard=shard, return_result=True)
    if shard is not None:
        return partial_body(params, result, shard)
    return build_property_report(params, result)


def cmd_linear_scan_acyclic(args):
    from .linscan import acyclic_linear_scan

    tower = _linear_tower_feasible(args, args.dim)
    return acyclic_linear_scan(tower, args.dim, samples=args.samples, seed=args.seed, max_deg=args.max_deg,
                               workers=args.workers, budget=args.budget)


def cmd_linear_scan_strong(args):
    from .linscan import strong_theorem_scan

    tower = _linear_tower_feasible(args, args.dim)
    return strong_theorem_scan(tower, args.dim, args.samples, args.seed, workers=args.workers, budget=args.budget)


def cmd_verify(args):
    with open(args.certificate, encoding="utf-8") as fh:
        doc = json.load(fh)
    certs = _collect_certificates(doc)
    if not certs:
        raise UsageError("no certificate found in the file")
    results = []
    for path, cert in certs:
        ok, msg = verify_certificate(cert)
        results.append({"path": path, "kind": cert["kind"], "valid": ok, "message": msg})
    return {"schema": "matchlab.verify-report/1", "kind": "verify", "results": results,
            "all_valid": all(r["valid"] for r in results)}


def _collect_certificates(obj, path="$"):
    """Certificates in a document; nested evidence is checked by its parent."""
    if isinstance(obj, dict):
        if obj.get("schema") == "matchlab.certificate/1" and "kind" in obj:
            return [(path, obj)]
        out = []
        for k in sorted(obj):
            out += _collect_certificates(obj[k], f"{path}.{k}")
        return out
    if isinstance(obj, list):
        out = []
        for i, x in enumerate(obj):
            out += _collect_certificates(x, f"{path}[{i}]")
        return out
    return []


def cmd_merge(args):
    parts = [read_report(p) for p in args.partials]
    return merge_partials(parts)


# -- parser ------------------------------------------------------------------------


def _common(p, *, seed=False, pairs=False, sharding=False):
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--budget", type=float, default=None, help="wall-clock budget in seconds")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="matching enumeration cap per pair")
    p.add_argument("--out", default=None, help="report path (default stdout)")
    p.add_argument("--max-pairs", type=int, default=DEFAULT_MAX_PAIRS, help="feasibility limit")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if pairs:
        p.add_argument("--emit-pairs", action="store_true", help="stream per-pair records to OUT.pairs.jsonl")
        p.add_argument("--resume", default=None, help="resume from a JSONL pair stream")
    if sharding:
        p.add_argument("--shard", default=None, help="run shard i of N (i/N) and write a partial report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matchlab", description="Matchings in abelian groups and field extensions.")
    ap.add_argument("--version", action="version", version=f"matchlab {__version__} ({BACKEND} kernels)")
    sub = ap.add_subparsers(dest="command", required=True)

    match = sub.add_parser("match", help="single-pair group matching queries")
    msub = match.add_subparsers(dest="action", required=True)
    for name in ("find", "enumerate", "acyclic"):
        p = msub.add_parser(name)
        p.add_argument("--group", required=True, help="e.g. z7, z2xz4, free2")
        p.add_argument("--set-a", required=True)
        p.add_argument("--set-b", required=True)
        _common(p)
        p.set_defaults(func=cmd_match)

    scan = sub.add_parser("scan", help="group scans")
    ssub = scan.add_subparsers(dest="action", required=True)
    p = ssub.add_parser("group")
    p.add_argument("--group", required=True)
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--mode", choices=("symmetry_reduced", "exhaustive"), default="symmetry_reduced")
    p.add_argument("--properties", choices=("both", "matching"), default="both")
    _common(p, pairs=True, sharding=True)
    p.set_defaults(func=cmd_scan_group)
    p = ssub.add_parser("primes")
    p.add_argument("--primes", required=True, help="e.g. 2,3,5,7,11:5 (p:k caps the subset size)")
    _common(p)
    p.set_defaults(func=cmd_scan_primes)
    p = ssub.add_parser("free")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--max-size", type=int, default=5)
    p.add_argument("--samples", type=int, default=500)
    _common(p, seed=True)
    p.set_defaults(func=cmd_scan_free)

    lin = sub.add_parser("linear", help="linear matchings in field extensions")
    lsub = lin.add_subparsers(dest="action", required=True)
    for name, func in (("strong-check", cmd_linear_strong), ("matched-check", cmd_linear_matched)):
        p = lsub.add_parser(name)
        p.add_argument("--tower", required=True)
        p.add_argument("--a", required=True, help="comma-separated generators")
        p.add_argument("--b", required=True)
        p.add_argument("--samples", type=int, default=20)
        if name == "matched-check":
            p.add_argument("--basis-a", default=None, help="ordered basis of A; finds a matched basis of B")
        _common(p, seed=True)
        p.set_defaults(func=func)
    p = lsub.add_parser("scan-property")
    p.add_argument("--tower", required=True)
    p.add_argument("--dim", type=int, required=True)
    _common(p, pairs=True, sharding=True)
    p.set_defaults(func=cmd_linear_scan_property)
    p = lsub.add_parser("scan-acyclic")
    p.add_argument("--tower", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--max-deg", type=int, default=3)
    _common(p, seed=True)
    p.set_defaults(func=cmd_linear_scan_acyclic)
    p = lsub.add_parser("scan-strong")
    p.add_argument("--tower", required=True)
    p.add_argument("--dim", type=int, default=2, help="largest dimension")
    p.add_argument("--samples", type=int, default=20, help="isomorphisms per pair")
    _common(p, seed=True)
    p.set_defaults(func=cmd_linear_scan_strong)

    p = sub.add_parser("verify", help="re-check every certificate in a file")
    p.add_argument("--certificate", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify, workers=1)

    p = sub.add_parser("merge", help="merge partial reports written with --shard")
    p.add_argument("partials", nargs="+")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_merge, workers=1)
    return ap


def exit_code(body: dict) -> int:
    if body.get("kind") == "verify":
        return 0 if body["all_valid"] else 1
    return 2 if body.get("discrepancies") else 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    started = now()
    try:
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        body = args.func(args)
    except (UsageError, GroupError, FieldError, MergeError, CertificateError, ValueError, OSError) as exc:
        print(f"matchlab: error: {exc}", file=sys.stderr)
        return 1
    header = make_header(["matchlab", *argv], getattr(args, "workers", 1), started)
    write_report(args.out, body, header)
    code = exit_code(body)
    if code == 2:
        print("matchlab: theorem discrepancy recorded in the report", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
