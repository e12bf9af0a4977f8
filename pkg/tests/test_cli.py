import json

import pytest

from matchlab.cli import main
from matchlab.reporting import body_text


def run(tmp_path, name, *argv):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    body = json.loads(out.read_text())["body"] if out.exists() else None
    return code, body, out


def test_match_find_reports_no_matching(tmp_path):
    code, body, _ = run(tmp_path, "m.json", "match", "find", "--group", "z4", "--set-a", "0,2", "--set-b", "1,2")
    assert code == 0
    assert body["matching"] is None
    assert body["certificate"]["kind"] == "group-unmatchable"


def test_match_enumerate_and_acyclic(tmp_path):
    code, body, _ = run(tmp_path, "e.json", "match", "enumerate", "--group", "z7", "--set-a", "0,1,3",
                        "--set-b", "1,2,4")
    assert code == 0 and body["exhaustive"] and body["count"] == len(body["matchings"]) > 0
    code, body, _ = run(tmp_path, "a.json", "match", "acyclic", "--group", "z7", "--set-a", "0,1,3",
                        "--set-b", "1,2,4")
    assert body["status"] == "no-acyclic" and body["certificate"]["kind"] == "group-no-acyclic"


def test_scan_then_verify(tmp_path):
    code, body, out = run(tmp_path, "z6.json", "scan", "group", "--group", "z6")
    assert code == 0
    assert body["verdicts"]["matching_property"]["status"] == "fails"
    code, vbody, _ = run(tmp_path, "v.json", "verify", "--certificate", str(out))
    assert code == 0 and vbody["all_valid"] and len(vbody["results"]) >= 1


def test_verify_rejects_forged(tmp_path):
    run(tmp_path, "m.json", "match", "find", "--group", "z4", "--set-a", "0,2", "--set-b", "1,2")
    doc = json.loads((tmp_path / "m.json").read_text())
    doc["body"]["certificate"]["instance"]["b"] = [[1], [3]]
    (tmp_path / "f.json").write_text(json.dumps(doc))
    code, vbody, _ = run(tmp_path, "v.json", "verify", "--certificate", str(tmp_path / "f.json"))
    assert code == 1 and not vbody["all_valid"]


def test_scan_group_z5_holds(tmp_path):
    code, body, _ = run(tmp_path, "z5.json", "scan", "group", "--group", "z5", "--max-size", "4")
    assert code == 0 and body["verdicts"]["matching_property"]["status"] == "holds"


def test_workers_and_repeat_give_identical_bodies(tmp_path):
    run(tmp_path, "a.json", "scan", "group", "--group", "z7", "--workers", "1")
    run(tmp_path, "b.json", "scan", "group", "--group", "z7", "--workers", "2")
    run(tmp_path, "c.json", "scan", "group", "--group", "z7")
    a, b, c = (body_text(tmp_path / n) for n in ("a.json", "b.json", "c.json"))
    assert a == b == c


def test_shard_and_merge(tmp_path):
    run(tmp_path, "full.json", "scan", "group", "--group", "z7")
    for i in range(2):
        run(tmp_path, f"p{i}.json", "scan", "group", "--group", "z7", "--shard", f"{i}/2")
    code, _, out = run(tmp_path, "merged.json", "merge", str(tmp_path / "p1.json"), str(tmp_path / "p0.json"))
    assert code == 0
    assert body_text(out) == body_text(tmp_path / "full.json")


def test_merge_rejects_mixed_manifests(tmp_path):
    run(tmp_path, "p0.json", "scan", "group", "--group", "z7", "--shard", "0/2")
    run(tmp_path, "q1.json", "scan", "group", "--group", "z7", "--shard", "1/2", "--cap", "50")
    code, body, _ = run(tmp_path, "m.json", "merge", str(tmp_path / "p0.json"), str(tmp_path / "q1.json"))
    assert code == 1 and body is None


def test_emit_pairs_and_resume(tmp_path):
    run(tmp_path, "full.json", "scan", "group", "--group", "z7", "--emit-pairs")
    stream = tmp_path / "full.json.pairs.jsonl"
    lines = stream.read_text().splitlines()
    assert any("unit_done" in ln for ln in lines)
    cut = tmp_path / "cut.jsonl"
    cut.write_text("\n".join(lines[: len(lines) // 3]) + "\n")
    code, _, out = run(tmp_path, "resumed.json", "scan", "group", "--group", "z7", "--resume", str(cut))
    assert code == 0 and body_text(out) == body_text(tmp_path / "full.json")


def test_primes_syntax(tmp_path):
    code, body, _ = run(tmp_path, "p.json", "scan", "primes", "--primes", "2,3,5:3")
    assert code == 0
    assert [(e["p"], e["max_size"]) for e in body["primes"]] == [(2, 1), (3, 2), (5, 3)]


def test_free_scan(tmp_path):
    code, body, _ = run(tmp_path, "f.json", "scan", "free", "--samples", "30", "--seed", "2")
    assert code == 0
    assert body["verdicts"]["acyclic_matching_property"]["status"] == "inconclusive"


def test_linear_commands(tmp_path):
    T = "gf(2^4):x^4+x+1"
    code, body, _ = run(tmp_path, "s.json", "linear", "strong-check", "--tower", T, "--a", "1,x", "--b", "x^2,x^3")
    assert code == 0 and body["isomorphisms_checked"] == 6
    code, body, _ = run(tmp_path, "m.json", "linear", "matched-check", "--tower", "gf(2^2)", "--a", "x", "--b", "1")
    assert body["status"] == "not-matched" and body["certificate"]["kind"] == "linear-unmatched"
    code, body, out = run(tmp_path, "p.json", "linear", "scan-property", "--tower", T, "--dim", "2")
    assert code == 0 and body["verdict"]["status"] == "fails"
    code, vbody, _ = run(tmp_path, "v.json", "verify", "--certificate", str(out))
    assert vbody["all_valid"]
    code, body, _ = run(tmp_path, "a.json", "linear", "scan-acyclic", "--tower", "fp(2)(t)", "--dim", "2",
                        "--max-deg", "3", "--samples", "5", "--seed", "7")
    assert body["samples_accepted"] == 5


def test_strong_scan_discrepancy_exit_code(tmp_path):
    code, body, _ = run(tmp_path, "s.json", "linear", "scan-strong", "--tower", "gf(2^4)", "--dim", "2")
    assert (code == 2) == bool(body["discrepancies"])


@pytest.mark.parametrize("argv", [
    ["scan", "group", "--group", "zz"],
    ["scan", "group", "--group", "z30", "--max-size", "15"],
    ["linear", "scan-property", "--tower", "gf(2^9)", "--dim", "4"],
    ["scan", "group", "--group", "z7", "--shard", "3/2"],
    ["match", "find", "--group", "z4", "--set-a", "0", "--set-b", "1,2"],
    ["bogus"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 1
