"""Report files, partial reports and merging.

A report file holds two blocks.  ``header`` carries run-specific data
(timestamps, argv, worker count).  ``body`` is a pure function of the
manifest and is serialized canonically, so two runs with the same
parameters write byte-identical bodies.
"""

from __future__ import annotations

import datetime as _dt
import json
import sys

from . import __version__
from .engine import RunResult

PARTIAL_SCHEMA = "matchlab.partial/1"


class MergeError(ValueError):
    pass


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False)


def now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def make_header(argv=None, workers: int = 1, started: str | None = None) -> dict:
    return {
        "tool": "matchlab",
        "tool_version": __version__,
        "argv": list(sys.argv if argv is None else argv),
        "workers": workers,
        "started": started or now(),
        "finished": now(),
    }


def render(body: dict, header: dict) -> str:
    # the body is emitted as its own canonical block so it can be compared verbatim
    return '{\n"header": ' + json.dumps(header, sort_keys=True) + ',\n"body": ' + canonical(body) + "\n}\n"


def write_report(path, body: dict, header: dict) -> None:
    text = render(body, header)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return doc["body"] if "body" in doc else doc


def body_text(path) -> str:
    """Canonical body text of a report file, for byte comparisons."""
    return canonical(read_report(path))


# -- partials ----------------------------------------------------------------------


def partial_body(params: dict, result: RunResult, shard: tuple[int, int]) -> dict:
    from .scanner import manifest

    return {
        "schema": PARTIAL_SCHEMA,
        "manifest": manifest(params),
        "shard": {"index": shard[0], "count": shard[1]},
        "units_total": result.units_total,
        "units_done": sorted(result.units_done),
        "budget_exceeded": result.budget_exceeded,
        "records": sorted(result.records, key=canonical),
    }


def _builders():
    from .linscan import build_property_report
    from .scanner import build_group_report

    return {
        "scan-group": lambda p, r: build_group_report(p, r, p["cap"]),
        "linear-scan-property": build_property_report,
    }


def merge_partials(partials: list[dict]) -> dict:
    """Combine shard reports into the report a single run would produce."""
    if not partials:
        raise MergeError("nothing to merge")
    for p in partials:
        if p.get("schema") != PARTIAL_SCHEMA:
            raise MergeError("only partial reports (written with --shard) can be merged")
    man = partials[0]["manifest"]
    for p in partials[1:]:
        if p["manifest"] != man:
            raise MergeError("partials come from different manifests")
    # a missing shard leaves pairs uncovered, which the builders report as inconclusive
    counts = {p["shard"]["count"] for p in partials}
    if len(counts) != 1:
        raise MergeError("partials disagree on the shard count")
    indices = [p["shard"]["index"] for p in partials]
    if len(set(indices)) != len(indices):
        raise MergeError("duplicate shard")
    params = man["parameters"]
    builder = _builders().get(params["command"])
    if builder is None:
        raise MergeError(f"command {params['command']!r} does not produce mergeable partials")
    records, done = [], []
    for p in sorted(partials, key=lambda q: q["shard"]["index"]):
        records += p["records"]
        done += p["units_done"]
    total = sum(p["units_total"] for p in partials)
    result = RunResult(records=records, units_done=done, units_total=total,
                       budget_exceeded=any(p["budget_exceeded"] for p in partials))
    return builder(params, result)
