"""Deterministic work-unit runner shared by all scanners.

A scan is planned as an ordered list of independent units.  Units run
serially or in a process pool, may be sharded, streamed to JSONL and resumed;
the caller always sorts the merged records, so the result does not depend on
scheduling.
"""

from __future__ import annotations

import json
import multiprocessing as mp
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence


@dataclass
class RunResult:
    records: list[dict] = field(default_factory=list)
    units_done: list[str] = field(default_factory=list)
    units_total: int = 0
    budget_exceeded: bool = False

    @property
    def complete(self) -> bool:
        return len(self.units_done) == self.units_total and not self.budget_exceeded


def load_stream(path) -> tuple[dict[str, list[dict]], set[str]]:
    """Records per unit from a JSONL pair stream; only finished units count."""
    per_unit: dict[str, list[dict]] = {}
    done: set[str] = set()
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    break  # torn final line from an interrupted run
                if "unit_done" in obj:
                    done.add(obj["unit_done"])
                else:
                    per_unit.setdefault(obj["unit"], []).append(obj)
    except FileNotFoundError:
        pass
    return {u: per_unit.get(u, []) for u in done}, done


def _call(args):
    func, unit = args
    return unit[0], func(unit)


def run_units(
    func: Callable[[tuple], list[dict]],
    units: Sequence[tuple],
    *,
    workers: int = 1,
    budget: float | None = None,
    stream_path=None,
    resume: dict[str, list[dict]] | None = None,
    shard: tuple[int, int] | None = None,
) -> RunResult:
    """Run ``func`` on every unit; ``unit[0]`` is its string id.

    ``func`` must be a module-level function so it can be pickled.
    """
    if shard is not None:
        i, n = shard
        units = [u for idx, u in enumerate(units) if idx % n == i]
    result = RunResult(units_total=len(units))
    resume = resume or {}
    pending = []
    for u in units:
        if u[0] in resume:
            result.records.extend(resume[u[0]])
            result.units_done.append(u[0])
        else:
            pending.append(u)

    stream = open(stream_path, "a", encoding="utf-8") if stream_path else None
    start = time.monotonic()

    def accept(uid: str, recs: list[dict]) -> None:
        result.records.extend(recs)
        result.units_done.append(uid)
        if stream:
            for r in recs:
                stream.write(json.dumps(r, sort_keys=True) + "\n")
            stream.write(json.dumps({"unit_done": uid}) + "\n")
            stream.flush()

    def over_budget() -> bool:
        return budget is not None and time.monotonic() - start > budget

    try:
        if workers <= 1 or len(pending) <= 1:
            for u in pending:
                if over_budget():
                    result.budget_exceeded = True
                    break
                accept(u[0], func(u))
        else:
            ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
            with ctx.Pool(workers) as pool:
                for uid, recs in pool.imap(_call, [(func, u) for u in pending], chunksize=1):
                    accept(uid, recs)
                    if over_budget() and len(result.units_done) < len(units):
                        result.budget_exceeded = True
                        pool.terminate()
                        break
    finally:
        if stream:
            stream.close()
    return result


def chunked(items: Iterable[Any], size: int) -> list[list[Any]]:
    out: list[list[Any]] = []
    for x in items:
        if not out or len(out[-1]) == size:
            out.append([])
        out[-1].append(x)
    return out
