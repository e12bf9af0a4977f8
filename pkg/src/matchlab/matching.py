"""Matchings between equal-size subsets of an abelian group.

A matching is a bijection ``f: A -> B`` with ``a + f(a)`` outside ``A``.  Its
fingerprint counts how often each group element occurs as ``a + f(a)``; a
matching is acyclic when no other matching of the pair shares its
fingerprint.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .groups import AbelianGroup, Element, SubsetPair, format_element

DEFAULT_CAP = 10_000


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[Element, Element], ...]

    def __iter__(self):
        return iter(self.pairs)

    def as_dict(self) -> dict[Element, Element]:
        return dict(self.pairs)

    def to_json(self) -> list:
        return [[list(a), list(b)] for a, b in self.pairs]

    @classmethod
    def from_json(cls, data) -> "Matching":
        return cls(tuple((tuple(a), tuple(b)) for a, b in data))


@dataclass(frozen=True)
class Fingerprint:
    """Exact element -> count map, stored as sorted items so equality is exact."""

    items: tuple[tuple[Element, int], ...]

    @classmethod
    def from_counts(cls, counts: dict[Element, int]) -> "Fingerprint":
        return cls(tuple(sorted((x, c) for x, c in counts.items() if c)))

    def __getitem__(self, x: Element) -> int:
        return dict(self.items).get(x, 0)

    def total(self) -> int:
        return sum(c for _, c in self.items)

    def to_json(self) -> dict[str, int]:
        return {format_element(x): c for x, c in self.items}


@dataclass(frozen=True)
class AcyclicReport:
    classes: tuple[tuple[Fingerprint, tuple[Matching, ...]], ...]
    acyclic_matchings: tuple[Matching, ...]
    exhaustive: bool

    @property
    def status(self) -> str:
        if not self.exhaustive:
            return "inconclusive"
        return "has-acyclic" if self.acyclic_matchings else "no-acyclic"


class PairStatus(NamedTuple):
    """Compact classification used by the scanners."""

    matching_count: int
    exhaustive: bool
    has_acyclic: bool | None  # None when the enumeration hit the cap
    witness: tuple[int, ...] | None  # column indices into pair.B
    classes: int


def allowed_edge(g: AbelianGroup, A: Iterable[Element], a: Element, b: Element) -> bool:
    return g.add(a, b) not in set(A)


def sum_table(pair: SubsetPair) -> list[list[Element]]:
    g = pair.group
    return [[g.add(a, b) for b in pair.B] for a in pair.A]


def edge_data(pair: SubsetPair) -> tuple[np.ndarray, np.ndarray]:
    """Allowed-edge matrix and sum-id matrix of a pair.

    Sum ids are ranks in the sorted list of distinct sums, so comparing
    sorted id rows is the same as comparing fingerprints.
    """
    g = pair.group
    k = pair.size
    if g.is_cyclic:
        n = g.torsion_factors[0]
        a = np.fromiter((x[0] for x in pair.A), dtype=np.int64, count=k)
        b = np.fromiter((x[0] for x in pair.B), dtype=np.int64, count=k)
        sums = (a[:, None] + b[None, :]) % n
        allowed = np.ascontiguousarray(~np.isin(sums, a), dtype=np.uint8)
        return allowed, sums
    table = sum_table(pair)
    aset = set(pair.A)
    allowed = np.array([[s not in aset for s in row] for row in table], dtype=np.uint8)
    ids = {s: i for i, s in enumerate(sorted({s for row in table for s in row}))}
    sums = np.array([[ids[s] for s in row] for row in table], dtype=np.int64)
    return np.ascontiguousarray(allowed), sums


def _to_matching(pair: SubsetPair, perm: Sequence[int]) -> Matching:
    return Matching(tuple((a, pair.B[j]) for a, j in zip(pair.A, perm)))


def find_matching(pair: SubsetPair) -> Matching | None:
    if pair.zero_in_B:
        return None
    allowed, _ = edge_data(pair)
    perm = kernels.find_perfect(allowed)
    return None if perm is None else _to_matching(pair, perm)


def enumerate_matchings(pair: SubsetPair, cap: int = DEFAULT_CAP) -> tuple[list[Matching], bool]:
    """Matchings in canonical order; the flag is False when ``cap`` was hit."""
    if cap < 1:
        raise ValueError("cap must be positive")
    allowed, _ = edge_data(pair)
    perms, exhaustive = kernels.enumerate_perfect(allowed, cap)
    return [_to_matching(pair, p) for p in perms.tolist()], exhaustive


def fingerprint(g: AbelianGroup, A: Iterable[Element], f: Matching) -> Fingerprint:
    return Fingerprint.from_counts(Counter(g.add(a, b) for a, b in f.pairs))


def _group_rows(perms: np.ndarray, sums: np.ndarray):
    k = sums.shape[0]
    rows = np.sort(sums[np.arange(k)[None, :], perms], axis=1)
    _, inverse, counts = np.unique(rows, axis=0, return_inverse=True, return_counts=True)
    return inverse.reshape(-1), counts


def classify_pair(pair: SubsetPair, cap: int = DEFAULT_CAP) -> PairStatus:
    """Count matchings and decide whether an acyclic one exists."""
    allowed, sums = edge_data(pair)
    if pair.zero_in_B:
        return PairStatus(0, True, False, None, 0)
    perms, exhaustive = kernels.enumerate_perfect(allowed, cap)
    m = perms.shape[0]
    if m == 0:
        return PairStatus(0, True, False, None, 0)
    if not exhaustive:
        return PairStatus(m, False, None, None, 0)
    inverse, counts = _group_rows(perms, sums)
    singles = np.flatnonzero(counts[inverse] == 1)
    if singles.size:
        return PairStatus(m, True, True, tuple(perms[singles[0]].tolist()), len(counts))
    return PairStatus(m, True, False, None, len(counts))


def acyclic_report(pair: SubsetPair, cap: int = DEFAULT_CAP) -> AcyclicReport:
    matchings, exhaustive = enumerate_matchings(pair, cap)
    if not exhaustive:
        return AcyclicReport((), (), False)
    g = pair.group
    prints = [fingerprint(g, pair.A, f) for f in matchings]
    groups: dict[Fingerprint, list[Matching]] = {}
    for fp, f in zip(prints, matchings):
        groups.setdefault(fp, []).append(f)
    classes = tuple((fp, tuple(ms)) for fp, ms in groups.items())
    acyclic = tuple(f for fp, f in zip(prints, matchings) if len(groups[fp]) == 1)
    return AcyclicReport(classes, acyclic, True)


def is_valid_matching(pair: SubsetPair, f: Matching) -> bool:
    if sorted(a for a, _ in f.pairs) != list(pair.A) or sorted(b for _, b in f.pairs) != list(pair.B):
        return False
    aset = set(pair.A)
    return all(pair.group.add(a, b) not in aset for a, b in f.pairs)


def hall_violator(pair: SubsetPair) -> list[Element] | None:
    """A subset S of A whose allowed neighbourhood is smaller than S.

    Exists exactly when no matching exists (Hall).  Found from a maximum
    matching as the rows reachable by alternating paths from a free row.
    """
    allowed, _ = edge_data(pair)
    k = pair.size
    owner = [-1] * k
    match_row = [-1] * k

    def augment(i, seen):
        for j in range(k):
            if allowed[i, j] and not seen[j]:
                seen[j] = True
                if owner[j] < 0 or augment(owner[j], seen):
                    owner[j] = i
                    match_row[i] = j
                    return True
        return False

    free = None
    for i in range(k):
        if not augment(i, [False] * k) and free is None:
            free = i
    if free is None:
        return None
    rows, cols, stack = {free}, set(), [free]
    while stack:
        i = stack.pop()
        for j in range(k):
            if allowed[i, j] and j not in cols:
                cols.add(j)
                if owner[j] >= 0 and owner[j] not in rows:
                    rows.add(owner[j])
                    stack.append(owner[j])
    return [pair.A[i] for i in sorted(rows)]


def neighbourhood(pair: SubsetPair, S: Iterable[Element]) -> list[Element]:
    aset = set(pair.A)
    g = pair.group
    return sorted({b for a in S for b in pair.B if g.add(a, b) not in aset})
