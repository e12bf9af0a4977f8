"""Finitely generated abelian groups and validated subset pairs.

A group is ``Z/n_1 x ... x Z/n_r x Z^k``.  Elements are plain integer
tuples, torsion coordinates reduced into ``[0, n_i)``.  Everything here is
immutable so values can be shipped to worker processes freely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

Element = tuple[int, ...]


class GroupError(ValueError):
    """Malformed group descriptor, element or subset pair."""


@dataclass(frozen=True)
class AbelianGroup:
    torsion_factors: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        object.__setattr__(self, "torsion_factors", tuple(int(n) for n in self.torsion_factors))
        if any(n < 2 for n in self.torsion_factors):
            raise GroupError("torsion moduli must be >= 2")
        if self.free_rank < 0:
            raise GroupError("free rank must be non-negative")
        if not self.torsion_factors and self.free_rank == 0:
            raise GroupError("trivial group is not supported")

    @property
    def dim(self) -> int:
        return len(self.torsion_factors) + self.free_rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_cyclic(self) -> bool:
        return self.free_rank == 0 and len(self.torsion_factors) == 1

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise GroupError("infinite group has no finite order")
        out = 1
        for n in self.torsion_factors:
            out *= n
        return out

    @property
    def zero(self) -> Element:
        return (0,) * self.dim

    def descriptor(self) -> str:
        parts = [f"z{n}" for n in self.torsion_factors]
        if self.free_rank:
            parts.append(f"free{self.free_rank}")
        return "x".join(parts)

    def __str__(self) -> str:
        return self.descriptor()

    def normalize(self, coords: Iterable[int]) -> Element:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.dim:
            raise GroupError(f"element {coords} has {len(coords)} coordinates, group {self} needs {self.dim}")
        t = len(self.torsion_factors)
        return tuple(c % n for c, n in zip(coords[:t], self.torsion_factors)) + coords[t:]

    def add(self, x: Element, y: Element) -> Element:
        if len(x) != self.dim or len(y) != self.dim:
            raise GroupError("dimension mismatch between coords and group signature")
        return self.normalize(a + b for a, b in zip(x, y))

    def neg(self, x: Element) -> Element:
        return self.normalize(-a for a in x)

    def scale(self, c: int, x: Element) -> Element:
        return self.normalize(c * a for a in x)

    def elements(self) -> list[Element]:
        """All elements in lexicographic order (finite groups only)."""
        if not self.is_finite:
            raise GroupError("cannot list an infinite group")
        out: list[Element] = [()]
        for n in self.torsion_factors:
            out = [e + (i,) for e in out for i in range(n)]
        return out

    def units(self) -> list[int]:
        """Integers c in [1, n) acting as automorphisms x -> c*x of a cyclic group."""
        if not self.is_cyclic:
            raise GroupError("units are only used for cyclic groups")
        n = self.torsion_factors[0]
        return [c for c in range(1, n) if gcd(c, n) == 1] or [1]

    def parse_element(self, text: str) -> Element:
        text = text.strip().strip("()")
        try:
            return self.normalize(int(p) for p in text.split(","))
        except ValueError as exc:
            raise GroupError(f"bad element {text!r}") from exc

    def parse_set(self, text: str) -> list[Element]:
        """Parse a set literal.

        Rank-one groups take ``"0,2,5"``; wider groups separate elements by
        ``;`` (``"1,3;0,2"``) or use parentheses (``"(1,3),(0,2)"``).
        """
        text = text.strip()
        if not text:
            return []
        if "(" in text:
            items = re.findall(r"\(([^)]*)\)", text)
        elif self.dim == 1:
            items = text.split(",")
        else:
            items = text.split(";")
        return [self.parse_element(s) for s in items if s.strip()]


_FACTOR = re.compile(r"^(?:z(\d+)|free(\d+))$")


def parse_group(descriptor: str) -> AbelianGroup:
    """Parse ``z7``, ``z2xz4``, ``z2 x z4`` or ``free2``."""
    tors: list[int] = []
    rank = 0
    parts = [p.strip() for p in re.split(r"\s*x\s*(?=z|free)", descriptor.strip().lower()) if p.strip()]
    if not parts:
        raise GroupError(f"empty group descriptor {descriptor!r}")
    for p in parts:
        m = _FACTOR.match(p)
        if not m:
            raise GroupError(f"bad group factor {p!r} in {descriptor!r}")
        if m.group(1) is not None:
            tors.append(int(m.group(1)))
        else:
            rank += int(m.group(2))
    return AbelianGroup(tuple(tors), rank)


def format_element(x: Element) -> str:
    return ",".join(str(c) for c in x)


@dataclass(frozen=True)
class SubsetPair:
    group: AbelianGroup
    A: tuple[Element, ...]
    B: tuple[Element, ...]
    zero_in_B: bool = field(default=False)

    @property
    def size(self) -> int:
        return len(self.A)

    def to_json(self) -> dict:
        return {
            "group": self.group.descriptor(),
            "a": [list(x) for x in self.A],
            "b": [list(x) for x in self.B],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SubsetPair":
        g = parse_group(data["group"])
        return validate_pair(g, [tuple(x) for x in data["a"]], [tuple(x) for x in data["b"]])


def validate_pair(g: AbelianGroup, A: Sequence[Iterable[int]], B: Sequence[Iterable[int]]) -> SubsetPair:
    """Normalize, sort and check a candidate pair.

    ``0 in B`` is recorded in ``zero_in_B`` rather than rejected.
    """
    a = [g.normalize(x) for x in A]
    b = [g.normalize(x) for x in B]
    if not a or not b:
        raise GroupError("subsets must be non-empty")
    if len(a) != len(b):
        raise GroupError(f"size mismatch: |A|={len(a)}, |B|={len(b)}")
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise GroupError("duplicate elements")
    b_sorted = tuple(sorted(b))
    return SubsetPair(g, tuple(sorted(a)), b_sorted, g.zero in b_sorted)
