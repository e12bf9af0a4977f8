"""Independent GF(2^d) model on bitmask integers, used as a test oracle.

Nothing here touches row reduction: subspaces are Python sets of ints.
"""

from __future__ import annotations

import itertools

MODULI = {1: 0b11, 2: 0b111, 3: 0b1011, 4: 0b10011, 5: 0b100101}


class GF2d:
    def __init__(self, d: int):
        self.d = d
        self.mod = MODULI[d]

    def mul(self, a: int, b: int) -> int:
        r = 0
        for i in range(self.d):
            if b >> i & 1:
                r ^= a << i
        for i in range(2 * self.d - 2, self.d - 1, -1):
            if r >> i & 1:
                r ^= self.mod << (i - self.d)
        return r

    def elements(self):
        return range(1 << self.d)


def span(gens) -> frozenset:
    s = {0}
    for g in gens:
        s |= {x ^ g for x in s}
    return frozenset(s)


def dim(S) -> int:
    return len(S).bit_length() - 1


def subspaces(F: GF2d, n: int) -> list[frozenset]:
    out = set()
    for gens in itertools.combinations(range(1, 1 << F.d), n):
        S = span(gens)
        if dim(S) == n:
            out.add(S)
    return sorted(out, key=sorted)


def unordered_bases(S) -> list[tuple]:
    n = dim(S)
    return [c for c in itertools.combinations(sorted(S - {0}), n) if dim(span(c)) == n]


def ordered_bases(S) -> list[tuple]:
    return [p for c in unordered_bases(S) for p in itertools.permutations(c)]


def preimage(F, a, A, B) -> frozenset:
    return frozenset(b for b in B if F.mul(a, b) in A)


def is_matched(F, basis_a, basis_b, A, B) -> bool:
    for i, a in enumerate(basis_a):
        H = span([b for j, b in enumerate(basis_b) if j != i])
        if not preimage(F, a, A, B) <= H:
            return False
    return True


def matched_basis_exists(F, basis_a, A, B) -> bool:
    return any(is_matched(F, basis_a, bb, A, B) for bb in ordered_bases(B))


def linear_maps(basis_a, B):
    """All linear maps A -> B as dicts on elements, defined by images of basis_a."""
    Bl = sorted(B)
    n = len(basis_a)
    for imgs in itertools.product(Bl, repeat=n):
        table = {}
        for coeffs in itertools.product((0, 1), repeat=n):
            x = y = 0
            for c, a, b in zip(coeffs, basis_a, imgs):
                if c:
                    x ^= a
                    y ^= b
            table[x] = y
        yield imgs, table


def isomorphisms(basis_a, B):
    for imgs, table in linear_maps(basis_a, B):
        if len(set(table.values())) == len(table):
            yield imgs, table


def is_strong(F, A, B, table) -> bool:
    for basis in unordered_bases(A):
        if not is_matched(F, basis, [table[a] for a in basis], A, B):
            return False
    return True
