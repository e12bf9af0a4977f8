"""Exact row reduction over a prime field or the rationals.

Vectors are tuples.  A base field object supplies ``norm`` (canonical
representative) and ``inv``; everything else is plain ``+``/``*``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

Vector = tuple


class PrimeField:
    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p

    is_finite = True

    @property
    def order(self) -> int:
        return self.p

    def norm(self, x) -> int:
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def elements(self) -> range:
        return range(self.p)

    def units(self) -> range:
        return range(1, self.p)

    def descriptor(self) -> str:
        return f"fp({self.p})"

    def to_json(self, x) -> int:
        return int(x)

    def from_json(self, x) -> int:
        return int(x) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("fp", self.p))


class Rationals:
    is_finite = False
    p = 0

    def norm(self, x) -> Fraction:
        return Fraction(x)

    def inv(self, x) -> Fraction:
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def descriptor(self) -> str:
        return "q"

    def to_json(self, x) -> str:
        return str(Fraction(x))

    def from_json(self, x) -> Fraction:
        return Fraction(x)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("q")


def rref(rows: Iterable[Sequence], K, ncols: int | None = None) -> tuple[tuple[Vector, ...], tuple[int, ...]]:
    """Reduced row-echelon form; zero rows dropped, pivots equal to 1."""
    m = [[K.norm(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = K.inv(m[r][c])
        m[r] = [K.norm(x * inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [K.norm(x - f * y) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def rank(rows: Iterable[Sequence], K) -> int:
    return len(rref(rows, K)[0])


def reduce_mod(v: Sequence, basis: Sequence[Vector], pivots: Sequence[int], K) -> list:
    """Residue of ``v`` modulo an RREF basis; zero iff ``v`` is in the span."""
    v = [K.norm(x) for x in v]
    for row, p in zip(basis, pivots):
        f = v[p]
        if f:
            v = [K.norm(x - f * y) for x, y in zip(v, row)]
    return v


def nullspace(rows: Sequence[Sequence], K, ncols: int) -> list[Vector]:
    """Basis of {x : M x = 0} for the matrix with the given rows."""
    red, piv = rref(rows, K, ncols)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for row, p in zip(red, piv):
            x[p] = K.norm(-row[f])
        out.append(tuple(K.norm(v) for v in x))
    return out


def left_kernel(rows: Sequence[Sequence], K) -> list[Vector]:
    """Basis of {c : sum_i c_i rows_i = 0}."""
    if not rows:
        return []
    cols = list(zip(*rows))
    return nullspace(cols, K, len(rows))


def combine(coeffs: Sequence, rows: Sequence[Sequence], K, width: int) -> Vector:
    out = [0] * width
    for c, row in zip(coeffs, rows):
        if c:
            for j, y in enumerate(row):
                out[j] += c * y
    return tuple(K.norm(x) for x in out)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], K) -> tuple[Vector, ...]:
    cols = list(zip(*b))
    return tuple(tuple(K.norm(sum(x * y for x, y in zip(row, col))) for col in cols) for row in a)


def inverse(m: Sequence[Sequence], K) -> tuple[Vector, ...] | None:
    n = len(m)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug, K, n)
    if len(red) < n or tuple(piv) != tuple(range(n)):
        return None
    return tuple(tuple(row[n:]) for row in red)


def all_vectors(K, n: int):
    return product(K.elements(), repeat=n)


def projective_points(K, n: int) -> list[Vector]:
    """Nonzero vectors of K^n whose first nonzero entry is 1 (finite K)."""
    out = []
    for i in range(n):
        for tail in product(K.elements(), repeat=n - i - 1):
            out.append((0,) * i + (1,) + tail)
    return out


def general_linear(K, n: int) -> list[tuple[Vector, ...]]:
    """All invertible n x n matrices over a finite field, lexicographic."""
    rows = [v for v in all_vectors(K, n) if any(v)]
    out = []
    for combo in product(rows, repeat=n):
        if rank(combo, K) == n:
            out.append(tuple(combo))
    return out


def normalize_scalar(m: Sequence[Sequence], K) -> tuple[Vector, ...]:
    """Scale a nonzero matrix so its first nonzero entry is 1."""
    flat = [x for row in m for x in row]
    lead = next(x for x in flat if x != 0)
    inv = K.inv(lead)
    return tuple(tuple(K.norm(x * inv) for x in row) for row in m)


def scalar_multiple(m1, m2, K):
    """``c`` with m1 == c*m2, or None."""
    c = None
    for r1, r2 in zip(m1, m2):
        for x, y in zip(r1, r2):
            if y == 0:
                if x != 0:
                    return None
                continue
            ratio = K.norm(x * K.inv(y))
            if c is None:
                c = ratio
            elif ratio != c:
                return None
    return c
