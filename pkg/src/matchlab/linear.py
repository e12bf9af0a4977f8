"""Matched bases, strong matchings and acyclic strong matchings.

For ordered bases ``(a_i)`` of A and ``(b_i)`` of B the matched condition
asks ``V_i = {v in B : a_i v in A}`` to lie in the hyperplane spanned by the
``b_j`` with ``j != i``.  Writing that hyperplane as the kernel of the dual
functional ``phi_i``, a matched basis exists iff the annihilators of the
``V_i`` admit independent representatives, which by Rado's theorem happens
iff ``dim(V_S) <= n - |S|`` for every index set S, where ``V_S`` is the
intersection of the ``V_i`` over S.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, count, product as iproduct
from typing import Iterator, Sequence

from . import linalg
from .fields import (
    FieldError,
    Subspace,
    annihilator,
    intersect,
    is_subspace,
    preimage_in,
    product,
    pstrip,
    span,
)
from .linalg import Vector


class UnsupportedQuantifier(FieldError):
    """A universal quantifier over bases cannot be enumerated (infinite K)."""


# -- value types ----------------------------------------------------------------


@dataclass(frozen=True)
class BasisSeq:
    vectors: tuple[Vector, ...]
    parent: Subspace

    def __post_init__(self):
        if len(self.vectors) != self.parent.dim:
            raise FieldError("basis length differs from the subspace dimension")
        if any(not self.parent.contains(v) for v in self.vectors):
            raise FieldError("basis vector outside the parent subspace")
        if linalg.rank(self.vectors, self.parent.tower.K) != self.parent.dim:
            raise FieldError("basis vectors are dependent")

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def to_json(self) -> list[str]:
        return [self.parent.tower.format(v) for v in self.vectors]


def basis_seq(parent: Subspace, vectors: Sequence[Sequence]) -> BasisSeq:
    return BasisSeq(tuple(_fit(v, parent.width) for v in vectors), parent)


def _fit(v, width):
    v = tuple(v)
    if len(v) < width:
        return v + (0,) * (width - len(v))
    if any(v[width:]):
        raise FieldError("vector exceeds ambient width")
    return v[:width]


@dataclass(frozen=True)
class LinearMap:
    """``f(a_i) = sum_j matrix[i][j] b_j`` for the canonical rows of domain/codomain."""

    domain: Subspace
    codomain: Subspace
    matrix: tuple[Vector, ...]

    def apply(self, v: Sequence) -> Vector:
        c = self.domain.coords(_fit(v, self.domain.width))
        K = self.domain.tower.K
        img = [K.norm(sum(ci * self.matrix[i][j] for i, ci in enumerate(c))) for j in range(self.codomain.dim)]
        return self.codomain.vector(img)

    @property
    def is_invertible(self) -> bool:
        return self.domain.dim == self.codomain.dim and linalg.rank(self.matrix, self.domain.tower.K) == self.domain.dim

    def matrix_json(self):
        K = self.domain.tower.K
        return [[K.to_json(x) for x in row] for row in self.matrix]


@dataclass(frozen=True)
class MatchedBasisCertificate:
    basis_a: BasisSeq
    basis_b: BasisSeq
    preimages: tuple[Subspace, ...]  # V_i = a_i^-1 A n B
    hyperplanes: tuple[Subspace, ...]  # span of b_j, j != i
    holds: tuple[bool, ...]

    @property
    def matched(self) -> bool:
        return all(self.holds)

    def replay(self) -> bool:
        """Re-run the containment checks from the stored data alone."""
        return tuple(is_subspace(v, h) for v, h in zip(self.preimages, self.hyperplanes)) == self.holds

    def to_json(self) -> dict:
        return {
            "basis_a": self.basis_a.to_json(),
            "basis_b": self.basis_b.to_json(),
            "per_index": [
                {"preimage": v.to_json()["basis"], "others": h.to_json()["basis"], "contained": ok}
                for v, h, ok in zip(self.preimages, self.hyperplanes, self.holds)
            ],
        }


@dataclass(frozen=True)
class EquivalenceWitness:
    """``phi`` in Aut(A) with ``a f(a) = phi(a) g(phi(a))``; ``scalar`` is c with f = c g, or None."""

    phi: LinearMap
    g: LinearMap
    scalar: object = None

    def to_json(self) -> dict:
        K = self.phi.domain.tower.K
        return {
            "phi": self.phi.matrix_json(),
            "g": self.g.matrix_json(),
            "scalar": None if self.scalar is None else K.to_json(self.scalar),
        }


# -- matched bases ------------------------------------------------------------------


def _others(basis_b: BasisSeq, i: int) -> Subspace:
    B = basis_b.parent
    return span(B.tower, [v for j, v in enumerate(basis_b.vectors) if j != i], B.width)


def is_matched_basis(basis_a: BasisSeq, basis_b: BasisSeq) -> tuple[bool, MatchedBasisCertificate]:
    A, B = basis_a.parent, basis_b.parent
    if len(basis_a) != len(basis_b):
        raise FieldError("bases have different lengths")
    if any(not any(a) for a in basis_a.vectors):
        raise FieldError("zero basis element")
    pre, hyp, ok = [], [], []
    for i, a in enumerate(basis_a.vectors):
        V = preimage_in(B, a, A)
        H = _others(basis_b, i)
        pre.append(V)
        hyp.append(H)
        ok.append(is_subspace(V, H))
    cert = MatchedBasisCertificate(basis_a, basis_b, tuple(pre), tuple(hyp), tuple(ok))
    return cert.matched, cert


def rado_violation(preimages: Sequence[Subspace], n: int) -> tuple[int, ...] | None:
    """Least index set S with dim(intersection of V_i, i in S) > n - |S|."""
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            inter = preimages[S[0]]
            for i in S[1:]:
                inter = intersect(inter, preimages[i])
            if inter.dim > n - size:
                return S
    return None


def _candidates(ann: Sequence[Vector], K) -> Iterator[Vector]:
    """Nonzero functionals in span(ann): all projective points for finite K,
    integer combinations of growing height otherwise."""
    m = len(ann)
    width = len(ann[0])
    if K.is_finite:
        for c in linalg.projective_points(K, m):
            yield linalg.combine(c, ann, K, width)
        return
    for h in count(1):
        for c in iproduct(range(-h, h + 1), repeat=m):
            if max(map(abs, c)) == h or h == 1:
                if any(c):
                    yield linalg.combine(c, ann, K, width)


def _rado_ok(chosen: list[Vector], rest: Sequence[Sequence[Vector]], K, n: int) -> bool:
    base = linalg.rank(chosen, K) if chosen else 0
    for size in range(1, len(rest) + 1):
        for S in combinations(range(len(rest)), size):
            rows = list(chosen) + [v for i in S for v in rest[i]]
            if (linalg.rank(rows, K) if rows else 0) - base < size:
                return False
    return True


def find_matched_basis(basis_a: BasisSeq, B: Subspace, max_tries: int = 100_000) -> BasisSeq | None:
    """A basis of B matched to ``basis_a``, or None.

    Chooses independent functionals ``phi_i`` vanishing on ``V_i`` one at a
    time, keeping Rado's condition satisfiable for the rest, then returns
    the dual basis.
    """
    A = basis_a.parent
    n = len(basis_a)
    if B.dim != n:
        raise FieldError("dimension mismatch")
    K = B.tower.K
    pre = [preimage_in(B, a, A) for a in basis_a.vectors]
    if rado_violation(pre, n) is not None:
        return None
    anns = [annihilator(V, B) for V in pre]
    chosen: list[Vector] = []
    for i in range(n):
        tries = 0
        for phi in _candidates(anns[i], K):
            tries += 1
            if tries > max_tries:
                raise FieldError("functional search exceeded its budget")
            trial = chosen + [phi]
            if linalg.rank(trial, K) == len(trial) and _rado_ok(trial, anns[i + 1:], K, n):
                chosen = trial
                break
        else:
            return None
    inv = linalg.inverse(chosen, K)
    vectors = [B.vector([inv[j][i] for j in range(n)]) for i in range(n)]
    return BasisSeq(tuple(vectors), B)


# -- matched subspaces ------------------------------------------------------------


def bases_up_to_scaling(A: Subspace) -> Iterator[BasisSeq]:
    """Unordered bases of A modulo per-vector scaling (finite K).

    The matched condition depends only on the lines spanned by the basis
    vectors and is symmetric under simultaneous reordering, so these cover
    every ordered basis.
    """
    K = A.tower.K
    if not K.is_finite:
        raise UnsupportedQuantifier("bases can only be enumerated over a finite base field")
    points = linalg.projective_points(K, A.dim)
    for combo in combinations(points, A.dim):
        if linalg.rank(combo, K) == A.dim:
            yield BasisSeq(tuple(A.vector(c) for c in combo), A)


@dataclass
class MatchedSubspaceResult:
    matched: bool
    failing_basis: BasisSeq | None = None
    rado_subset: tuple[int, ...] | None = None
    bases_checked: int = 0


def is_matched_subspace(A: Subspace, B: Subspace) -> MatchedSubspaceResult:
    """Every basis of A admits a matched basis of B (finite K, exhaustive)."""
    if A.dim != B.dim or A.dim < 1:
        raise FieldError("A and B must have the same positive dimension")
    K = A.tower.K
    if not K.is_finite:
        raise UnsupportedQuantifier("use sampled_matched_subspace over an infinite base field")
    n = A.dim
    points = linalg.projective_points(K, n)
    pre = {c: preimage_in(B, A.vector(c), A) for c in points}
    checked = 0
    for combo in combinations(points, n):
        if linalg.rank(combo, K) != n:
            continue
        checked += 1
        S = rado_violation([pre[c] for c in combo], n)
        if S is not None:
            basis = BasisSeq(tuple(A.vector(c) for c in combo), A)
            return MatchedSubspaceResult(False, basis, S, checked)
    return MatchedSubspaceResult(True, None, None, checked)


def sampled_matched_subspace(A: Subspace, B: Subspace, samples: int, seed: int) -> MatchedSubspaceResult:
    """Random bases of A (small integer coordinates); never a proof of 'matched'."""
    rng = random.Random(seed)
    K = A.tower.K
    n = A.dim
    checked = 0
    while checked < samples:
        M = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if linalg.rank(M, K) != n:
            continue
        checked += 1
        basis = BasisSeq(tuple(A.vector(r) for r in M), A)
        pre = [preimage_in(B, a, A) for a in basis.vectors]
        S = rado_violation(pre, n)
        if S is not None:
            return MatchedSubspaceResult(False, basis, S, checked)
    return MatchedSubspaceResult(True, None, None, checked)


# -- strong matchings ----------------------------------------------------------------


def strong_matching_exists(A: Subspace, B: Subspace) -> bool:
    """Criterion AB n A = {0}."""
    if A.is_zero or B.is_zero or A.dim != B.dim:
        raise FieldError("A and B must be nonzero of equal dimension")
    return intersect(product(A, B), A).is_zero


def iso_from_images(A: Subspace, B: Subspace, images: Sequence[Sequence]) -> LinearMap:
    """The map sending the i-th canonical row of A to ``images[i]``."""
    mat = tuple(B.coords(_fit(v, B.width)) for v in images)
    for v, row in zip(images, mat):
        if B.vector(row) != _fit(v, B.width):
            raise FieldError("image outside the codomain")
    return LinearMap(A, B, mat)


def map_from_bases(basis_a: BasisSeq, basis_b: BasisSeq) -> LinearMap:
    """The linear map a_i -> b_i."""
    A, B = basis_a.parent, basis_b.parent
    K = A.tower.K
    P = [A.coords(a) for a in basis_a.vectors]  # a_i in A-coords
    Q = [B.coords(b) for b in basis_b.vectors]
    inv = linalg.inverse(P, K)
    return LinearMap(A, B, linalg.matmul(inv, Q, K))


def is_strong_matching(f: LinearMap) -> tuple[bool, BasisSeq | None]:
    """Every basis of A (up to scaling and order) is matched to its image."""
    if not f.is_invertible:
        raise FieldError("not an isomorphism")
    A, B = f.domain, f.codomain
    K = A.tower.K
    n = A.dim
    points = linalg.projective_points(K, n) if K.is_finite else None
    if points is None:
        raise UnsupportedQuantifier("use sampled_strong_matching over an infinite base field")
    pre = {c: preimage_in(B, A.vector(c), A) for c in points}
    img = {c: f.apply(A.vector(c)) for c in points}
    for combo in combinations(points, n):
        if linalg.rank(combo, K) != n:
            continue
        for i, c in enumerate(combo):
            H = span(B.tower, [img[d] for j, d in enumerate(combo) if j != i], B.width)
            if not is_subspace(pre[c], H):
                return False, BasisSeq(tuple(A.vector(d) for d in combo), A)
    return True, None


def sampled_strong_matching(f: LinearMap, samples: int, seed: int) -> tuple[bool, BasisSeq | None]:
    rng = random.Random(seed)
    A = f.domain
    K = A.tower.K
    n = A.dim
    done = 0
    while done < samples:
        M = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if linalg.rank(M, K) != n:
            continue
        done += 1
        basis = BasisSeq(tuple(A.vector(r) for r in M), A)
        images = BasisSeq(tuple(f.apply(a) for a in basis.vectors), f.codomain)
        ok, _ = is_matched_basis(basis, images)
        if not ok:
            return False, basis
    return True, None


def isomorphisms(A: Subspace, B: Subspace, up_to_scalar: bool = True) -> list[LinearMap]:
    K = A.tower.K
    mats = linalg.general_linear(K, A.dim)
    if up_to_scalar:
        mats = sorted({linalg.normalize_scalar(m, K) for m in mats})
    return [LinearMap(A, B, m) for m in mats]


def automorphisms(A: Subspace) -> list[LinearMap]:
    return [LinearMap(A, A, m) for m in linalg.general_linear(A.tower.K, A.dim)]


# -- equivalence and acyclicity ---------------------------------------------------------


def induced_candidate(f: LinearMap, phi: LinearMap, method: str | None = None) -> LinearMap | None:
    """The map g with ``a f(a) = phi(a) g(phi(a))`` when it is linear into B.

    ``method='full'`` evaluates on every element of A (finite K, the
    default there); ``method='quadratic'`` only uses basis vectors and
    pairwise sums, which suffices because ``a -> a f(a) - phi(a) g(phi(a))``
    is homogeneous quadratic once g is linear.
    """
    A, B = f.domain, f.codomain
    t = A.tower
    K = t.K
    if method is None:
        method = "full" if K.is_finite else "quadratic"
    phi_inv = linalg.inverse(phi.matrix, K)
    if phi_inv is None:
        raise FieldError("phi is not invertible")
    inv_map = LinearMap(A, A, phi_inv)

    def value_at(a_prime):
        a = inv_map.apply(a_prime)
        val = t.div_exact(t.mul(a, f.apply(a)), a_prime)
        if val is None or not B.contains(val):
            return None
        return _fit(val, B.width)

    mat = []
    for r in A.rows:
        val = value_at(r)
        if val is None:
            return None
        mat.append(B.coords(val))
    g = LinearMap(A, B, tuple(mat))

    if method == "full":
        for a_prime in A.elements():
            if not any(a_prime):
                continue
            val = value_at(a_prime)
            if val is None or val != g.apply(a_prime):
                return None
        return g

    def defect(a):
        pa = phi.apply(a)
        lhs = t.mul(a, f.apply(a))
        rhs = t.mul(pa, g.apply(pa))
        return pstrip(lhs) != pstrip(rhs)

    rows = A.rows
    probes = list(rows) + [tuple(K.norm(x + y) for x, y in zip(rows[i], rows[j]))
                           for i in range(len(rows)) for j in range(i + 1, len(rows))]
    if any(defect(a) for a in probes):
        return None
    return g


def relation_holds(f: LinearMap, phi: LinearMap, g: LinearMap) -> bool:
    """Check ``a f(a) = phi(a) g(phi(a))`` on every element of A (finite K)."""
    t = f.domain.tower
    for a in f.domain.elements():
        pa = phi.apply(a)
        if pstrip(t.mul(a, f.apply(a))) != pstrip(t.mul(pa, g.apply(pa))):
            return False
    return True


@dataclass
class AcyclicResult:
    acyclic: bool
    witness: EquivalenceWitness | None = None
    automorphisms_checked: int = 0
    equivalent_strong: int = 0


def is_acyclic_strong_matching(f: LinearMap, strong_cache: dict | None = None) -> AcyclicResult:
    """f is acyclic iff every strong g equivalent to f is a scalar multiple of f."""
    K = f.domain.tower.K
    if not K.is_finite:
        raise UnsupportedQuantifier("Aut(A) is only enumerable over a finite base field")
    cache = {} if strong_cache is None else strong_cache
    checked = equiv = 0
    for phi in automorphisms(f.domain):
        checked += 1
        g = induced_candidate(f, phi)
        if g is None:
            continue
        key = linalg.normalize_scalar(g.matrix, K)
        if key not in cache:
            cache[key] = is_strong_matching(LinearMap(g.domain, g.codomain, key))[0]
        if not cache[key]:
            continue
        equiv += 1
        c = linalg.scalar_multiple(f.matrix, g.matrix, K)
        if c is None:
            return AcyclicResult(False, EquivalenceWitness(phi, g), checked, equiv)
    return AcyclicResult(True, None, checked, equiv)


def verify_equivalence(f: LinearMap, witness: EquivalenceWitness) -> bool:
    """Certificate-verification mode: works over any base field."""
    A = f.domain
    K = A.tower.K
    t = A.tower
    rows = A.rows
    probes = list(rows) + [tuple(K.norm(x + y) for x, y in zip(rows[i], rows[j]))
                           for i in range(len(rows)) for j in range(i + 1, len(rows))]
    for a in probes:
        pa = witness.phi.apply(a)
        if pstrip(t.mul(a, f.apply(a))) != pstrip(t.mul(pa, witness.g.apply(pa))):
            return False
    return True
