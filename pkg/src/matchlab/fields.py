"""Field towers K < L and their K-subspaces.

``L`` is either a finite extension ``K[x]/(m)`` with elements stored in the
power basis ``1, x, ..., x^(d-1)``, or the rational function field ``K(t)``
in which every subspace is spanned by polynomials and stored as coefficient
vectors of length ``deg_bound + 1``.  Operations that leave the current
degree bound (products, preimages) promote it explicitly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from itertools import product as iproduct
from typing import Iterable, Sequence

from . import linalg
from .linalg import PrimeField, Rationals, Vector


class FieldError(ValueError):
    pass


# -- univariate polynomials over K, coefficient tuples low -> high ------------


def pstrip(a: Sequence) -> tuple:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def padd(a, b, K) -> tuple:
    n = max(len(a), len(b))
    return pstrip(K.norm((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) for i in range(n))


def pneg(a, K) -> tuple:
    return tuple(K.norm(-x) for x in a)


def pmul(a, b, K) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return pstrip(K.norm(x) for x in out)


def pdivmod(a, b, K) -> tuple[tuple, tuple]:
    b = pstrip(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(pstrip(a))
    inv = K.inv(b[-1])
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        f = K.norm(a[-1] * inv)
        s = len(a) - len(b)
        q[s] = f
        for i, y in enumerate(b):
            a[s + i] = K.norm(a[s + i] - f * y)
        a = list(pstrip(a))
    return pstrip(q), tuple(a)


def pmonic(a, K) -> tuple:
    a = pstrip(a)
    if not a:
        return a
    inv = K.inv(a[-1])
    return tuple(K.norm(x * inv) for x in a)


def pgcd(a, b, K) -> tuple:
    a, b = pstrip(a), pstrip(b)
    while b:
        a, b = b, pdivmod(a, b, K)[1]
    return pmonic(a, K)


def pxgcd(a, b, K) -> tuple[tuple, tuple, tuple]:
    """``(g, s, t)`` with ``s*a + t*b = g`` and g monic."""
    r0, r1 = pstrip(a), pstrip(b)
    s0, s1, t0, t1 = (K.norm(1),), (), (), (K.norm(1),)
    while r1:
        q, r = pdivmod(r0, r1, K)
        r0, r1 = r1, r
        s0, s1 = s1, padd(s0, pneg(pmul(q, s1, K), K), K)
        t0, t1 = t1, padd(t0, pneg(pmul(q, t1, K), K), K)
    inv = K.inv(r0[-1])
    sc = lambda p: tuple(K.norm(x * inv) for x in p)
    return sc(r0), sc(s0), sc(t0)


def format_poly(a: Sequence, var: str, K=None) -> str:
    a = pstrip(a)
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
            continue
        mono = var if i == 1 else f"{var}^{i}"
        terms.append(mono if c == 1 else f"{c}*{mono}")
    out = "+".join(terms)
    return out.replace("+-", "-")


def is_irreducible(m: Sequence, K) -> bool:
    """Exhaustive trial division over F_p; sympy for Q (desk scale only)."""
    m = pstrip(m)
    d = len(m) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    if not K.is_finite:
        import sympy

        x = sympy.Symbol("x")
        expr = sum(sympy.Rational(c) * x**i for i, c in enumerate(m))
        return sympy.Poly(expr, x, domain="QQ").is_irreducible
    if d > 8:
        raise FieldError("irreducibility is only checked up to degree 8")
    p = K.p
    for deg in range(1, d // 2 + 1):
        for tail in iproduct(range(p), repeat=deg):
            if not pdivmod(m, tail + (1,), K)[1]:
                return False
    return True


# -- expression parser --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z_]\w*)|(\*\*|[-+*/^()]))")


class _Parser:
    """Recursive-descent parser into rational functions ``(num, den)``."""

    def __init__(self, text: str, var: str, K):
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise FieldError(f"cannot parse {text!r} at {pos}")
            pos = m.end()
            num, name, op = m.groups()
            if num is not None:
                self.toks.append(("num", int(num)))
            elif name is not None:
                if name != var:
                    raise FieldError(f"unknown symbol {name!r} (expected {var!r})")
                self.toks.append(("var", name))
            else:
                self.toks.append(("op", "^" if op == "**" else op))
        self.i = 0
        self.K = K

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        val = self.expr()
        if self.i != len(self.toks):
            raise FieldError("trailing input")
        return val

    def expr(self):
        val = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = _radd(val, rhs if op == "+" else (pneg(rhs[0], self.K), rhs[1]), self.K)
        return val

    def term(self):
        val = self.power()
        while True:
            kind, tok = self.peek()
            if (kind, tok) == ("op", "*"):
                self.take()
                val = _rmul(val, self.power(), self.K)
            elif (kind, tok) == ("op", "/"):
                self.take()
                rhs = self.power()
                if not rhs[0]:
                    raise FieldError("division by zero")
                val = _rmul(val, (rhs[1], rhs[0]), self.K)
            elif kind in ("num", "var") or (kind, tok) == ("op", "("):
                val = _rmul(val, self.power(), self.K)
            else:
                return val

    def power(self):
        base = self.unary()
        if self.peek() == ("op", "^"):
            self.take()
            kind, n = self.take()
            if kind != "num":
                raise FieldError("exponent must be a non-negative integer")
            out = ((self.K.norm(1),), (self.K.norm(1),))
            for _ in range(n):
                out = _rmul(out, base, self.K)
            return out
        return base

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            num, den = self.unary()
            return pneg(num, self.K), den
        kind, tok = self.take()
        one = (self.K.norm(1),)
        if kind == "num":
            return pstrip((self.K.norm(tok),)), one
        if kind == "var":
            return (0, self.K.norm(1)), one
        if (kind, tok) == ("op", "("):
            val = self.expr()
            if self.take() != ("op", ")"):
                raise FieldError("missing ')'")
            return val
        raise FieldError(f"unexpected token {tok!r}")


def _rmul(a, b, K):
    return _rnorm(pmul(a[0], b[0], K), pmul(a[1], b[1], K), K)


def _radd(a, b, K):
    return _rnorm(padd(pmul(a[0], b[1], K), pmul(b[0], a[1], K), K), pmul(a[1], b[1], K), K)


def _rnorm(num, den, K):
    g = pgcd(num, den, K) if num else pmonic(den, K)
    if num:
        num = pdivmod(num, g, K)[0]
        den = pdivmod(den, g, K)[0]
    else:
        den = (K.norm(1),)
    lead = K.inv(den[-1])
    return tuple(K.norm(x * lead) for x in num), tuple(K.norm(x * lead) for x in den)


def parse_rational(text: str, var: str, K) -> tuple[tuple, tuple]:
    return _Parser(text, var, K).parse()


# -- towers -------------------------------------------------------------------


@dataclass(frozen=True)
class FieldTower:
    K: object
    modulus: tuple | None = None  # monic, finite extensions only
    var: str = "x"

    @property
    def is_finite_extension(self) -> bool:
        return self.modulus is not None

    @property
    def transcendental(self) -> bool:
        return self.modulus is None

    @property
    def degree(self) -> int:
        if self.modulus is None:
            raise FieldError("transcendental extension has infinite degree")
        return len(self.modulus) - 1

    def descriptor(self) -> str:
        if self.transcendental:
            return f"{self.K.descriptor()}({self.var})"
        if isinstance(self.K, Rationals):
            return f"q:{format_poly(self.modulus, 'x')}"
        return f"gf({self.K.p}^{self.degree}):{format_poly(self.modulus, 'x')}"

    def __str__(self):
        return self.descriptor()

    def __post_init__(self):
        if self.modulus is not None:
            if not is_irreducible(self.modulus, self.K):
                raise FieldError(f"modulus {format_poly(self.modulus, 'x')} is reducible")
            object.__setattr__(self, "_red", self._reduction_table())

    def _reduction_table(self) -> list[tuple]:
        """x^k mod m as power-basis vectors for d <= k <= 2d-2."""
        d = self.degree
        K = self.K
        table = []
        cur = list(pneg(self.modulus[:-1], K))  # x^d
        for _ in range(d, 2 * d - 1):
            table.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [K.norm(c + top * r) for c, r in zip(cur, table[0])]
        return table

    # element arithmetic; finite elements are length-d tuples, transcendental
    # elements are stripped coefficient tuples.

    def one(self) -> Vector:
        if self.transcendental:
            return (self.K.norm(1),)
        return (self.K.norm(1),) + (0,) * (self.degree - 1)

    def mul(self, u: Sequence, v: Sequence) -> Vector:
        K = self.K
        if self.transcendental:
            return pmul(pstrip(u), pstrip(v), K)
        d = self.degree
        conv = [0] * (2 * d - 1)
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    if y:
                        conv[i + j] += x * y
        out = conv[:d]
        for k, c in enumerate(conv[d:]):
            if c:
                out = [o + c * r for o, r in zip(out, self._red[k])]
        return tuple(K.norm(x) for x in out)

    def inv(self, u: Sequence) -> Vector:
        if self.transcendental:
            raise FieldError("inverse leaves the polynomial ring; use div_exact")
        g, s, _ = pxgcd(pstrip(u), self.modulus, self.K)
        if g != (self.K.norm(1),):
            raise ZeroDivisionError("inverse of zero")
        return self.pad(s)

    def div_exact(self, u: Sequence, v: Sequence) -> Vector | None:
        """u / v, or None when the quotient is not an element of the ring."""
        if not any(v):
            raise ZeroDivisionError("division by the zero field element")
        if self.transcendental:
            q, r = pdivmod(pstrip(u), pstrip(v), self.K)
            return None if r else q
        return self.mul(u, self.inv(v))

    def pad(self, a: Sequence, width: int | None = None) -> Vector:
        if width is None:
            width = self.degree
        a = pstrip(a)
        if len(a) > width:
            raise FieldError(f"element of degree {len(a) - 1} exceeds ambient of width {width}")
        return tuple(a) + (0,) * (width - len(a))

    def parse(self, text: str) -> tuple[tuple, tuple]:
        """Parse into ``(numerator, denominator)`` polynomials."""
        return parse_rational(text, self.var, self.K)

    def parse_element(self, text: str) -> Vector:
        num, den = self.parse(text)
        if self.transcendental:
            if den != (self.K.norm(1),):
                raise FieldError(f"{text!r} is not a polynomial; use parse_generators")
            return num
        n = self.pad(pdivmod(num, self.modulus, self.K)[1])
        return self.div_exact(n, self.pad(pdivmod(den, self.modulus, self.K)[1]))

    def format(self, v: Sequence) -> str:
        return format_poly(v, self.var)


def parse_tower(text: str) -> FieldTower:
    """``gf(2^4):x^4+x+1``, ``q``, ``q:x^2-2``, ``fp(3)(t)``, ``q(t)``."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"gf\((\d+)\^(\d+)\):(.+)", s)
    if m:
        p, d = int(m.group(1)), int(m.group(2))
        K = PrimeField(p)
        num, den = parse_rational(m.group(3), "x", K)
        if den != (1,) or len(num) - 1 != d or num[-1] != 1:
            raise FieldError(f"modulus must be a monic polynomial of degree {d}")
        return FieldTower(K, num, "x")
    m = re.fullmatch(r"fp\((\d+)\)\((\w+)\)", s)
    if m:
        return FieldTower(PrimeField(int(m.group(1))), None, m.group(2))
    m = re.fullmatch(r"q\((\w+)\)", s)
    if m:
        return FieldTower(Rationals(), None, m.group(1))
    if s == "q":
        return FieldTower(Rationals(), (Fraction(0), Fraction(1)), "x")
    m = re.fullmatch(r"q:(.+)", s)
    if m:
        K = Rationals()
        num, den = parse_rational(m.group(1), "x", K)
        return FieldTower(K, pmonic(num, K), "x")
    m = re.fullmatch(r"gf\((\d+)\)", s)
    if m:
        return FieldTower(PrimeField(int(m.group(1))), (0, 1), "x")
    m = re.fullmatch(r"gf\((\d+)\^(\d+)\)", s)
    if m:
        return finite_tower(int(m.group(1)), int(m.group(2)))
    raise FieldError(f"bad tower descriptor {text!r}")


def conway_like_modulus(p: int, d: int) -> tuple:
    """Lexicographically least monic irreducible polynomial of degree d."""
    K = PrimeField(p)
    for high in iproduct(range(p), repeat=d):
        m = tuple(reversed(high)) + (1,)
        if (m[0] or d == 1) and is_irreducible(m, K):
            return m
    raise FieldError("no irreducible polynomial found")


def finite_tower(p: int, d: int) -> FieldTower:
    return FieldTower(PrimeField(p), conway_like_modulus(p, d) if d > 1 else (0, 1), "x")


# -- subspaces ----------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """Canonical RREF basis of a K-subspace in an explicit ambient.

    ``width`` is the ambient dimension over K: the extension degree for
    finite towers, ``deg_bound + 1`` for transcendental ones.
    """

    tower: FieldTower
    width: int
    rows: tuple[Vector, ...]
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def is_zero(self) -> bool:
        return not self.rows

    def promote(self, width: int) -> "Subspace":
        if width == self.width:
            return self
        if not self.tower.transcendental:
            raise FieldError("finite ambients cannot be promoted")
        if width < self.width and any(any(r[width:]) for r in self.rows):
            raise FieldError("cannot shrink below the degree of the generators")
        rows = tuple(tuple(r[:width]) + (0,) * (width - len(r)) for r in self.rows)
        return Subspace(self.tower, width, rows, self.pivots)

    def coords(self, v: Sequence) -> tuple:
        """Coordinates of ``v`` in the canonical basis (``v`` must lie in the span)."""
        return tuple(v[p] for p in self.pivots)

    def vector(self, coords: Sequence) -> Vector:
        return linalg.combine(coords, self.rows, self.tower.K, self.width)

    def contains(self, v: Sequence) -> bool:
        v = _fit(self.tower, v, self.width)
        if v is None:
            return False
        return not any(linalg.reduce_mod(v, self.rows, self.pivots, self.tower.K))

    def elements(self):
        """Every element (finite K only), in coordinate-lexicographic order."""
        for c in linalg.all_vectors(self.tower.K, self.dim):
            yield self.vector(c)

    def to_json(self) -> dict:
        K = self.tower.K
        return {
            "tower": self.tower.descriptor(),
            "width": self.width,
            "basis": [self.tower.format(r) for r in self.rows],
            "rows": [[K.to_json(x) for x in r] for r in self.rows],
        }

    def __repr__(self):
        return f"Subspace<{self.tower.descriptor()}>[{', '.join(self.tower.format(r) for r in self.rows)}]"


def _fit(tower, v, width):
    v = pstrip(v)
    if len(v) > width:
        return None
    return tuple(v) + (0,) * (width - len(v))


def default_width(tower: FieldTower, vectors: Iterable[Sequence]) -> int:
    if not tower.transcendental:
        return tower.degree
    return max([len(pstrip(v)) for v in vectors] + [1])


def span(tower: FieldTower, vectors: Iterable[Sequence], width: int | None = None) -> Subspace:
    vectors = [tuple(v) for v in vectors]
    if width is None:
        width = default_width(tower, vectors)
    padded = []
    for v in vectors:
        w = _fit(tower, v, width)
        if w is None:
            raise FieldError(f"vector {v} does not fit ambient of width {width}")
        padded.append(w)
    rows, piv = linalg.rref(padded, tower.K, width)
    return Subspace(tower, width, rows, piv)


def zero_space(tower: FieldTower, width: int) -> Subspace:
    return Subspace(tower, width, (), ())


def _common(U: Subspace, V: Subspace) -> tuple[Subspace, Subspace]:
    if U.tower != V.tower:
        raise FieldError("ambient mismatch: different towers")
    if U.width != V.width:
        if not U.tower.transcendental:
            raise FieldError("ambient mismatch")
        w = max(U.width, V.width)
        return U.promote(w), V.promote(w)
    return U, V


def subspace_sum(U: Subspace, V: Subspace) -> Subspace:
    U, V = _common(U, V)
    return span(U.tower, U.rows + V.rows, U.width)


def intersect(U: Subspace, V: Subspace) -> Subspace:
    """Zassenhaus: reduce [[U, U], [V, 0]]; rows with zero left half span U n V."""
    U, V = _common(U, V)
    w = U.width
    K = U.tower.K
    zero = (0,) * w
    rows, piv = linalg.rref([u + u for u in U.rows] + [v + zero for v in V.rows], K, 2 * w)
    inter = [r[w:] for r in rows if not any(r[:w])]
    return span(U.tower, inter, w)


def equal(U: Subspace, V: Subspace) -> bool:
    U, V = _common(U, V)
    return U.rows == V.rows


def is_subspace(U: Subspace, V: Subspace) -> bool:
    """U contained in V."""
    U, V = _common(U, V)
    return all(V.contains(r) for r in U.rows)


def product(A: Subspace, B: Subspace) -> Subspace:
    """Span of all pairwise products a*b."""
    if A.tower != B.tower:
        raise FieldError("ambient mismatch: different towers")
    t = A.tower
    prods = [t.mul(a, b) for a in A.rows for b in B.rows]
    width = A.width + B.width - 1 if t.transcendental else t.degree
    return span(t, prods, width)


def preimage_in(B: Subspace, x: Sequence, A: Subspace) -> Subspace:
    """{v in B : x*v in A}, i.e. x^-1 A n B without inverting x."""
    t = B.tower
    if not any(x):
        raise FieldError("multiplier must be nonzero")
    if B.is_zero:
        return B
    images = [t.mul(x, b) for b in B.rows]
    if t.transcendental:
        width = max(A.width, max(len(im) for im in images))
        A2 = A.promote(width)
        images = [im + (0,) * (width - len(im)) for im in images]
    else:
        A2 = A
    residues = [linalg.reduce_mod(im, A2.rows, A2.pivots, t.K) for im in images]
    ker = linalg.left_kernel(residues, t.K)
    return span(t, [B.vector(c) for c in ker], B.width)


def annihilator(V: Subspace, B: Subspace) -> list[Vector]:
    """Functionals on B vanishing on V n B, in B's canonical dual coordinates.

    Returns a basis of the annihilator as coefficient vectors ``phi`` with
    ``phi(b_j) = phi[j]`` for the canonical rows ``b_j`` of B.
    """
    W = intersect(V, B)
    coords = [B.coords(w) for w in W.rows]
    return linalg.nullspace(coords, B.tower.K, B.dim)


def all_subspaces(tower: FieldTower, n: int, width: int | None = None) -> list[Subspace]:
    """Every n-dimensional subspace of the ambient (finite K), by Schubert cell."""
    K = tower.K
    if not K.is_finite:
        raise FieldError("subspace enumeration needs a finite base field")
    if width is None:
        width = tower.degree
    out = []
    for piv in combinations(range(width), n):
        free = [(i, c) for i, p in enumerate(piv) for c in range(p + 1, width) if c not in piv]
        for vals in iproduct(K.elements(), repeat=len(free)):
            rows = [[0] * width for _ in range(n)]
            for i, p in enumerate(piv):
                rows[i][p] = 1
            for (i, c), v in zip(free, vals):
                rows[i][c] = v
            out.append(Subspace(tower, width, tuple(tuple(r) for r in rows), piv))
    out.sort(key=lambda s: s.rows)
    return out


def parse_generators(tower: FieldTower, texts: Sequence[str]) -> tuple[list[Vector], tuple | None]:
    """Generator strings to ring vectors.

    Over a transcendental tower rational generators are multiplied by the
    least common denominator, which rescales the subspace by a unit; the
    multiplier is returned (None when nothing was cleared).
    """
    if not tower.transcendental:
        return [tower.parse_element(t) for t in texts], None
    K = tower.K
    parsed = [tower.parse(t) for t in texts]
    lcm: tuple = (K.norm(1),)
    for _, den in parsed:
        g = pgcd(lcm, den, K)
        lcm = pmonic(pdivmod(pmul(lcm, den, K), g, K)[0], K)
    vectors = [pmul(num, pdivmod(lcm, den, K)[0], K) for num, den in parsed]
    return vectors, (None if lcm == (K.norm(1),) else lcm)


def parse_subspace(tower: FieldTower, text: str, width: int | None = None) -> tuple[Subspace, tuple | None]:
    """Comma-separated generators, e.g. ``"1,x"``."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise FieldError("empty generator list")
    vectors, scale = parse_generators(tower, parts)
    return span(tower, vectors, width), scale
