import itertools
import random
from fractions import Fraction

import pytest

from matchlab.fields import (
    FieldError,
    all_subspaces,
    annihilator,
    conway_like_modulus,
    equal,
    intersect,
    is_irreducible,
    is_subspace,
    parse_subspace,
    parse_tower,
    preimage_in,
    product,
    span,
    subspace_sum,
)
from matchlab.linalg import PrimeField, Rationals

GF16 = "gf(2^4):x^4+x+1"


def int_mul16(a, b):
    """Carry-less product mod x^4+x+1 on 4-bit integers."""
    r = 0
    for i in range(4):
        if b >> i & 1:
            r ^= a << i
    for i in range(7, 3, -1):
        if r >> i & 1:
            r ^= 0b10011 << (i - 4)
    return r


def to_int(v):
    return sum(int(c) << i for i, c in enumerate(v))


def from_int(x, d=4):
    return tuple((x >> i) & 1 for i in range(d))


def elements_of(S):
    return {to_int(v) for v in S.elements()}


def gaussian(q, d, n):
    num = den = 1
    for i in range(n):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def test_gf16_multiplication_against_integer_model():
    t = parse_tower(GF16)
    for a in range(16):
        for b in range(16):
            assert to_int(t.mul(from_int(a), from_int(b))) == int_mul16(a, b)


def test_inverse_and_division():
    t = parse_tower("gf(3^2):x^2+1")
    one = t.one()
    for v in itertools.product(range(3), repeat=2):
        if any(v):
            assert t.mul(v, t.inv(v)) == one
            assert t.div_exact(t.mul(v, (1, 1)), v) == (1, 1)
    with pytest.raises(ZeroDivisionError):
        t.div_exact(one, (0, 0))


@pytest.mark.parametrize("p,d,expected", [(2, 2, (1, 1, 1)), (2, 3, (1, 1, 0, 1)), (2, 4, (1, 1, 0, 0, 1)),
                                          (2, 5, (1, 0, 1, 0, 0, 1)), (3, 2, (1, 0, 1))])
def test_default_moduli(p, d, expected):
    assert conway_like_modulus(p, d) == expected


def test_irreducibility():
    F2 = PrimeField(2)
    assert is_irreducible((1, 1, 1), F2)
    assert not is_irreducible((1, 0, 1), F2)
    Q = Rationals()
    assert is_irreducible((Fraction(-2), 0, 1), Q)
    assert not is_irreducible((Fraction(-1), 0, 1), Q)
    with pytest.raises(FieldError):
        parse_tower("gf(2^2):x^2+1")


def test_parse_elements_and_format():
    t = parse_tower(GF16)
    assert t.parse_element("x^4") == (1, 1, 0, 0)
    assert t.format(t.parse_element("x^3+x")) == "x^3+x"
    v = t.parse_element("1/x")
    assert t.mul(v, t.parse_element("x")) == t.one()


@pytest.mark.parametrize("desc,n", [(GF16, 1), (GF16, 2), (GF16, 3), ("gf(3^2):x^2+1", 1),
                                    ("gf(2^3):x^3+x+1", 2)])
def test_subspace_counts_are_gaussian_binomials(desc, n):
    t = parse_tower(desc)
    subs = all_subspaces(t, n)
    q = t.K.order
    assert len(subs) == gaussian(q, t.degree, n)


def test_dimension_formula_and_lattice_ops():
    t = parse_tower(GF16)
    subs = all_subspaces(t, 2)
    rng = random.Random(0)
    for _ in range(100):
        U, V = rng.choice(subs), rng.choice(subs)
        S, I = subspace_sum(U, V), intersect(U, V)
        assert S.dim + I.dim == U.dim + V.dim
        assert elements_of(I) == elements_of(U) & elements_of(V)
        assert is_subspace(I, U) and is_subspace(U, S)


def test_preimage_against_element_enumeration():
    t = parse_tower(GF16)
    subs = all_subspaces(t, 2)
    rng = random.Random(1)
    for _ in range(200):
        A, B = rng.choice(subs), rng.choice(subs)
        x = from_int(rng.randrange(1, 16))
        P = preimage_in(B, x, A)
        aset = elements_of(A)
        expected = {b for b in elements_of(B) if int_mul16(to_int(x), b) in aset}
        assert elements_of(P) == expected


def test_product_is_basis_independent():
    t = parse_tower(GF16)
    A = span(t, [t.parse_element("1"), t.parse_element("x")])
    B = span(t, [t.parse_element("x^2"), t.parse_element("x^3")])
    A2 = span(t, [t.parse_element("1+x"), t.parse_element("x")])
    assert equal(product(A, B), product(A2, B))
    els = {int_mul16(a, b) for a in elements_of(A) for b in elements_of(B)}
    closure = {0}
    for e in els:
        closure |= {c ^ e for c in closure}
    assert elements_of(product(A, B)) == closure


def test_annihilator_vanishes_exactly():
    t = parse_tower(GF16)
    subs = all_subspaces(t, 2)
    K = t.K
    for V in subs[:20]:
        for B in subs[::7]:
            W = intersect(V, B)
            ann = annihilator(V, B)
            assert len(ann) == B.dim - W.dim
            for phi in ann:
                for w in W.rows:
                    c = B.coords(w)
                    assert K.norm(sum(a * b for a, b in zip(phi, c))) == 0


def test_transcendental_products_promote():
    t = parse_tower("fp(2)(t)")
    A, _ = parse_subspace(t, "1,t")
    B, _ = parse_subspace(t, "t^2")
    P = product(A, B)
    assert P.width == 4 and P.dim == 2
    assert P.contains(t.parse_element("t^3+t^2"))
    assert t.div_exact(t.parse_element("t^2+1"), t.parse_element("t+1")) == t.parse_element("t+1")
    assert t.div_exact(t.parse_element("t^2"), t.parse_element("t+1")) is None


def test_rational_generators_are_cleared():
    t = parse_tower("fp(3)(t)")
    S, scale = parse_subspace(t, "1/(t+1), t/(t+1)")
    assert scale == t.parse_element("t+1")
    assert equal(S, span(t, [t.parse_element("1"), t.parse_element("t")]))
    S2, scale2 = parse_subspace(t, "1,t")
    assert scale2 is None and equal(S, S2)


def test_rationals_tower():
    t = parse_tower("q:x^2-2")
    r = t.parse_element("x")
    assert t.mul(r, r) == (2, 0)
    assert t.mul(t.parse_element("1/2"), (2, 0)) == (1, 0)


def test_bad_descriptors():
    for bad in ("gf(4^2):x^2+x+1", "zz", "gf(2^3):x^2+x+1"):
        with pytest.raises((FieldError, ValueError)):
            parse_tower(bad)
