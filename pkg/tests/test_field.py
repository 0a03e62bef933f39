from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from torusclosure import poly
from torusclosure.arith import Ball
from torusclosure.errors import InputError, NotGaloisError, ReducibleError
from torusclosure.field import (characteristic_polynomial, conjugate_group_rank, embed,
                                galois_automorphisms, generates_field, is_algebraic_integer, is_unit,
                                log_abs_embedding, make_field, minimal_polynomial, norm, trace)

x = sympy.symbols("x")
coeff = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def sym_poly(f):
    return sympy.Poly(list(reversed(f)), x)


def sym_norm(el):
    # resultant oracle: N(g(t)) = Res(f, g) / lc(f)^deg g  (f monic here)
    f = sym_poly(el.field.poly)
    g = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(el.coeffs)], x, domain="QQ")
    if g.is_zero:
        return 0
    return sympy.resultant(f.as_expr(), g.as_expr(), x)


@pytest.mark.parametrize("f,sig,disc", [
    ((-2, 0, 1), (2, 0), 8),
    ((-1, -3, 0, 1), (3, 0), 81),
    ((-2, 0, 0, 1), (1, 1), -108),
    ((1, 0, 1), (0, 1), -4),
])
def test_signature_and_discriminant(f, sig, disc):
    K = make_field(list(f))
    assert K.signature == sig
    assert K.discriminant == disc == sympy.discriminant(sym_poly(f))


def test_reducible_rejected():
    with pytest.raises(ReducibleError):
        make_field([-1, 0, 1])
    with pytest.raises(InputError):
        make_field([5])


def test_arithmetic_and_inverse(q2):
    a = q2.gen
    assert a * a == q2(2)
    e = q2([1, 1])
    assert e * e.inverse() == q2(1)
    assert (q2(3) + a) / (q2(3) - a) == q2([Fraction(11, 7), Fraction(6, 7)])


@given(st.lists(coeff, min_size=3, max_size=3), st.lists(coeff, min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_norm_multiplicative_and_matches_resultant(u, v):
    K = make_field([-1, -3, 0, 1])
    a, b = K(u), K(v)
    assert norm(a * b) == norm(a) * norm(b)
    assert norm(a) == sym_norm(a)


@given(st.lists(coeff, min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_minimal_polynomial_against_sympy(c):
    K = make_field([-1, -3, 0, 1])
    a = K(c)
    mp = minimal_polynomial(a)
    t = sympy.symbols("t")
    root = sympy.CRootOf(t ** 3 - 3 * t - 1, 0)
    expr = sum(sympy.Rational(q.numerator, q.denominator) * root ** i for i, q in enumerate(c))
    ref = sympy.Poly(sympy.minimal_polynomial(expr, x), x).monic()
    assert [Fraction(int(v.p), int(v.q)) for v in reversed(ref.all_coeffs())] == list(mp)
    assert generates_field(a) == (len(mp) == 4)


def test_char_poly_trace_norm(cubic):
    a = cubic.gen
    cp = characteristic_polynomial(a)
    assert list(cp) == [Fraction(c) for c in (-1, -3, 0, 1)]
    assert trace(a) == 0 and norm(a) == 1
    # 1 + t has norm -1 here: -f(-1) = -1
    assert norm(cubic([1, 1])) == -1


def test_units_and_integrality(q2):
    assert is_unit(q2([1, 1]))
    assert not is_unit(q2([3, 1]))
    assert is_algebraic_integer(q2([3, 1]))
    assert not is_algebraic_integer(q2([Fraction(1, 2), 0]))


def test_cyclic_cubic_galois(cubic):
    auts = galois_automorphisms(cubic)
    f = list(cubic.poly)
    for s in auts:
        # s(t) must itself be a root of f
        assert poly.rem(poly.compose_mod(f, list(s.coeffs), f), f) in ([], [0], [Fraction(0)] * 0) or \
            all(c == 0 for c in poly.rem(poly.compose_mod(f, list(s.coeffs), f), f))
    gens = {s.coeffs for s in auts}
    assert (Fraction(2), Fraction(0), Fraction(-1)) in gens   # t -> 2 - t^2
    T = cubic.galois_table
    assert sorted(T[1]) == [0, 1, 2] and T[0] == [0, 1, 2]


def test_non_galois_cubic():
    K = make_field([-2, 0, 0, 1])
    assert not K.is_galois
    with pytest.raises(NotGaloisError):
        galois_automorphisms(K)


def test_embeddings_match_mpmath(cubic):
    el = cubic([Fraction(1, 3), 2, -1])
    with mpmath.workprec(300):
        roots = sorted(mpmath.polyroots([1, 0, -3, -1], maxsteps=200, extraprec=300), key=lambda r: float(r.real))
        for j, r in enumerate(roots):
            ref = mpmath.mpf(1) / 3 + 2 * r.real - r.real ** 2
            b = embed(el, j, 200)
            assert isinstance(b, Ball)
            assert abs(mpmath.mpf(b.mid.numerator) / b.mid.denominator - ref) < mpmath.mpf(2) ** -190
            lb = log_abs_embedding(el, j, 200)
            assert abs(mpmath.mpf(lb.mid.numerator) / lb.mid.denominator - mpmath.log(abs(ref))) < mpmath.mpf(2) ** -190


def test_complex_embedding():
    K = make_field([-2, 0, 0, 1])
    re, im = embed(K.gen, 1, 128)
    z = complex(float(re.mid), float(im.mid))
    assert abs(z ** 3 - 2) < 1e-12 and abs(im.mid) > 0


@pytest.mark.parametrize("c,rank", [
    ([3, 0, 0], 1),      # rational: conjugates all equal
    ([1, 1, 0], 2),      # unit of norm -1: product of conjugates is -1
    ([3, -1, 0], 3),     # norm 17, conjugates independent
])
def test_conjugate_group_rank_cubic(cubic, c, rank):
    r, res = conjugate_group_rank(cubic(c))
    assert r == rank
    if rank < 3:
        assert res.status.is_exact


def test_conjugate_group_rank_quadratic(q2):
    assert conjugate_group_rank(q2([1, 1]))[0] == 1
    assert conjugate_group_rank(q2([3, 1]))[0] == 2
    assert conjugate_group_rank(q2(5))[0] == 1
