import math
import random
from fractions import Fraction

import mpmath
import pytest

from torusclosure import torus as tor
from torusclosure.arith import Ball, SignVerdict, dot
from torusclosure.density import (ALGEBRAIC, CONSISTENT, LogLattice, closure, closure_is_algebraic,
                                  conjecture2_test, dual_basis, join_closures, lemma1c_determinant_check,
                                  lemma1c_witness, log_embedding, split_space, unit_log_lattice)
from torusclosure.errors import InputError
from torusclosure.field import make_field
from torusclosure.units import default_unit_system, norm_one_subgroup


def f(b):
    return float(b.mid)


def test_log_embedding_examples(q2):
    sp = log_embedding(q2)
    assert sp.n == 1
    assert f(sp.log_vector(q2(1))[0]) == 0
    assert abs(f(sp.log_vector(q2([3, 2]))[0]) - 1.7627471740390860) < 1e-12
    x = q2([Fraction(11, 7), Fraction(6, 7)])
    assert abs(f(sp.log_vector(x)[0]) - 1.0238) < 1e-4
    # independent oracle: |log| of one conjugate of (11 + 6 sqrt2)/7
    ref = abs(math.log((11 - 6 * math.sqrt(2)) / 7))
    assert abs(abs(f(sp.log_vector(x)[0])) - ref) < 1e-12


def test_unit_log_lattices(q2, cubic):
    L = unit_log_lattice(norm_one_subgroup(default_unit_system(q2)))
    assert L.n == 1 and abs(f(L.basis[0][0]) - 1.7627471740390860) < 1e-12
    C = unit_log_lattice(norm_one_subgroup(default_unit_system(cubic)))
    assert C.n == 2 and C.gram_sign in (SignVerdict.POSITIVE, SignVerdict.NEGATIVE)
    # imaginary quadratic: unit rank 0, empty lattice
    K = make_field([1, 0, 1])
    assert unit_log_lattice(default_unit_system(K)).n == 0


def test_dual_basis_pairs_to_identity():
    L = LogLattice(split_space(3), [(1, 2, 3), (Fraction(1, 2), 1, 5), (7, 1, 2)], "Proven")
    B = L.vectors(256)
    M = dual_basis(L, 256)
    for i in range(3):
        for j in range(3):
            e = dot(M[i], B[j])
            assert abs(e.mid - int(i == j)) + e.rad < Fraction(1, 2 ** 100)


def test_closure_examples(q2):
    L = unit_log_lattice(norm_one_subgroup(default_unit_system(q2)))
    rep = closure(L, [q2(1)])
    assert rep.dim == 0 and not rep.dense and rep.kernel_chars == ((1,),)
    rep = closure(L, [q2([3, 2])])
    assert rep.dim == 0 and rep.status.is_exact
    rep = closure(L, [q2([Fraction(11, 7), Fraction(6, 7)])])
    assert rep.dim == 1 and rep.dense and rep.status.kind == "NumericOnly"
    assert rep.status.height_bound == 10 ** 6 and rep.status.prec >= 256


def test_closure_invariant_dim_plus_rank():
    L = [[1, 0], [0, 1]]
    for u in ([Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 2), Ball.exact(0)]):
        rep = closure(L, [u], H=1000)
        assert rep.dim + len(rep.kernel_chars) == 2
        assert rep.dense == (rep.dim == 2)


def test_rational_point_in_torus_is_finite():
    rep = closure([[1, 0], [0, 1]], [[Fraction(1, 2), Fraction(2, 3)]], H=1000)
    assert rep.dim == 0


def test_mixed_point_has_one_dim_closure():
    with mpmath.workprec(300):
        r = mpmath.sqrt(2)
    src = lambda p: Ball.from_mid_rad(Fraction(int(mpmath.floor(r * 2 ** 280)), 2 ** 280), Fraction(1, 2 ** 279), p)
    rep = closure([[1, 0], [0, 1]], [[Fraction(1, 3), src]], H=1000)
    assert rep.dim == 1 and [list(k) for k in rep.kernel_chars] == [[3, 0]]


def test_join_matches_joint_computation(q2):
    L = [[1, 0], [0, 1]]
    pts = [[Fraction(1, 2), Fraction(0)], [Fraction(0), Fraction(1, 3)]]
    joint = closure(L, pts, H=1000)
    dim, K = join_closures([closure(L, [p], H=1000) for p in pts])
    assert dim == joint.dim == 0


def test_lemma1c_exact_examples():
    assert lemma1c_determinant_check([[1]], [Fraction(1, 2)], 2, [-1], []) is SignVerdict.ZERO
    assert lemma1c_determinant_check([[1]], [Fraction(1, 2)], 1, [0], []) is SignVerdict.POSITIVE
    with pytest.raises(InputError):
        lemma1c_determinant_check([[1]], [Fraction(1, 2)], 0, [0], [])


def test_lemma1c_witness_makes_matrix_singular():
    # u = (1/3, 1/2): character c = (3, 0) pairs to 1
    r, lam, ells = lemma1c_witness((3, 0), 1)
    assert lemma1c_determinant_check([[1, 0], [0, 1]], [Fraction(1, 3), Fraction(1, 2)], r, lam, ells) \
        is SignVerdict.ZERO


def test_lemma1c_dense_cubic_never_zero(cubic):
    L = unit_log_lattice(norm_one_subgroup(default_unit_system(cubic)))
    a = cubic([3, -1, 0])
    x = a / a.apply_automorphism(1)
    rng = random.Random(3)
    for _ in range(5):
        r = rng.choice([i for i in range(-10, 11) if i])
        lam = [rng.randint(-10, 10) for _ in range(2)]
        ell = [[rng.randint(-10, 10) or 1, rng.randint(-10, 10)]]
        assert lemma1c_determinant_check(L, x, r, lam, ell) in (SignVerdict.POSITIVE, SignVerdict.NEGATIVE)


def test_algebraicity_trivial_cases(q2):
    L = unit_log_lattice(norm_one_subgroup(default_unit_system(q2)))
    dense = closure(L, [q2([Fraction(11, 7), Fraction(6, 7)])])
    assert closure_is_algebraic(dense).kind == ALGEBRAIC
    finite = closure(L, [q2(1)])
    assert closure_is_algebraic(finite).kind == ALGEBRAIC


def test_split_algebraic_subtorus():
    # w = (3, 5, 1) against the identity-log lattice of (2, 3, 7): kernel character (0, 0, 1) is rational
    L = LogLattice(split_space(3), [(2, 1, 1), (1, 3, 1), (1, 1, 7)], "Proven")
    rep = closure(L, [(3, 5, 1)])
    assert rep.dim == 2
    assert closure_is_algebraic(rep, "split").kind == ALGEBRAIC


def test_conjecture2_examples(q2, cubic):
    assert conjecture2_test(q2, [q2([3, 2])]).verdict == CONSISTENT
    r = conjecture2_test(q2, [q2([Fraction(11, 7), Fraction(6, 7)])])
    assert (r.euclidean_dim, r.zariski_dim, r.verdict) == (1, 1, CONSISTENT)
    a = cubic([3, -1, 0])
    r = conjecture2_test(cubic, [a / a.apply_automorphism(1)])
    assert (r.euclidean_dim, r.zariski_dim, r.verdict) == (2, 2, CONSISTENT)


def test_conjecture2_rejects_bad_input(q2):
    with pytest.raises(InputError):
        conjecture2_test(q2, [q2(2)])
    with pytest.raises(InputError):
        conjecture2_test(tor.restriction_torus(q2), [q2(1)])
