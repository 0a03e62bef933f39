import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from torusclosure.arith import Ball, ball_log
from torusclosure.errors import InputError
from torusclosure.relations import (NUMERIC_ONLY, VERIFIED_EXACT, canonical_basis, find_integer_relations, hnf,
                                    int_det, intersect, is_lll_reduced, is_unimodular, kernel, lattice_basis,
                                    linear_dependencies, lll_reduce, matmul, rank, rational_vectors_in_span,
                                    same_lattice, saturate, simultaneous_relations, snf)

small = st.integers(min_value=-9, max_value=9)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@given(matrices(3, 4))
@settings(max_examples=100, deadline=None)
def test_hnf_is_echelon_and_unimodular(M):
    H, U = hnf(M, with_transform=True)
    assert matmul(U, M) == H
    assert is_unimodular(U)
    assert rank(H) == sympy.Matrix(M).rank()
    last = -1
    for row in H:
        if any(row):
            piv = next(j for j, v in enumerate(row) if v)
            assert piv > last and row[piv] > 0
            last = piv


@given(matrices(3, 3))
@settings(max_examples=60, deadline=None)
def test_snf_matches_sympy_invariants(M):
    D, U, V = snf(M)
    assert matmul(matmul(U, M), V) == D
    ours = [abs(D[i][i]) for i in range(3) if D[i][i]]
    ref = smith_normal_form(sympy.Matrix(M), domain=sympy.ZZ)
    theirs = [abs(int(ref[i, i])) for i in range(3) if ref[i, i]]
    assert ours == theirs


@given(matrices(2, 4))
@settings(max_examples=80, deadline=None)
def test_kernel_is_saturated(M):
    K = kernel(M, ncols=4)
    assert len(K) == 4 - sympy.Matrix(M).rank()
    for k in K:
        assert all(sum(a * b for a, b in zip(row, k)) == 0 for row in M)
    if K:
        assert same_lattice(saturate(K, 4), lattice_basis(K))


def test_saturate_and_intersect():
    assert saturate([[2, 4]], 2) == [[1, 2]]
    A = [[2, 0], [0, 1]]
    B = [[1, 0], [0, 3]]
    assert same_lattice(intersect(A, B, 2), [[2, 0], [0, 3]])


def test_int_det_bareiss():
    M = [[3, 1, 4], [1, 5, 9], [2, 6, 5]]
    assert int_det(M) == sympy.Matrix(M).det()


@given(st.lists(st.lists(st.integers(-50, 50), min_size=3, max_size=3), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_lll_output_is_reduced_basis(B):
    if sympy.Matrix(B).det() == 0:
        with pytest.raises(InputError):
            lll_reduce(B)
        return
    R, T = lll_reduce(B)
    assert is_lll_reduced(R)
    assert matmul(T, B) == R
    assert abs(int_det(T)) == 1


def test_canonical_basis_is_stable():
    L = [[2, -1, 0], [0, 3, 1]]
    C = canonical_basis(L)
    assert canonical_basis([[2, 2, 1], [0, -3, -1]]) == C


def log_src(q):
    return lambda p: ball_log(Ball.exact(Fraction(q), p + 64), p)


def test_planted_log_relation():
    res = find_integer_relations([log_src(2), log_src(3), log_src(12)])
    assert [list(r) for r in res.relations] == [[2, 1, -1]]
    assert res.status.kind == NUMERIC_ONLY


def test_exact_verification_upgrades_status():
    def verify(z):
        acc = Fraction(1)
        for q, e in zip((2, 3, 12), z):
            acc *= Fraction(q) ** e
        return acc == 1

    res = find_integer_relations([log_src(2), log_src(3), log_src(12)], verify=verify)
    assert res.status.kind == VERIFIED_EXACT


def test_no_relation_is_conditional():
    res = find_integer_relations([log_src(2), log_src(3), log_src(5)], H=10 ** 6)
    assert res.relations == ()
    assert (res.status.height_bound, res.status.prec) == (10 ** 6, res.prec)


def test_relation_above_height_is_not_reported():
    # 2^1001 = ... has relation height 1001 between log 2 and log(2^1001)
    res = find_integer_relations([log_src(2), log_src(Fraction(2) ** 1001)], H=100)
    assert res.relations == ()


def test_linear_dependencies_vectors():
    res = linear_dependencies([[log_src(2), log_src(3)], [log_src(4), log_src(9)], [log_src(5), log_src(7)]])
    assert [list(r) for r in res.relations] == [[2, -1, 0]]


def test_simultaneous_relations_rational_matrix():
    # c . T in Z^r: T = [[1/2], [1/3]] -> (2,0,-1), (0,3,-1) generate
    T = [[Fraction(1, 2)], [Fraction(1, 3)]]
    res = simultaneous_relations(T, H=100)
    L = lattice_basis([list(r) for r in res.relations])
    assert same_lattice(L, [[2, 0, 1], [0, 3, 1]]) or same_lattice(L, [[2, 0, -1], [0, 3, -1]])


def test_rational_vectors_in_span():
    v = [[Ball.exact(1), ball_log(Ball.exact(3, 320), 256), Ball.exact(0)],
         [Ball.exact(0), Ball.exact(0), Ball.exact(1)]]
    res = rational_vectors_in_span(v)
    assert [list(r) for r in res.relations] == [[0, 0, 1]]


def _brute_relations(vals, box):
    hits = []
    for z in itertools.product(range(-box, box + 1), repeat=len(vals)):
        if any(z) and abs(sum(a * b for a, b in zip(z, vals))) < 1e-9:
            hits.append(list(z))
    return lattice_basis(hits) if hits else []


def test_random_planted_against_brute_force():
    rng = random.Random(7)
    for _ in range(15):
        base = [log_src(p) for p in (2, 3)]
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)
        third = Fraction(2) ** a * Fraction(3) ** b
        xs = base + [log_src(third)]
        res = find_integer_relations(xs, H=1000)
        import math
        vals = [math.log(2), math.log(3), math.log(float(third))]
        assert same_lattice(lattice_basis([list(r) for r in res.relations]) if res.relations else [],
                            _brute_relations(vals, 4))
