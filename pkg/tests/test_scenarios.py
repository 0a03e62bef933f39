from fractions import Fraction

import mpmath
import pytest

from torusclosure.arith import SignVerdict
from torusclosure.errors import InputError
from torusclosure.field import norm
from torusclosure.scenarios import (default_example2_element, four_exp_matrix_check, run_counterexample,
                                    run_example2)


@pytest.fixture(scope="module")
def counterexample():
    return run_counterexample()


def test_counterexample_conclusion(counterexample):
    c = counterexample.conclusion
    assert c["skewDeterminantZero"] is True
    assert c["latticeDeterminantSign"] == "Positive"
    assert c["closureDim"] == 2
    assert c["algebraicity"] == "NotAlgebraic"
    assert c["coordinateRank"] == 2
    assert c["properSubgroupCharacter"] == [0, 0, 1]


def test_counterexample_steps_trace_conclusion(counterexample):
    ops = [s.operation for s in counterexample.steps]
    assert ops[0] == "det_exact_zero_by_skew"
    det = counterexample.step("ball_det")
    assert det.verdict is SignVerdict.POSITIVE
    b = det.data["det"]
    with mpmath.workprec(320):
        l2, l5, l7 = mpmath.log(2), mpmath.log(5), mpmath.log(7)
        ref = l2 * (l2 ** 2 + l5 * l7)
        assert abs(mpmath.mpf(b.mid.numerator) / b.mid.denominator - ref) < mpmath.mpf(10) ** -20
    assert b.rad < Fraction(1, 2 ** 100)
    # dim + rank K = 3
    cl = counterexample.step("closure")
    assert cl.verdict + len(cl.data["kernel_chars"]) == 3


def test_example2_default(cubic):
    x = default_example2_element(cubic)
    assert norm(x) == 1
    rep = run_example2(cubic, x)
    assert rep.conclusion["closureDim"] == 2 and rep.conclusion["dense"]
    assert rep.conclusion["rationalMultiple"] is False


def test_example2_trivial_points(cubic):
    assert run_example2(cubic, cubic(1)).conclusion["closureDim"] == 0


def test_example2_rejects_bad_norm(cubic):
    with pytest.raises(InputError):
        run_example2(cubic, cubic(2))


def test_fourexp_examples():
    r = four_exp_matrix_check([[2, 3], [3, 2]])
    assert r.conclusion["verdict"] == "DET-NEGATIVE"
    r = four_exp_matrix_check([[2, 4], [3, 9]])
    assert r.conclusion["verdict"] == "PRECONDITION-FAILED"
    assert r.conclusion["relationKind"] == "column"
    assert r.conclusion["relation"] in ([2, -1], [-2, 1])
    assert r.conclusion["status"] == "VerifiedExact"
    r = four_exp_matrix_check([[2, 3, 5], [3, 5, 2]])
    assert r.conclusion["verdict"] == "RANK-2"


def test_fourexp_rejects_bad_shapes():
    with pytest.raises(InputError):
        four_exp_matrix_check([[2, 3]])
    with pytest.raises(InputError):
        four_exp_matrix_check([[2, -3], [3, 2]])
