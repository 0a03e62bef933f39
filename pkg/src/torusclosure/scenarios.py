"""Bundled pipelines: the split-torus counterexample, the cubic norm-one torus,
and four-exponentials matrix checks."""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import mpmath

from .arith import (DEFAULT_PREC, MAX_PREC, Ball, SignVerdict, ball_det, ball_log, det_exact_zero_by_skew,
                    sign_certified)
from .density import (LogLattice, closure, closure_is_algebraic, log_embedding, split_space, unit_log_lattice)
from .errors import InputError
from .field import make_field, norm
from .relations import DEFAULT_HEIGHT, Status, find_integer_relations, linear_dependencies
from .units import default_unit_system, norm_one_subgroup

CUBIC = (-1, -3, 0, 1)


@dataclass
class Step:
    operation: str
    verdict: object
    certification: str
    data: dict = dc_field(default_factory=dict)


@dataclass
class ScenarioReport:
    name: str
    inputs: dict
    steps: list = dc_field(default_factory=list)
    conclusion: dict = dc_field(default_factory=dict)

    def add(self, operation, verdict, certification, **data):
        self.steps.append(Step(operation, verdict, str(certification), data))

    def step(self, operation):
        return next(s for s in self.steps if s.operation == operation)


def _log_src(q):
    q = Fraction(q)
    return lambda p: ball_log(Ball.exact(q, p + 64), p)


def _log_matrix(A, prec):
    return [[ball_log(Ball.exact(Fraction(a), prec + 64), prec) for a in row] for row in A]


def _exact_relation_check(vectors, z):
    """prod_i vectors[i][j]^z_i == 1 for every coordinate j (exact rationals)."""
    n = len(vectors[0])
    for j in range(n):
        acc = Fraction(1)
        for v, e in zip(vectors, z):
            if e:
                acc *= Fraction(v[j]) ** e
        if acc != 1:
            return False
    return True


def _dependencies(vectors, H, prec, max_prec):
    """Integer relations among the log-vectors of rational vectors, verified exactly."""
    srcs = [[_log_src(a) for a in v] for v in vectors]
    return linear_dependencies(srcs, H, prec, max_prec, verify=lambda z: _exact_relation_check(vectors, z))


# the split-torus counterexample -----------------------------------------------------

SKEW_ROWS = ((1, 2, 3), (Fraction(1, 2), 1, 5), (Fraction(1, 3), Fraction(1, 5), 1))
GAMMA = ((1, 2, 3), (Fraction(1, 2), 1, 5), (7, 1, 2))
W_POINT = (3, 5, 1)


def run_counterexample(H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC):
    rep = ScenarioReport("counterexample", {
        "skew_rows": [[str(Fraction(a)) for a in r] for r in SKEW_ROWS],
        "gamma": [[str(Fraction(a)) for a in r] for r in GAMMA],
        "w": [str(a) for a in W_POINT],
        "heightBound": H, "prec": prec,
    })
    # (1) the skew matrix: exact zero determinant, no rational row/column relations
    skew = _log_matrix(SKEW_ROWS, prec)
    rep.add("det_exact_zero_by_skew", det_exact_zero_by_skew(skew, skew=True), "VerifiedExact",
            det=ball_det(skew))
    rows = _dependencies(SKEW_ROWS, H, prec, max_prec)
    cols = _dependencies([tuple(r[j] for r in SKEW_ROWS) for j in range(3)], H, prec, max_prec)
    rep.add("skew_rows_independent", not rows.relations, rows.status, relations=rows.relations)
    rep.add("skew_columns_independent", not cols.relations, cols.status, relations=cols.relations)

    # (2) Gamma is a lattice: certified nonzero determinant
    B = _log_matrix(GAMMA, prec)
    det = ball_det(B)
    sign = sign_certified(det)
    rep.add("ball_det", sign, "certified sign", det=det)
    with mpmath.workprec(prec + 64):
        l2, l5, l7 = mpmath.log(2), mpmath.log(5), mpmath.log(7)
        oracle = l2 * (l2 ** 2 + l5 * l7)

    # (3) closure of w in Gamma \ (R_+)^3
    space = split_space(3)
    L = LogLattice(space, GAMMA, "Proven")
    cl = closure(L, [W_POINT], H, prec, max_prec)
    rep.add("closure", cl.dim, cl.status, kernel_chars=cl.kernel_chars, dense=cl.dense)

    # (4) algebraicity in split coordinates
    alg = closure_is_algebraic(cl, "split", H, prec, max_prec)
    rep.add("closure_is_algebraic", alg.kind, alg.status, characters=alg.characters, detail=alg.detail)

    # (5) the coordinates of w generate a group of rank 2, so w lies in a proper subtorus
    coords = find_integer_relations([_log_src(a) for a in W_POINT], H, prec, max_prec,
                                    verify=lambda z: _exact_relation_check([(a,) for a in W_POINT], z))
    rank = 3 - len(coords.relations)
    rep.add("coordinate_group_rank", rank, coords.status, relations=coords.relations)

    rep.conclusion = {
        "skewDeterminantZero": rep.step("det_exact_zero_by_skew").verdict is True,
        "latticeDeterminantSign": sign.value,
        "latticeDeterminantOracle": mpmath.nstr(oracle, 30),
        "closureDim": cl.dim,
        "algebraicity": alg.kind,
        "coordinateRank": rank,
        "properSubgroupCharacter": list(coords.relations[0]) if coords.relations else None,
    }
    return rep


# the cyclic cubic norm-one torus --------------------------------------------------------


def default_example2_element(K):
    """(3 - t) / sigma(3 - t): norm one, not a unit (N(3 - t) = f(3) = 17)."""
    a = K(3) - K.gen
    return a / a.apply_automorphism(1)


def run_example2(K=None, x=None, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC, units=None):
    K = K or make_field(list(CUBIC))
    if K.d != 3 or K.r1 != 3:
        raise InputError("example2 needs a totally real cubic field")
    x = default_example2_element(K) if x is None else K(x)
    if norm(x) != 1:
        raise InputError(f"{x} has norm {norm(x)}, expected 1")
    rep = ScenarioReport("example2", {"field": list(K.poly), "x": x.to_str(), "heightBound": H, "prec": prec})
    U = norm_one_subgroup(units if units is not None else default_unit_system(K))
    L = unit_log_lattice(U)
    rep.add("unit_log_lattice", [g.to_str() for g in U.gens], f"maximality {U.maximality}",
            gram_sign=L.gram_sign.value)
    cl = closure(L, [x], H, prec, max_prec)
    rep.add("closure", cl.dim, cl.status, kernel_chars=cl.kernel_chars, dense=cl.dense)
    space = log_embedding(K)
    u = space.log_vector(x, prec)
    multiples = []
    for g in U.gens:
        src = [[(lambda p, x=x, j=j: space.log_vector(x, p)[j]) for j in range(2)],
               [(lambda p, g=g, j=j: space.log_vector(g, p)[j]) for j in range(2)]]
        res = linear_dependencies(src, H, prec, max_prec)
        multiples.append(res)
        rep.add("rational_multiple_of_unit_log", bool(res.relations), res.status, unit=g.to_str(),
                relations=res.relations)
    M = [u, space.log_vector(U.gens[0], prec)]
    det = ball_det(M)
    rep.add("four_exponentials_det", sign_certified(det), "certified sign", det=det)
    rep.conclusion = {
        "closureDim": cl.dim,
        "dense": cl.dense,
        "status": str(cl.status),
        "rationalMultiple": any(bool(r.relations) for r in multiples),
        "logDeterminantSign": sign_certified(det).value,
    }
    return rep


# four exponentials -----------------------------------------------------------------


def four_exp_matrix_check(A, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC):
    """Check the four-exponentials preconditions and certify det (2x2) or rank 2 (2x3)."""
    A = [[Fraction(a) for a in row] for row in A]
    if len(A) != 2 or len(A[0]) not in (2, 3) or any(len(r) != len(A[0]) for r in A):
        raise InputError("four_exp_matrix_check expects a 2x2 or 2x3 matrix")
    if any(a <= 0 for row in A for a in row):
        raise InputError("entries must be positive rationals")
    m = len(A[0])
    rep = ScenarioReport("fourexp", {"matrix": [[str(a) for a in row] for row in A], "heightBound": H, "prec": prec})
    rows = _dependencies(A, H, prec, max_prec)
    cols = _dependencies([tuple(A[i][j] for i in range(2)) for j in range(m)], H, prec, max_prec)
    rep.add("row_relations", rows.relations, rows.status)
    rep.add("column_relations", cols.relations, cols.status)
    if rows.relations or cols.relations:
        which = "row" if rows.relations else "column"
        found = rows if rows.relations else cols
        rep.conclusion = {"verdict": "PRECONDITION-FAILED", "relationKind": which,
                          "relation": list(found.relations[0]), "status": str(found.status)}
        return rep
    M = _log_matrix(A, prec)
    if m == 2:
        det = ball_det(M)
        s = sign_certified(det)
        rep.add("ball_det", s, "certified sign", det=det)
        rep.conclusion = {"verdict": "DET-" + s.value.upper(), "sign": s.value,
                          "preconditions": str(Status.numeric(H, max(rows.status.prec, cols.status.prec)))}
        return rep
    found = None
    for a in range(m):
        for b in range(a + 1, m):
            det = ball_det([[M[0][a], M[0][b]], [M[1][a], M[1][b]]])
            s = sign_certified(det)
            rep.add("minor", s, "certified sign", columns=(a, b), det=det)
            if s is not SignVerdict.UNKNOWN and found is None:
                found = (a, b)
    rep.conclusion = {"verdict": "RANK-2" if found else "RANK-UNKNOWN", "minor": list(found) if found else None,
                      "preconditions": str(Status.numeric(H, max(rows.status.prec, cols.status.prec)))}
    return rep
