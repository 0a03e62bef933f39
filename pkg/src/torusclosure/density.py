"""Euclidean closures in compact quotients R^n / Lambda.

A point u generates a subgroup of R^n / Lambda whose closure has identity
component W = annihilator of K, where K is the lattice of dual vectors pairing
integrally with u.  K is found by simultaneous relation detection.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd, lcm
from typing import Optional

from .arith import (DEFAULT_PREC, MAX_PREC, Ball, SignVerdict, ball_det, ball_inverse, ball_log, dot, exact_sign,
                    fraction_det, sign_certified)
from .errors import ConsistencyError, InputError, RankError
from .field import FieldElement, NumberField, log_abs_embedding, norm
from .relations import (DEFAULT_HEIGHT, RelationResult, Status, as_source, canonical_basis, hnf, intersect,
                        kernel, lattice_basis, rank as int_rank, rational_vectors_in_span, simultaneous_relations)
from . import torus as tor
from .units import UnitSystem, default_unit_system, norm_one_subgroup

ALGEBRAIC = "Algebraic"
NOT_ALGEBRAIC = "NotAlgebraic"
UNKNOWN = "Unknown"

CONSISTENT = "CONSISTENT"
DEVIATION = "DEVIATION-CANDIDATE"


# log spaces -------------------------------------------------------------------


class LogSpace:
    """Log coordinates of a product of norm-one, restriction and split components.

    Coordinates are indexed by places (real embeddings, then one embedding per
    complex pair).  Norm-one components drop place 0, restriction components
    keep every place, split components contribute one coordinate log|x|.
    """

    def __init__(self, comps):
        self.comps = tuple(comps)  # (kind, field or None)
        self.n = sum(self._width(k, F) for k, F in self.comps)

    @staticmethod
    def _places(kind, F):
        places = list(range(F.r1)) + [F.r1 + 2 * k for k in range(F.r2)]
        return places[1:] if kind == tor.NORM_ONE else places

    @classmethod
    def _width(cls, kind, F):
        if F is None:
            return 1
        return len(cls._places(kind, F))

    def point(self, p):
        if not isinstance(p, (list, tuple)):
            p = (p,)
        if len(p) != len(self.comps):
            raise InputError(f"point has {len(p)} coordinates, expected {len(self.comps)}")
        out = []
        for (kind, F), x in zip(self.comps, p):
            if F is None:
                if isinstance(x, FieldElement):
                    x = x.coeffs[0]
                x = Fraction(x)
                if x == 0:
                    raise InputError("log of zero")
            else:
                x = F(x)
                if x.is_zero():
                    raise InputError("log of zero")
            out.append(x)
        return tuple(out)

    def log_vector(self, p, prec=DEFAULT_PREC):
        p = self.point(p)
        out = []
        for (kind, F), x in zip(self.comps, p):
            if F is None:
                out.append(ball_log(Ball.exact(abs(x), prec + 64), prec))
                continue
            out.extend(log_abs_embedding(x, j, prec) for j in self._places(kind, F))
        return out

    def power_product(self, points, exps):
        """prod points[i]^exps[i], coordinatewise and exact."""
        acc = None
        for p, e in zip(points, exps):
            p = self.point(p)
            if acc is None:
                acc = [(F(1) if F is not None else Fraction(1)) for _, F in self.comps]
            if e:
                acc = [a * x ** e for a, x in zip(acc, p)]
        if acc is None:
            acc = [(F(1) if F is not None else Fraction(1)) for _, F in self.comps]
        return tuple(acc)

    @staticmethod
    def is_torsion(p):
        """Every coordinate is +-1 (squares to one)."""
        return all(x * x == 1 for x in p)

    def __eq__(self, other):
        return isinstance(other, LogSpace) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)


def log_embedding(target):
    """Log coordinates for the norm-one torus of a field, or for a torus spec."""
    if isinstance(target, NumberField):
        return LogSpace([(tor.NORM_ONE, target)])
    if isinstance(target, tor.TorusSpec):
        comps = []
        for c in target.components():
            comps.append((c.kind, c.field if c.kind != tor.SPLIT else None))
        return LogSpace(comps)
    raise InputError("log_embedding expects a NumberField or TorusSpec")


def split_space(n):
    return LogSpace([(tor.SPLIT, None)] * n)


# lattices -------------------------------------------------------------------------


class LogLattice:
    """Lattice in R^n spanned by log vectors of exact generators."""

    def __init__(self, space, gens, maximality="Unverified", certify=True):
        self.space = space
        self.gens = tuple(space.point(g) for g in gens)
        self.maximality = maximality
        self.n = space.n
        self._cache = {}
        if len(self.gens) != self.n:
            raise RankError(f"{len(self.gens)} generators for a {self.n}-dimensional log space")
        if certify and self.n:
            self.gram_sign = _certify_independent(self)

    def vectors(self, prec=DEFAULT_PREC):
        if prec not in self._cache:
            self._cache[prec] = [self.space.log_vector(g, prec) for g in self.gens]
        return self._cache[prec]

    @property
    def basis(self):
        return self.vectors(DEFAULT_PREC)

    def matrix_det(self, prec=DEFAULT_PREC):
        return ball_det(self.vectors(prec))


def _certify_independent(L, max_prec=4096):
    p = DEFAULT_PREC
    while p <= max_prec:
        s = sign_certified(L.matrix_det(p))
        if s is not SignVerdict.UNKNOWN:
            return s
        p *= 2
    raise RankError("log lattice basis is not certified independent")


def unit_log_lattice(U, space=None):
    """Log lattice of a unit system (norm-one units for norm-one quotients)."""
    space = space or log_embedding(U.field)
    return LogLattice(space, list(U.gens), U.maximality)


def torus_unit_lattice(S, units=None):
    """Block unit lattice for a product of norm-one tori (norm-one units per component)."""
    comps = S.components()
    for c in comps:
        if c.kind != tor.NORM_ONE:
            raise InputError("unit lattices are built for products of norm-one tori only")
    space = log_embedding(S)
    gens = []
    maxi = "Proven"
    for ci, c in enumerate(comps):
        U = units.get(c.field) if isinstance(units, dict) else units
        if U is None or U.field != c.field:
            U = default_unit_system(c.field)
        U1 = norm_one_subgroup(U)
        if U1.maximality != "Proven":
            maxi = "Unverified"
        for g in U1.gens:
            p = [c2.field(1) for c2 in comps]
            p[ci] = g
            gens.append(tuple(p))
    return LogLattice(space, gens, maxi)


def dual_basis(L, prec=DEFAULT_PREC):
    """Rows m_i with <m_i, b_j> = delta_ij, by certified inversion."""
    B = L.vectors(prec) if isinstance(L, LogLattice) else _ball_rows(L, prec)
    if not B:
        return []
    inv = ball_inverse(B)  # B * inv = I, so columns of inv are the dual vectors
    n = len(B)
    return [[inv[i][j] for i in range(n)] for j in range(n)]


def _ball_rows(M, prec):
    if callable(M):
        return M(prec)
    return [[as_source(v)(prec) for v in row] for row in M]


# closure ---------------------------------------------------------------------------


@dataclass
class AlgebraicityVerdict:
    kind: str
    characters: tuple = ()
    status: Optional[Status] = None
    detail: str = ""

    def to_dict(self):
        d = {"kind": self.kind, "characters": [list(c) for c in self.characters], "detail": self.detail}
        if self.status is not None:
            d["status"] = self.status.to_dict()
        return d


@dataclass
class ClosureReport:
    n: int
    dim: int
    kernel_chars: tuple
    dense: bool
    status: Status
    coordinates: tuple = ()
    relations: Optional[RelationResult] = None
    algebraic: Optional[AlgebraicityVerdict] = None
    maximality: str = "Unverified"
    exact_identities: tuple = ()
    lattice: object = dc_field(default=None, repr=False)

    @property
    def prec(self):
        return self.status.prec


def _coordinates_source(L, points):
    """callable(prec) -> n x r ball matrix of coordinates of each point in the lattice basis."""

    def T(prec):
        B = L.vectors(prec) if isinstance(L, LogLattice) else _ball_rows(L, prec)
        inv = ball_inverse(B)
        cols = []
        for p in points:
            u = _point_vector(L, p, prec)
            # u = sum_i T_i b_i  <=>  T = u * inv  (row vector times inverse)
            cols.append([dot(u, [inv[k][i] for k in range(len(u))]) for i in range(len(B))])
        return [[cols[j][i] for j in range(len(points))] for i in range(len(B))]

    return T


def _point_vector(L, p, prec):
    if isinstance(L, LogLattice) and not _is_raw_vector(p):
        return L.space.log_vector(p, prec)
    return [as_source(v)(prec) for v in p]


def _is_raw_vector(p):
    return isinstance(p, (list, tuple)) and p and all(isinstance(v, Ball) or callable(v) for v in p)


def closure(L, points, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC):
    """Closure of the subgroup generated by ``points`` in R^n / L (identity component).

    ``L`` is a LogLattice (points are then exact elements) or a square matrix of
    balls / rationals / callables whose rows span the lattice (points are then
    vectors).
    """
    n = L.n if isinstance(L, LogLattice) else len(L)
    points = list(points)
    maximality = L.maximality if isinstance(L, LogLattice) else "Proven"
    if n == 0:
        return ClosureReport(0, 0, (), True, Status.exact(H, prec), maximality=maximality, lattice=L)
    if not points:
        full = tuple(tuple(r) for r in _identity(n))
        return ClosureReport(n, 0, full, False, Status.exact(H, prec), maximality=maximality, lattice=L)
    r = len(points)
    T = _coordinates_source(L, points)
    res = simultaneous_relations(T, H, prec, max_prec, shape=(n, r))
    proj = [list(z[:n]) for z in res.relations if any(z[:n])]
    K = [list(v) for v in canonical_basis(lattice_basis(proj))] if proj else []
    dim = n - len(K)
    status = Status.numeric(H, res.prec)
    identities = ()
    if dim == 0 and isinstance(L, LogLattice) and not any(_is_raw_vector(p) for p in points):
        identities = _exactify(L, points, K)
        if identities is not None:
            status = Status.exact(H, res.prec)
        else:
            identities = ()
    coords = tuple(tuple(row) for row in T(res.prec))
    return ClosureReport(n, dim, tuple(tuple(k) for k in K), dim == n, status, coords, res,
                         maximality=maximality, exact_identities=identities, lattice=L)


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _exactify(L, points, K):
    """For a full-rank K: a*u_j lies in the lattice; check x_j^a = +-prod gens^e exactly."""
    Kq = [[Fraction(v) for v in row] for row in K]
    n = len(K)
    out = []
    T = _coordinates_source(L, points)(DEFAULT_PREC)
    for j, p in enumerate(points):
        # k = K * T_j is integral; solve for T_j exactly
        k = [round(float(sum(Kq[i][c] * T[c][j].mid for c in range(n)))) for i in range(n)]
        t = _solve(Kq, [Fraction(v) for v in k])
        a = lcm(*[v.denominator for v in t]) if t else 1
        e = [int(v * a) for v in t]
        lhs = L.space.power_product([p] + list(L.gens), [a] + [-v for v in e])
        if not L.space.is_torsion(lhs):
            return None
        out.append((a, tuple(e)))
    return tuple(out)


def _solve(A, b):
    n = len(A)
    M = [list(row) + [b[i]] for i, row in enumerate(A)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [v / pv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def join_closures(reports):
    """Closure of a multi-generator group from per-generator closures: K = intersection."""
    if not reports:
        raise InputError("no closures to join")
    n = reports[0].n
    K = [list(k) for k in reports[0].kernel_chars]
    for rep in reports[1:]:
        K = intersect(K, [list(k) for k in rep.kernel_chars], n)
    return n - int_rank(K) if K else n, K


# determinant spot checks ---------------------------------------------------------------------


def lemma1c_matrix(coords, r, lam, ells):
    """Rows r*u + lambda and ell_1..ell_{n-1}, everything in lattice coordinates."""
    first = [c * r + l for c, l in zip(coords, lam)]
    return [first] + [list(e) for e in ells]


def lemma1c_determinant_check(L, u, r, lam, ells, prec=DEFAULT_PREC):
    """Sign of det[r*u + lambda; ell_1; ...; ell_{n-1}] in lattice coordinates.

    ``L`` is a rational basis matrix (exact path, can return ZERO) or a
    LogLattice / ball matrix (numeric path, never ZERO).  ``u`` is an ambient
    vector; lambda and the ell_i are integer coordinate vectors.
    """
    r = int(r)
    if r == 0:
        raise InputError("r must be a nonzero integer")
    n = len(lam)
    if len(ells) != n - 1:
        raise InputError(f"need {n - 1} lattice vectors ell_i")
    if ells and int_rank([list(e) for e in ells]) != n - 1:
        raise InputError("the ell_i must span a rank n-1 sublattice")
    exact = not isinstance(L, LogLattice) and all(
        isinstance(v, (int, Fraction)) for row in L for v in row) and all(isinstance(v, (int, Fraction)) for v in u)
    if exact:
        B = [[Fraction(v) for v in row] for row in L]
        # coordinates c with sum c_i b_i = u
        Bt = [[B[j][i] for j in range(n)] for i in range(n)]
        coords = _solve(Bt, [Fraction(v) for v in u])
        return exact_sign(fraction_det(lemma1c_matrix(coords, r, lam, ells)))
    if isinstance(L, LogLattice) and not _is_raw_vector(u):
        coords = [row[0] for row in _coordinates_source(L, [u])(prec)]
    else:
        B = L.vectors(prec) if isinstance(L, LogLattice) else _ball_rows(L, prec)
        inv = ball_inverse(B)
        uv = [as_source(v)(prec) for v in u]
        coords = [dot(uv, [inv[k][i] for k in range(n)]) for i in range(n)]
    M = lemma1c_matrix(coords, r, [Ball.exact(v, prec) for v in lam], [[Ball.exact(v, prec) for v in e] for e in ells])
    return sign_certified(ball_det(M))


def lemma1c_witness(c, k):
    """(r, lambda, ells) making the spot-check matrix singular for a character c with <c, u> = k."""
    g = 0
    for v in c:
        g = gcd(g, v)
    c = [v // g for v in c]
    k = Fraction(k) / g
    r = k.denominator
    target = -r * k  # integer
    # lambda with c . lambda = target: use a Bezout combination from the HNF transform
    H, U = hnf([[v] for v in c], with_transform=True)
    # U * c^T = (1, 0, ..., 0)^T, so row 0 of U pairs to 1 with c
    lam = [int(target) * v for v in U[0]]
    ells = kernel([c], ncols=len(c))
    return r, lam, ells


# algebraicity ---------------------------------------------------------------------


def _ambient_kernel_vectors(report, prec):
    L = report.lattice
    M = dual_basis(L, prec)
    n = report.n
    return [[sum((M[i][j] * c[i] for i in range(n) if c[i]), Ball.exact(0, prec)) for j in range(n)]
            for c in report.kernel_chars]


def closure_is_algebraic(report, context="split", H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC):
    """Does the identity component of the closure come from an algebraic subtorus?

    ``context`` is "split" (standard character coordinates) or a ZariskiClosure /
    CharSubgroup whose characters live in the same log coordinates.
    """
    n, k = report.n, len(report.kernel_chars)
    if k == 0:
        v = AlgebraicityVerdict(ALGEBRAIC, (), report.status, "dense: whole torus")
    elif report.dim == 0:
        chars = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        v = AlgebraicityVerdict(ALGEBRAIC, chars, report.status, "finite closure: trivial subtorus")
    elif context == "split":
        src = lambda p: _ambient_kernel_vectors(report, p)
        res = rational_vectors_in_span(src, H, prec, max_prec)
        if len(res.relations) == k:
            v = AlgebraicityVerdict(ALGEBRAIC, res.relations, res.status, "span(K) has a rational basis")
        else:
            v = AlgebraicityVerdict(NOT_ALGEBRAIC, res.relations, Status.numeric(H, res.prec),
                                    f"only {len(res.relations)} of {k} rational directions up to height {H}")
    else:
        xf = context.xf if isinstance(context, tor.ZariskiClosure) else context
        chars = [list(c) for c in xf.basis]
        v = _compare_with_characters(report, chars, H, prec, max_prec)
    report.algebraic = v
    return v


def _compare_with_characters(report, chars, H, prec, max_prec):
    k = len(report.kernel_chars)
    if len(chars) != k:
        return AlgebraicityVerdict(NOT_ALGEBRAIC, tuple(tuple(c) for c in chars), Status.numeric(H, report.prec),
                                   f"closure annihilator rank {k} differs from X_F rank {len(chars)}")
    V = _ambient_kernel_vectors(report, prec)
    X = [[Ball.exact(v, prec) for v in c] for c in chars]
    for vec in V:
        if sign_certified(ball_det(_gram(X + [vec]))) is not SignVerdict.UNKNOWN:
            return AlgebraicityVerdict(NOT_ALGEBRAIC, tuple(tuple(c) for c in chars), Status.exact(H, prec),
                                       "a closure direction is certified outside span(X_F)")
    return AlgebraicityVerdict(ALGEBRAIC, tuple(tuple(c) for c in chars), Status.numeric(H, report.prec),
                               "closure annihilator matches span(X_F)")


def _gram(vectors):
    return [[dot(a, b) for b in vectors] for a in vectors]


# Euclidean vs Zariski dimension ------------------------------------------------------------------


@dataclass
class Conjecture2Report:
    verdict: str
    euclidean_dim: int
    zariski_dim: int
    closure: ClosureReport
    zariski: object
    algebraic: Optional[AlgebraicityVerdict] = None


def conjecture2_test(S, F, units=None, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC):
    """Compare Euclidean and Zariski closure dimensions for a product of norm-one tori."""
    if isinstance(S, NumberField):
        S = tor.norm_one_torus(S)
    if any(c.kind != tor.NORM_ONE for c in S.components()):
        raise InputError("conjecture2_test expects a norm-one torus or a product of them")
    if isinstance(units, UnitSystem):
        units = {units.field: units}
    L = torus_unit_lattice(S, units)
    points = [L.space.point(p) for p in F]
    for p in points:
        for x in p:
            if norm(x) != 1:
                raise InputError(f"{x} has norm {norm(x)}; points of a norm-one torus need norm 1")
    rep = closure(L, points, H, prec, max_prec)
    zc = tor.zariski_closure(S, points, H, prec, max_prec, units=_full_units(S, units))
    if rep.dim > zc.dim:
        raise ConsistencyError(f"Euclidean closure dim {rep.dim} exceeds Zariski dim {zc.dim}")
    verdict = CONSISTENT if rep.dim == zc.dim else DEVIATION
    alg = closure_is_algebraic(rep, zc, H, prec, max_prec)
    return Conjecture2Report(verdict, rep.dim, zc.dim, rep, zc, alg)


def _full_units(S, units):
    fields = [c.field for c in S.components()]
    if isinstance(units, dict) and fields and fields[0] in units:
        return units[fields[0]]
    return None
