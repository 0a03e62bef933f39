"""Tori over Q as character lattices with Galois action.

Characters are integer column vectors; a group element g acts by the matrix
``actions[g]``.  Group elements are indexed 0..|G|-1 with 0 the identity and
``mult[h][k]`` the index of h*k.
"""

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from .arith import DEFAULT_PREC, MAX_PREC, Ball, ball_log
from .errors import InputError, IsotropicError, StructureError
from .field import FieldElement, NumberField, galois_automorphisms, is_unit, log_abs_embedding, norm
from .relations import (DEFAULT_HEIGHT, int_det, Status, canonical_basis, identity, kernel, lattice_basis, matmul,
                        saturate, search_relations, snf)
from .units import default_unit_system

RESTRICTION = "restriction"
NORM_ONE = "norm_one"
SPLIT = "split"
PRODUCT = "product"
SUB = "sub"


@dataclass(frozen=True)
class CharacterLattice:
    rank: int
    mult: tuple
    actions: tuple

    @property
    def order(self):
        return len(self.mult)

    def act(self, g, chi):
        A = self.actions[g]
        return [sum(A[i][j] * chi[j] for j in range(self.rank)) for i in range(self.rank)]

    def verify(self):
        """Exact check: actions are unimodular and multiply like the group."""
        for A in self.actions:
            if len(A) != self.rank or (self.rank and abs(_det(A)) != 1):
                raise StructureError("action matrix is not invertible over Z")
        if self.order and self.actions[0] != tuple(tuple(r) for r in identity(self.rank)):
            raise StructureError("group element 0 must act trivially")
        for h in range(self.order):
            for k in range(self.order):
                prod = matmul(self.actions[h], self.actions[k])
                if [list(r) for r in self.actions[self.mult[h][k]]] != prod:
                    raise StructureError(f"action does not respect the product {h}*{k}")
        return True

    def fixed_sublattice(self):
        """Basis of the G-invariant characters."""
        n = self.rank
        rows = []
        for A in self.actions:
            for i in range(n):
                rows.append([A[i][j] - int(i == j) for j in range(n)])
        return kernel(rows, ncols=n) if rows else identity(n)


def _det(A):
    return int_det([list(r) for r in A])


def _tup(M):
    return tuple(tuple(int(v) for v in row) for row in M)


def trivial_group():
    return ((0,),)


@dataclass(frozen=True)
class TorusSpec:
    kind: str
    lattice: CharacterLattice
    field: Optional[NumberField] = None
    factors: tuple = ()
    parent: Optional["TorusSpec"] = None
    chars: tuple = ()

    @property
    def rank(self):
        return self.lattice.rank

    @property
    def dim(self):
        if self.kind == SUB:
            return self.parent.rank - len(self.chars)
        return self.rank

    def components(self):
        """Flattened base tori (restriction / norm-one / split) in coordinate order."""
        if self.kind == PRODUCT:
            out = []
            for f in self.factors:
                out.extend(f.components())
            return out
        if self.kind == SUB:
            return self.parent.components()
        return [self]

    def describe(self):
        if self.kind == RESTRICTION:
            return f"R(G_m) over {self.field!r}"
        if self.kind == NORM_ONE:
            return f"norm-one torus of {self.field!r}"
        if self.kind == SPLIT:
            return "G_m"
        if self.kind == PRODUCT:
            return " x ".join(f.describe() for f in self.factors)
        return f"subtorus of {self.parent.describe()} cut out by {len(self.chars)} characters"


def _perm_actions(K):
    d = K.d
    table = K.galois_table
    actions = []
    for m in range(d):
        A = [[0] * d for _ in range(d)]
        for k in range(d):
            A[table[m][k]][k] = 1
        actions.append(_tup(A))
    return tuple(tuple(r) for r in table), tuple(actions)


def restriction_torus(K):
    mult, actions = _perm_actions(K)
    return TorusSpec(RESTRICTION, CharacterLattice(K.d, mult, actions), K)


def norm_one_projection(d):
    """Z^d -> Z^(d-1), n -> (n_k - n_0) for k = 1..d-1 (e_0 is minus the sum of the others)."""
    return [[int(j == i + 1) - int(j == 0) for j in range(d)] for i in range(d - 1)]


def norm_one_torus(K):
    d = K.d
    mult, actions = _perm_actions(K)
    P = norm_one_projection(d)
    S = [[int(i == j + 1) for j in range(d - 1)] for i in range(d)]
    quot = tuple(_tup(matmul(matmul(P, [list(r) for r in A]), S)) for A in actions)
    return TorusSpec(NORM_ONE, CharacterLattice(d - 1, mult, quot), K)


def split_torus():
    return TorusSpec(SPLIT, CharacterLattice(1, trivial_group(), (((1,),),)))


def _base_field(T):
    return T.field if T.kind in (RESTRICTION, NORM_ONE) else None


def _block_diag(blocks):
    n = sum(len(b) for b in blocks)
    M = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                M[off + i][off + j] = v
        off += len(b)
    return _tup(M)


def product(tori):
    """Product torus.  Factors over a common field share its Galois group (diagonal action);
    factors over different fields get the direct product of their groups."""
    tori = list(tori)
    if not tori:
        raise InputError("product of no tori")
    fields = []
    for T in tori:
        for c in T.components():
            F = _base_field(c)
            if F is not None and F not in fields:
                fields.append(F)
    comps = [c for T in tori for c in T.components()]
    if len(fields) <= 1:
        order = comps[0].lattice.order if not fields else fields[0].d
        if fields:
            mult = tuple(tuple(r) for r in fields[0].galois_table)
        else:
            mult = trivial_group()
        actions = []
        for g in range(order):
            blocks = [c.lattice.actions[g] if _base_field(c) is not None else c.lattice.actions[0] for c in comps]
            actions.append(_block_diag(blocks))
        lat = CharacterLattice(sum(c.rank for c in comps), mult, tuple(actions))
    else:
        orders = [F.d for F in fields]
        elems = list(itertools.product(*[range(o) for o in orders]))
        index = {e: i for i, e in enumerate(elems)}
        mult = tuple(tuple(index[tuple(F.galois_table[a][b] for F, a, b in zip(fields, e1, e2))]
                           for e2 in elems) for e1 in elems)
        actions = []
        for e in elems:
            blocks = []
            for c in comps:
                F = _base_field(c)
                blocks.append(c.lattice.actions[e[fields.index(F)]] if F is not None else c.lattice.actions[0])
            actions.append(_block_diag(blocks))
        lat = CharacterLattice(sum(c.rank for c in comps), mult, tuple(actions))
    return TorusSpec(PRODUCT, lat, factors=tuple(tori))


# X_F and Zariski closures -------------------------------------------------------


@dataclass(frozen=True)
class CharSubgroup:
    torus: TorusSpec
    basis: tuple
    verified: tuple
    status: Status
    mode: str = "arithmetic"

    @property
    def rank(self):
        return len(self.basis)


def _common_field(S):
    fields = []
    for c in S.components():
        F = _base_field(c)
        if F is not None and F not in fields:
            fields.append(F)
    if len(fields) > 1:
        raise InputError("X_F needs all components over a single Galois field")
    if not fields:
        return None
    L = fields[0]
    galois_automorphisms(L)  # raises NotGaloisError for non-Galois fields
    return L


def _as_point(S, a):
    comps = S.components()
    if not isinstance(a, (list, tuple)):
        a = (a,)
    if len(a) != len(comps):
        raise InputError(f"point has {len(a)} coordinates, torus has {len(comps)} components")
    out = []
    for c, x in zip(comps, a):
        F = _base_field(c)
        if F is None:
            if isinstance(x, FieldElement):
                if not x.is_rational():
                    raise InputError("split coordinate must be rational")
                x = x.coeffs[0]
            x = Fraction(x)
            if x == 0:
                raise InputError("point coordinates must be nonzero")
            out.append(x)
            continue
        x = F(x)
        if x.is_zero():
            raise InputError("point coordinates must be nonzero")
        if c.kind == NORM_ONE and abs(norm(x)) != 1:
            raise InputError(f"{x} has norm {norm(x)}, not a point of the norm-one torus")
        out.append(x)
    return tuple(out)


def _lift_sizes(S):
    return [c.field.d if _base_field(c) is not None else 1 for c in S.components()]


def _char_value(S, L, point, n):
    """chi_n(point) in L for a lifted exponent vector n."""
    val = FieldElement(L, [1]) if L is not None else Fraction(1)
    off = 0
    for c, x, size in zip(S.components(), point, _lift_sizes(S)):
        ns = n[off:off + size]
        off += size
        if _base_field(c) is None:
            if ns[0]:
                val = val * (L(x) ** ns[0] if L is not None else x ** ns[0])
            continue
        for k, e in enumerate(ns):
            if e:
                val = val * x.apply_automorphism(k) ** e
    return val


def _lift_to_torus(S, rows):
    """Map lifted exponent vectors to the torus's own character coordinates."""
    out = []
    for n in rows:
        v = []
        off = 0
        for c, size in zip(S.components(), _lift_sizes(S)):
            ns = list(n[off:off + size])
            off += size
            if c.kind == NORM_ONE:
                v.extend(ns[k] - ns[0] for k in range(1, size))
            else:
                v.extend(ns)
        out.append(v)
    return out


def _is_unit_value(v):
    if isinstance(v, FieldElement):
        return is_unit(v)
    return abs(v) == 1


def _is_pm1(v):
    return v * v == 1


def compute_XF(S, F, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC, units=None, mode="arithmetic"):
    """Characters of S taking unit values on every point of F (mode 'arithmetic'),
    or the value +-1 (mode 'algebraic').  Result saturated, in S's coordinates."""
    if mode not in ("arithmetic", "algebraic"):
        raise InputError(f"unknown X_F mode {mode!r}")
    L = _common_field(S)
    points = [_as_point(S, a) for a in F]
    sizes = _lift_sizes(S)
    D = sum(sizes)
    n_torus = S.rank if S.kind != SUB else S.parent.rank
    if not points:
        basis = tuple(tuple(r) for r in identity(n_torus))
        return CharSubgroup(S, basis, (True,) * n_torus, Status.exact(H, prec), mode)
    d = L.d if L is not None else 1
    table = L.galois_table if L is not None else [[0]]
    if mode == "arithmetic" and L is not None:
        U = units if units is not None else default_unit_system(L)
        eps = list(U.gens)
    else:
        eps = []
    r = len(eps)
    comps = S.components()

    def log_src(x, m, p):
        if isinstance(x, FieldElement):
            return log_abs_embedding(x, m, p)
        return ball_log(Ball.exact(abs(x), p + 64), p)

    def coeffs(p):
        cache = {}

        def ell(x, m):
            key = (id(x), m)
            if key not in cache:
                cache[key] = log_src(x, m, p)
            return cache[key]

        rows = []
        for ci, (c, size) in enumerate(zip(comps, sizes)):
            for j in range(size):
                row = []
                for pt in points:
                    x = pt[ci]
                    for k in range(d):
                        m = table[k][j] if _base_field(c) is not None else k
                        row.append(ell(x, m) if _base_field(c) is not None else ell(x, 0))
                rows.append(row)
        zero = Ball.exact(0, p)
        unit_logs = [[log_abs_embedding(e, k, p) for k in range(d)] for e in eps]
        for i in range(len(points)):
            for u in range(r):
                row = []
                for i2 in range(len(points)):
                    row.extend(-v if i2 == i else zero for v in unit_logs[u])
                rows.append(row)
        return rows

    check = _is_unit_value if mode == "arithmetic" else _is_pm1

    def verify(z):
        n = z[:D]
        return all(check(_char_value(S, L, pt, n)) for pt in points)

    res = search_relations(coeffs, D + r * len(points), d * len(points), H, prec, max_prec, verify=verify)
    lifted = [list(z[:D]) for z in res.relations]
    proj = saturate(_lift_to_torus(S, lifted), n_torus) if lifted else []
    basis = [list(b) for b in canonical_basis(proj)] if proj else []
    verified = []
    for b in basis:
        lift = _torus_to_lift(S, b)
        verified.append(all(check(_char_value(S, L, pt, lift)) for pt in points))
    status = Status.exact(H, res.prec) if basis and all(verified) else Status.numeric(H, res.prec)
    return CharSubgroup(S, tuple(tuple(b) for b in basis), tuple(verified), status, mode)


def _torus_to_lift(S, v):
    """A lifted exponent vector mapping to the torus character v."""
    out = []
    off = 0
    for c, size in zip(S.components(), _lift_sizes(S)):
        if c.kind == NORM_ONE:
            out.extend([0] + list(v[off:off + size - 1]))
            off += size - 1
        else:
            out.extend(v[off:off + size])
            off += size
    return out


@dataclass(frozen=True)
class ZariskiClosure:
    subtorus: TorusSpec
    dim: int
    status: Status
    xf: CharSubgroup
    completeness: Status = dc_field(default=None)

    def __iter__(self):
        return iter((self.subtorus, self.dim, self.status))


def subtorus_from_characters(S, chars):
    """Connected kernel of the given characters (saturated first)."""
    sat = saturate([list(c) for c in chars], S.rank) if chars else []
    n = S.rank
    # characters of the subtorus: Z^n / sat, with a basis from the complement
    comp = _complement_basis(sat, n)
    lat = CharacterLattice(len(comp), S.lattice.mult, tuple(
        _tup(_quotient_action(A, sat, comp, n)) for A in S.lattice.actions))
    return TorusSpec(SUB, lat, parent=S, chars=tuple(tuple(c) for c in sat))


def _complement_basis(sat, n):
    """Rows completing a saturated basis to a basis of Z^n."""
    if not sat:
        return identity(n)
    D, U, V = snf(sat)
    # sat = U^-1 D V^-1 with D = [I | 0]; rows of V^-1 beyond rank complete it
    Vinv = _unimodular_inverse(V)
    return [Vinv[i] for i in range(len(sat), n)]


def _unimodular_inverse(M):
    n = len(M)
    A = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [v / pv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [[int(v) for v in row[n:]] for row in A]


def _quotient_action(A, sat, comp, n):
    """Action on Z^n / sat in the basis given by the images of ``comp``."""
    basis = [list(r) for r in sat] + [list(r) for r in comp]
    # coordinates of A*c_j in (sat, comp), keep the comp part
    Bt = [[Fraction(basis[i][j]) for i in range(n)] for j in range(n)]  # columns = basis vectors
    inv = _unimodular_inverse([[int(v) for v in row] for row in Bt])
    out_cols = []
    for c in comp:
        img = [sum(A[i][j] * c[j] for j in range(n)) for i in range(n)]
        coords = [sum(inv[i][j] * img[j] for j in range(n)) for i in range(n)]
        out_cols.append(coords[len(sat):])
    m = len(comp)
    return [[out_cols[j][i] for j in range(m)] for i in range(m)]


def zariski_closure(S, F, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC, units=None, mode="arithmetic"):
    """Identity component of the Zariski closure: connected kernel of X_F."""
    xf = compute_XF(S, F, H, prec, max_prec, units, mode)
    sub = subtorus_from_characters(S, xf.basis)
    dim = S.rank - xf.rank
    if xf.basis:
        status = xf.status
    else:
        status = Status.numeric(H, xf.status.prec)
    return ZariskiClosure(sub, dim, status, xf, Status.numeric(H, xf.status.prec))


# embedding into norm-one products ---------------------------------------------------------------


@dataclass(frozen=True)
class NormOneEmbedding:
    fields: tuple
    char_map: tuple
    generators: tuple
    orbits: tuple
    stabilizers: tuple
    surjective: bool
    equivariant: bool

    def __iter__(self):
        return iter((self.fields, self.char_map))


def _orbit(lat, v):
    seen = []
    for g in range(lat.order):
        w = tuple(lat.act(g, v))
        if w not in seen:
            seen.append(w)
    return seen


def _stabilizer(lat, v):
    return tuple(g for g in range(lat.order) if tuple(lat.act(g, v)) == tuple(v))


def _factor_fields(T):
    fields = []
    for c in T.components():
        F = _base_field(c)
        if F is not None and F not in fields:
            fields.append(F)
    return fields


def _fixed_field(T, stab):
    """Name the fixed field of a stabilizer when it is one of T's component fields."""
    fields = _factor_fields(T)
    order = T.lattice.order
    if len(fields) == 1:
        if len(stab) == 1:
            return fields[0]
        return f"fixed field of a subgroup of order {len(stab)} in {fields[0]!r}"
    orders = [F.d for F in fields]
    elems = list(itertools.product(*[range(o) for o in orders]))
    for idx, F in enumerate(fields):
        ker = tuple(g for g in range(order) if elems[g][idx] == 0)
        if tuple(sorted(stab)) == ker:
            return F
    return f"fixed field of a subgroup of order {len(stab)}"


def embed_in_norm_one_product(T):
    """Surjection from a sum of permutation lattices Z[G/H_i] onto X*(T)."""
    lat = T.lattice
    n = lat.rank
    if lat.fixed_sublattice():
        raise IsotropicError("torus has a Galois-invariant character; it is not anisotropic")
    gens, orbits, stabs = [], [], []
    span = []
    for i in range(n):
        e = [int(i == j) for j in range(n)]
        if span and _in_span(span, e):
            continue
        orb = _orbit(lat, e)
        gens.append(tuple(e))
        orbits.append(tuple(orb))
        stabs.append(_stabilizer(lat, e))
        span = lattice_basis(span + [list(v) for v in orb])
        if len(span) == n and all(span[k][k] == 1 for k in range(n)):
            break
    cols = [v for orb in orbits for v in orb]
    char_map = _tup([[c[i] for c in cols] for i in range(n)])
    D, _, _ = snf([list(r) for r in char_map])
    divisors = [D[i][i] for i in range(min(len(D), len(D[0]))) if D[i][i]]
    surjective = len(divisors) == n and all(x == 1 for x in divisors)
    # orbit sums vanish, so the map factors through the norm-one quotients
    for orb in orbits:
        if any(sum(v[i] for v in orb) for i in range(n)):
            raise StructureError("orbit sum is a nonzero invariant character")
    equivariant = _check_equivariance(lat, orbits, char_map)
    fields = tuple(_fixed_field(T, s) for s in stabs)
    return NormOneEmbedding(fields, char_map, tuple(gens), tuple(orbits), tuple(stabs), surjective, equivariant)


def _in_span(basis, v):
    return lattice_basis(basis + [v]) == lattice_basis(basis)


def permutation_action(lat, orbits, g):
    """Matrix of g on the permutation lattice with basis the concatenated orbits."""
    cols = [v for orb in orbits for v in orb]
    m = len(cols)
    P = [[0] * m for _ in range(m)]
    off = 0
    for orb in orbits:
        for a, v in enumerate(orb):
            w = tuple(lat.act(g, v))
            P[off + orb.index(w)][off + a] = 1
        off += len(orb)
    return P


def _check_equivariance(lat, orbits, char_map):
    M = [list(r) for r in char_map]
    for g in range(lat.order):
        A = [list(r) for r in lat.actions[g]]
        P = permutation_action(lat, orbits, g)
        if matmul(A, M) != matmul(M, P):
            return False
    return True
