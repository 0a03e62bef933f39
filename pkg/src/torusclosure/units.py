"""Unit groups for small fields: real quadratic fundamental units, cubic search, verification."""

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .arith import DEFAULT_PREC, SignVerdict, ball_det, sign_certified
from .errors import InputError, NotUnitError, RankError, SearchEmpty
from .field import FieldElement, NumberField, is_unit, log_abs_embedding, norm
from .relations import hnf, kernel, linear_dependencies, transpose

PROVEN = "Proven"
UNVERIFIED = "Unverified"


@dataclass(frozen=True)
class UnitSystem:
    field: NumberField
    gens: tuple
    maximality: str = UNVERIFIED
    notes: tuple = dc_field(default=())

    @property
    def norms(self):
        return tuple(int(norm(g)) for g in self.gens)

    @property
    def rank(self):
        return len(self.gens)


def place_logs(x, prec=DEFAULT_PREC):
    """log|x| at each place (real places, then one per complex pair)."""
    K = x.field
    idx = list(range(K.r1)) + [K.r1 + 2 * k for k in range(K.r2)]
    return [log_abs_embedding(x, j, prec) for j in idx]


def unit_log_matrix(gens, prec=DEFAULT_PREC):
    """Square matrix of place logs with the last place dropped."""
    return [place_logs(g, prec)[:-1] for g in gens]


def logs_independent(gens, prec=DEFAULT_PREC, max_prec=4096):
    """Certified independence of the unit log vectors (determinant sign)."""
    if not gens:
        return True
    p = prec
    while p <= max_prec:
        if sign_certified(ball_det(unit_log_matrix(gens, p))) is not SignVerdict.UNKNOWN:
            return True
        p *= 2
    return False


def _squarefree(D):
    if D < 2:
        return False
    k = 2
    while k * k <= D:
        if D % (k * k) == 0:
            return False
        k += 1
    return True


def _quadratic_D(K):
    f = K.poly
    if K.d != 2 or f[1] != 0 or f[2] != 1 or -f[0] < 2 or not _squarefree(-f[0]):
        raise InputError(f"{K!r} is not of the form x^2 - D with D > 1 squarefree")
    return -f[0]


def fundamental_solution(D):
    """Smallest p + q*sqrt(D) > 1 with p^2 - D q^2 = +-1, from the continued fraction of sqrt(D)."""
    a0 = math.isqrt(D)
    m, dd, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while p * p - D * q * q not in (1, -1):
        m = dd * a - m
        dd = (D - m * m) // dd
        a = (a0 + m) // dd
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


def quadratic_fundamental_unit(K):
    D = _quadratic_D(K)
    p, q = fundamental_solution(D)
    return FieldElement(K, [p, q])


def verify_units(K, elems, prec=DEFAULT_PREC):
    elems = [K(e) for e in elems]
    for e in elems:
        if not is_unit(e):
            raise NotUnitError(f"{e} is not a unit (norm {norm(e)})", e)
    need = K.unit_rank
    if len(elems) != need:
        raise RankError(f"expected {need} units for signature {K.signature}, got {len(elems)}")
    if not logs_independent(elems, prec):
        raise RankError("unit log vectors are not certified independent")
    return UnitSystem(K, tuple(elems), UNVERIFIED)


def _coefficient_bound(K, log_bound):
    roots = np.array([float(K.conjugate_approx(j).real) for j in range(K.d)])
    V = np.vander(roots, K.d, increasing=True)
    Vinv = np.linalg.inv(V)
    return np.abs(Vinv).sum(axis=1) * math.exp(log_bound) + 1e-9


def cubic_unit_search(K, log_bound=5.0):
    """Units a + b t + c t^2 with all |log|u_j|| <= log_bound; returns an LLL-reduced pair."""
    if K.d != 3 or K.r1 != 3:
        raise InputError("cubic_unit_search needs a totally real cubic field")
    if any(c != int(c) for c in K.poly) or K.poly[-1] != 1:
        raise InputError("cubic_unit_search needs a monic integer polynomial")
    bound = [int(math.floor(b)) for b in _coefficient_bound(K, log_bound)]
    roots = np.array([K.conjugate_approx(j).real for j in range(3)])
    A = np.arange(-bound[0], bound[0] + 1, dtype=np.float64)
    Cs = np.arange(-bound[2], bound[2] + 1, dtype=np.float64)
    base = A[:, None, None] + Cs[None, :, None] * roots[None, None, :] ** 2
    found = {}
    for b in range(-bound[1], bound[1] + 1):
        vals = base + b * roots[None, None, :]
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(vals))
        ok = (np.abs(logs.sum(axis=2)) < 1e-6) & np.all(np.abs(logs) <= log_bound + 1e-9, axis=2)
        for i, k in zip(*np.nonzero(ok)):
            u = FieldElement(K, [int(A[i]), b, int(Cs[k])])
            if abs(norm(u)) != 1:
                continue
            lv = logs[i, k]
            if np.max(np.abs(lv)) < 1e-6:
                continue  # torsion
            # one representative per log vector up to sign and inversion
            key = tuple(np.round(lv, 6))
            neg = tuple(np.round(-lv, 6))
            if key in found or neg in found:
                continue
            found[key] = u
    if not found:
        raise SearchEmpty(f"no units of infinite order with log bound {log_bound}")
    units = sorted(found.items(), key=lambda kv: (float(np.dot(kv[0], kv[0])), [float(v) for v in kv[1].coeffs]))
    sample = [u for _, u in units[:8]]
    gens = _basis_from_units(sample)
    if len(gens) < 2:
        raise SearchEmpty(f"found units span rank {len(gens)} < 2 with log bound {log_bound}")
    gens = _reduce_pair(gens)
    return UnitSystem(K, tuple(gens), UNVERIFIED, ("finite index in the full unit group not excluded",))


def _basis_from_units(units):
    """Generators of <units> modulo torsion, via the exact relation lattice."""
    K = units[0].field
    k = len(units)
    vecs = [[(lambda p, u=u, j=j: log_abs_embedding(u, j, p)) for j in range(K.d - 1)] for u in units]

    def verify(z):
        prod = FieldElement(K, [1])
        for u, e in zip(units, z):
            if e:
                prod = prod * u ** e
        return prod == 1 or prod == -1

    rel = linear_dependencies(vecs, H=10 ** 4, verify=verify)
    R = [list(r) for r in rel.relations]
    if not R:
        C = [[int(i == j) for j in range(k)] for i in range(k)]
    else:
        C = kernel(R, ncols=k)
    H, U = hnf(transpose(C), with_transform=True)
    gens = []
    for i, row in enumerate(H):
        if any(row):
            g = FieldElement(K, [1])
            for u, e in zip(units, U[i]):
                if e:
                    g = g * u ** e
            gens.append(g)
    return gens


def _reduce_pair(gens):
    """Lagrange-reduce a rank-2 unit basis on float log vectors (exact element updates)."""
    u, v = gens

    def lv(x):
        return np.array([float(b) for b in place_logs(x, 64)[:-1]])

    for _ in range(100):
        a, b = lv(u), lv(v)
        if a.dot(a) > b.dot(b):
            u, v = v, u
            a, b = b, a
        q = int(round(a.dot(b) / a.dot(a)))
        if q == 0:
            break
        v = v * u ** (-q)
    return [_small(u), _small(v)]


def _small(g):
    # a unit and its inverse generate the same group; keep the shorter one
    h = g.inverse()
    key = lambda x: (max(abs(c) for c in x.coeffs), [abs(c) for c in reversed(x.coeffs)])
    return _positive(min(g, h, key=key))


def _positive(g):
    # -1 is torsion; pick the sign with a positive leading power-basis coefficient
    for c in g.coeffs:
        if c:
            return g if c > 0 else -g
    return g


def norm_one_subgroup(U):
    """Kernel of the norm character on the unit system (torsion ignored)."""
    K = U.field
    gens = list(U.gens)
    norms = [int(norm(g)) for g in gens]
    if all(n == 1 for n in norms):
        return U
    if K.d % 2 == 1:
        # N(-1) = -1 in odd degree, so -e has norm one and generates the same group mod torsion
        new = [g if n == 1 else -g for g, n in zip(gens, norms)]
    else:
        p = norms.index(-1)
        new = []
        for i, (g, n) in enumerate(zip(gens, norms)):
            if i == p:
                new.append(g * g)
            elif n == -1:
                new.append(g * gens[p])
            else:
                new.append(g)
    return UnitSystem(K, tuple(new), U.maximality, U.notes)


@lru_cache(maxsize=32)
def default_unit_system(K):
    """Built-in unit system: continued fraction for x^2 - D, box search for real cubics."""
    if K.unit_rank == 0:
        return UnitSystem(K, (), PROVEN)
    if K.d == 2:
        return UnitSystem(K, (quadratic_fundamental_unit(K),), PROVEN)
    if K.d == 3 and K.r1 == 3:
        return cubic_unit_search(K, 5.0)
    raise InputError(f"no built-in unit system for {K!r}; supply units explicitly")
