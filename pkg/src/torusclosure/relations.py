"""Integer lattices (LLL, Hermite/Smith forms, saturation) and integer-relation search.

Integer matrices are plain lists of lists of Python ints.  Relation searches run
LLL on the scaled embedding ``[I | round(2**s * coeffs)]``, re-check every
candidate at doubled precision and escalate precision when a candidate fails.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .arith import DEFAULT_PREC, MAX_PREC, Ball, SignVerdict, sign_certified
from .errors import InputError, PrecisionExhausted

DEFAULT_HEIGHT = 10 ** 6

VERIFIED_EXACT = "VerifiedExact"
NUMERIC_ONLY = "NumericOnly"


# basic integer linear algebra ---------------------------------------------


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M, ncols=None):
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def int_det(M):
    """Bareiss fraction-free determinant."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def hnf(M, with_transform=False):
    """Row-style Hermite normal form H = U M.

    Nonzero rows come first, pivots are positive and entries above a pivot are
    reduced into [0, pivot).  Zero rows are kept at the bottom.
    """
    H = [list(map(int, row)) for row in M]
    m = len(H)
    n = len(H[0]) if m else 0
    U = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            U[r], U[piv] = U[piv], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-a for a in H[r]]
            U[r] = [-a for a in U[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
        r += 1
    if with_transform:
        return H, U
    return H


def rank(M):
    return sum(1 for row in hnf(M) if any(row))


def nonzero_rows(M):
    return [row for row in M if any(row)]


def snf(M):
    """Smith normal form: returns (D, U, V) with D = U M V diagonal, d_i | d_{i+1}."""
    D = [list(map(int, row)) for row in M]
    m = len(D)
    n = len(D[0]) if m else 0
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    D[i] = [a - q * b for a, b in zip(D[i], D[t])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[t])]
                    if D[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    for row in D:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
                    if D[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            # fold the offending row into row t so the pivot shrinks
            i = bad[0]
            D[t] = [a + b for a, b in zip(D[t], D[i])]
            U[t] = [a + b for a, b in zip(U[t], U[i])]
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return D, U, V


def kernel(M, ncols=None):
    """Basis (rows) of the integer right kernel {x : M x = 0}."""
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    if not M:
        return identity(n)
    H, U = hnf(transpose(M), with_transform=True)
    return [U[i] for i in range(n) if not any(H[i])]


def left_kernel(M):
    """Basis of {y : y M = 0}."""
    if not M:
        return []
    return kernel(transpose(M), ncols=len(M))


def saturate(L, n=None):
    """Basis of (Q-span of the rows of L) intersected with Z^n, in Hermite form."""
    n = n if n is not None else (len(L[0]) if L else 0)
    L = nonzero_rows(L)
    if not L:
        return []
    K = kernel(L, ncols=n)
    if not K:
        return identity(n)
    return nonzero_rows(hnf(kernel(K, ncols=n)))


def lattice_basis(L, n=None):
    """Hermite basis of the Z-span of the rows of L."""
    return nonzero_rows(hnf(L)) if L else []


def intersect(A, B, n):
    """Basis of the intersection of the Z-spans of the rows of A and of B."""
    if not A or not B:
        return []
    stacked = [list(r) for r in A] + [[-v for v in r] for r in B]
    rel = left_kernel(stacked)
    vecs = [[sum(c * A[i][j] for i, c in enumerate(y[:len(A)])) for j in range(n)] for y in rel]
    return lattice_basis(vecs)


def same_lattice(A, B):
    return lattice_basis(A) == lattice_basis(B)


def is_unimodular(M):
    return len(M) == len(M[0]) and abs(int_det(M)) == 1 if M else True


# LLL -----------------------------------------------------------------------


def lll_reduce(basis, delta=Fraction(3, 4)):
    """Integral LLL (de Weger / Cohen): returns (reduced, transform), reduced = transform * basis."""
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise InputError("LLL parameter must lie in (1/4, 1]")
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    T = identity(n)
    if n == 0:
        return b, T
    if rank(b) < n:
        raise InputError("LLL input rows are linearly dependent")
    dn, dd = delta.numerator, delta.denominator

    def dot(i, j):
        return sum(x * y for x, y in zip(b[i - 1], b[j - 1]))

    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[1] = dot(1, 1)

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            b[k - 1] = [x - q * y for x, y in zip(b[k - 1], b[l - 1])]
            T[k - 1] = [x - q * y for x, y in zip(T[k - 1], T[l - 1])]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
        T[k - 1], T[k - 2] = T[k - 2], T[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k]
        d[k - 1] = B

    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = dot(k, j)
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k] = u
        red(k, k - 1)
        if dd * d[k] * d[k - 2] < dn * d[k - 1] * d[k - 1] - dd * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                red(k, l)
            k += 1
    return b, T


def is_lll_reduced(basis, delta=Fraction(3, 4)):
    """Exact check of size reduction and the Lovasz condition."""
    n = len(basis)
    bstar, mu = [], [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in basis[i]]
        for j in range(i):
            num = sum(Fraction(x) * y for x, y in zip(basis[i], bstar[j]))
            den = sum(y * y for y in bstar[j])
            mu[i][j] = num / den
            v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
        bstar.append(v)
    norms = [sum(x * x for x in v) for v in bstar]
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, n):
        if norms[k] < (Fraction(delta) - mu[k][k - 1] ** 2) * norms[k - 1]:
            return False
    return True


def normalize(v):
    """Flip sign so the first nonzero entry is positive."""
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def height(v):
    return max((abs(x) for x in v), default=0)


def canonical_basis(rows):
    """LLL-reduced, sign-normalized, sorted by (height, lexicographic).

    The HNF is taken first so the result depends only on the lattice.
    """
    rows = lattice_basis(nonzero_rows(rows))
    if not rows:
        return []
    reduced, _ = lll_reduce(rows)
    return sorted((normalize(r) for r in reduced), key=lambda v: (height(v), v))


# relation search -------------------------------------------------------------


@dataclass(frozen=True)
class Status:
    """Certification level of a verdict; NumericOnly carries the (H, prec) it holds at."""

    kind: str
    height_bound: Optional[int] = None
    prec: Optional[int] = None

    @classmethod
    def exact(cls, height_bound=None, prec=None):
        return cls(VERIFIED_EXACT, height_bound, prec)

    @classmethod
    def numeric(cls, height_bound, prec):
        return cls(NUMERIC_ONLY, height_bound, prec)

    @property
    def is_exact(self):
        return self.kind == VERIFIED_EXACT

    def to_dict(self):
        d = {"kind": self.kind}
        if self.height_bound is not None:
            d["heightBound"] = self.height_bound
        if self.prec is not None:
            d["prec"] = self.prec
        return d

    def __str__(self):
        if self.kind == VERIFIED_EXACT:
            return VERIFIED_EXACT
        return f"{NUMERIC_ONLY}(H={self.height_bound}, prec={self.prec})"


@dataclass(frozen=True)
class RelationResult:
    relations: tuple
    status: Status
    residuals: tuple = ()
    verified: tuple = ()
    prec: int = DEFAULT_PREC
    height_bound: int = DEFAULT_HEIGHT

    @property
    def rank(self):
        return len(self.relations)

    def __bool__(self):
        return bool(self.relations)


def as_source(x):
    """Turn a Ball, int, Fraction or callable(prec) into a callable(prec) -> Ball."""
    if callable(x) and not isinstance(x, Ball):
        return x
    if isinstance(x, Ball):
        return lambda prec: x
    q = Fraction(x)
    return lambda prec: Ball.exact(q, prec)


def _needed_prec(n_unknowns, n_forms, H):
    per = math.log2(H + 1) + n_unknowns / 2 + 4
    return int(math.ceil(n_unknowns * per / max(n_forms, 1))) + 32


def search_relations(coeffs: Callable[[int], Sequence[Sequence[Ball]]], n_unknowns, n_forms,
                     H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC,
                     verify: Optional[Callable] = None):
    """Integer vectors z with sum_u z[u] * coeffs[u][f] == 0 for every form f.

    ``coeffs(p)`` returns the n_unknowns x n_forms coefficient matrix as balls
    at precision p.  ``verify(z)`` may return True/False for an exact check, or
    None when it cannot decide.
    """
    N, r = n_unknowns, n_forms
    if N == 0:
        return RelationResult((), Status.numeric(H, prec), prec=prec, height_bound=H)
    if r == 0:
        rels = tuple(tuple(row) for row in identity(N))
        return RelationResult(rels, Status.exact(H, prec), verified=(True,) * N, prec=prec, height_bound=H)
    need = _needed_prec(N, r, H)
    if need > max_prec:
        raise PrecisionExhausted(f"height bound {H} with {N} unknowns needs {need} bits; cap is {max_prec}", max_prec)
    p = max(prec, need)
    while True:
        C = coeffs(p)
        emax = max((c.log2_mag() for row in C for c in row), default=0)
        emax = max(emax, -p // 2)
        s = p - emax - 8
        maxrad = max((c.rad for row in C for c in row), default=Fraction(0))
        if maxrad > 0:
            rad_exp = maxrad.numerator.bit_length() - maxrad.denominator.bit_length() + 1
            s = min(s, -rad_exp - 2)
        scaled = []
        for u in range(N):
            row = [int(u == v) for v in range(N)]
            for f in range(r):
                c = C[u][f]
                m = c.man << (c.exp + s) if c.exp + s >= 0 else _round_shift(c.man, -(c.exp + s))
                row.append(m)
            scaled.append(row)
        reduced, _ = lll_reduce(scaled)
        cands = []
        for row in reduced:
            z = row[:N]
            h = height(z)
            if h and h <= H and all(abs(v) <= N * h + 1 for v in row[N:]):
                cands.append(z)
        basis = [z for z in canonical_basis(saturate(cands, N)) if height(z) <= H] if cands else []

        q = min(2 * p, max_prec) if p < max_prec else p
        C2 = coeffs(q) if basis else None
        threshold = Fraction(2) ** (emax - p // 2) if emax - p // 2 >= 0 else Fraction(1, 2 ** (p // 2 - emax))
        accepted, residuals, flags = [], [], []
        rejected = ambiguous = False
        for z in basis:
            worst = None
            bad = False
            for f in range(r):
                acc = Ball.exact(0, q)
                for u in range(N):
                    if z[u]:
                        acc = acc + C2[u][f] * z[u]
                if sign_certified(acc) is not SignVerdict.UNKNOWN:
                    bad = True
                    break
                if worst is None or acc.mag() > worst.mag():
                    worst = acc
            if bad:
                rejected = True
                continue
            if worst.mag() >= threshold:
                ambiguous = True
                continue
            ok = verify(z) if verify is not None else None
            if ok is False:
                rejected = True
                continue
            accepted.append(z)
            residuals.append(worst)
            flags.append(bool(ok))
        if rejected or ambiguous:
            if p < max_prec:
                p = min(2 * p, max_prec)
                continue
            if ambiguous:
                raise PrecisionExhausted("relation candidate still ambiguous at the precision cap", p)
        if accepted and all(flags):
            status = Status.exact(H, p)
        else:
            status = Status.numeric(H, p)
        return RelationResult(tuple(accepted), status, tuple(residuals), tuple(flags), p, H)


def _round_shift(man, sh):
    """round(man / 2**sh) to nearest."""
    q, rem = divmod(man, 1 << sh)
    if 2 * rem >= (1 << sh):
        q += 1
    return q


def find_integer_relations(xs, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC, verify=None):
    """Integer relations sum c_i x_i = 0 among the reals ``xs`` (balls or callables)."""
    srcs = [as_source(x) for x in xs]
    return search_relations(lambda p: [[s(p)] for s in srcs], len(srcs), 1, H, prec, max_prec, verify)


def linear_dependencies(vectors, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC, verify=None):
    """Integer c with sum_i c_i v_i = 0 (as vectors); entries balls or callables."""
    srcs = [[as_source(x) for x in v] for v in vectors]
    n = len(srcs[0]) if srcs else 0
    return search_relations(lambda p: [[s(p) for s in v] for v in srcs], len(srcs), n, H, prec, max_prec, verify)


def _matrix_source(T):
    if callable(T):
        return T
    srcs = [[as_source(x) for x in row] for row in T]
    return lambda p: [[s(p) for s in row] for row in srcs]


def simultaneous_relations(T, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC, verify=None,
                           shape=None):
    """Integer (c, k) with sum_i c_i T[i][j] = k_j for every column j.

    ``T`` has one row per integer unknown c_i and one column per constraint; it
    may be a matrix of balls/callables or a callable(prec) returning the matrix
    (then ``shape=(n, r)`` must be given).  Relations are vectors of length n + r.
    """
    src = _matrix_source(T)
    if shape is None:
        n, r = len(T), (len(T[0]) if T else 0)
    else:
        n, r = shape

    def coeffs(p):
        M = src(p)
        rows = [list(M[i]) for i in range(n)]
        for j in range(r):
            rows.append([Ball.exact(-1 if jj == j else 0, p) for jj in range(r)])
        return rows

    return search_relations(coeffs, n + r, r, H, prec, max_prec, verify)


def _span_complement(V, p):
    """Reduce V (k x n balls) to [I | B] on pivot columns; return (pivots, free, B)."""
    A = [list(row) for row in V]
    k = len(A)
    n = len(A[0])
    pivots = []
    used = set()
    for i in range(k):
        best, best_mig = None, Fraction(0)
        for c in range(n):
            if c in used:
                continue
            m = A[i][c].mig()
            if m > best_mig:
                best, best_mig = c, m
        if best is None:
            raise PrecisionExhausted("spanning vectors not certified independent", p)
        used.add(best)
        pivots.append(best)
        piv = A[i][best]
        A[i] = [v / piv for v in A[i]]
        for r in range(k):
            if r != i:
                f = A[r][best]
                A[r] = [a - f * b for a, b in zip(A[r], A[i])]
    free = [c for c in range(n) if c not in used]
    return pivots, free, A


def rational_vectors_in_span(V, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC):
    """Integer vectors (height <= H) lying in the real span of the vectors V."""
    src = _matrix_source(V)
    k = len(V) if not callable(V) else None
    probe = src(prec)
    k = len(probe)
    n = len(probe[0]) if probe else 0
    if k == 0:
        return RelationResult((), Status.numeric(H, prec), prec=prec, height_bound=H)
    if k >= n:
        rels = tuple(tuple(row) for row in identity(n))
        return RelationResult(rels, Status.numeric(H, prec), prec=prec, height_bound=H)
    # pivot choice is fixed at the starting precision so forms agree across escalations
    pivots, free, _ = _span_complement(probe, prec)

    def coeffs(p):
        Vp = src(p)
        A = [list(row) for row in Vp]
        for i, c in enumerate(pivots):
            piv = A[i][c]
            A[i] = [v / piv for v in A[i]]
            for r in range(k):
                if r != i:
                    f = A[r][c]
                    A[r] = [a - f * b for a, b in zip(A[r], A[i])]
        rows = []
        for u in range(n):
            row = []
            for q in free:
                if u == q:
                    row.append(Ball.exact(1, p))
                elif u in pivots:
                    row.append(-A[pivots.index(u)][q])
                else:
                    row.append(Ball.exact(0, p))
            rows.append(row)
        return rows

    return search_relations(coeffs, n, len(free), H, prec, max_prec)
