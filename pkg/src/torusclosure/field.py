"""Number fields Q[t]/(f): exact elements, ball embeddings, Galois automorphisms."""

import itertools
from fractions import Fraction
from functools import cached_property

import mpmath
import sympy

from . import poly
from .arith import (DEFAULT_PREC, Ball, SignVerdict, _mpf_to_fraction, ball_log, fraction_det, isolate_real_roots,
                    poly_ball_eval, root_ball, sign_certified)
from .errors import InputError, NotGaloisError, PrecisionExhausted, ReducibleError
from .relations import DEFAULT_HEIGHT, MAX_PREC, RelationResult, Status, canonical_basis, find_integer_relations

_GUARD = 64


def _frac_list(coeffs):
    return [Fraction(c) for c in coeffs]


class NumberField:
    """Q[t]/(f) for an irreducible integer polynomial f (coefficients constant-first)."""

    def __init__(self, f):
        f = poly.trim([int(c) for c in f])
        if len(f) < 2:
            raise InputError("field polynomial must be nonconstant")
        if poly.content(f) != 1:
            raise InputError("field polynomial must have content 1")
        if f[-1] < 0:
            f = [-c for c in f]
        self.poly = tuple(f)
        self.d = len(f) - 1
        _check_irreducible(f)
        self.real_intervals = tuple(isolate_real_roots(f))
        self.r1 = len(self.real_intervals)
        if (self.d - self.r1) % 2:
            raise InputError("inconsistent root count")
        self.r2 = (self.d - self.r1) // 2
        self._root_cache = {}

    # identity --------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"NumberField({poly.to_str(self.poly, 'x')})"

    @property
    def signature(self):
        return (self.r1, self.r2)

    @property
    def degree(self):
        return self.d

    @property
    def is_totally_real(self):
        return self.r2 == 0

    @property
    def unit_rank(self):
        return self.r1 + self.r2 - 1

    def element(self, coeffs):
        return FieldElement(self, coeffs)

    def __call__(self, value):
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (list, tuple)):
            return FieldElement(self, value)
        return FieldElement(self, [value])

    @property
    def gen(self):
        return FieldElement(self, [0, 1])

    @property
    def one(self):
        return FieldElement(self, [1])

    @cached_property
    def discriminant(self):
        t = sympy.Symbol("t")
        return int(sympy.discriminant(sympy.Poly(list(reversed(self.poly)), t)))

    # embeddings --------------------------------------------------------------

    @cached_property
    def _complex_approx(self):
        """Representatives (Im > 0) of the complex conjugate pairs, sorted by (re, im)."""
        if self.r2 == 0:
            return ()
        with mpmath.workdps(60):
            roots = mpmath.polyroots([int(c) for c in reversed(self.poly)], maxsteps=200, extraprec=200)
        ups = sorted((r for r in roots if mpmath.im(r) > 0), key=lambda z: (float(mpmath.re(z)), float(mpmath.im(z))))
        if len(ups) != self.r2:
            raise PrecisionExhausted("could not separate complex roots", 200)
        return tuple(ups)

    def n_embeddings(self):
        return self.d

    def is_real_embedding(self, j):
        return j < self.r1

    def root(self, j, prec):
        """Enclosure of the j-th conjugate of t: a Ball, or (re, im) for complex places."""
        key = (j, prec)
        if key in self._root_cache:
            return self._root_cache[key]
        if j < self.r1:
            out = root_ball(self.poly, self.real_intervals[j], prec)
        else:
            k = (j - self.r1) // 2
            conj = (j - self.r1) % 2
            out = _complex_root_ball(self.poly, self._complex_approx[k], prec)
            if conj:
                out = (out[0], -out[1])
        self._root_cache[key] = out
        return out

    def conjugate_approx(self, j):
        """Rough complex value of the j-th conjugate of t (for matching only)."""
        r = self.root(j, 64)
        if isinstance(r, Ball):
            return complex(float(r), 0.0)
        return complex(float(r[0]), float(r[1]))

    # galois ------------------------------------------------------------------

    @cached_property
    def _galois(self):
        try:
            return _find_automorphisms(self)
        except NotGaloisError as exc:
            return exc

    @property
    def is_galois(self):
        return not isinstance(self._galois, NotGaloisError)

    @property
    def galois(self):
        """Automorphisms sigma_k (sigma_0 = id), or None for non-Galois fields."""
        g = self._galois
        return None if isinstance(g, NotGaloisError) else g

    @cached_property
    def galois_table(self):
        """mult[h][k] = index of sigma_h o sigma_k."""
        auts = galois_automorphisms(self)
        index = {a.coeffs: i for i, a in enumerate(auts)}
        table = []
        for h in range(self.d):
            row = []
            for k in range(self.d):
                comp = auts[k].apply_automorphism(h)
                row.append(index[comp.coeffs])
            table.append(row)
        return table


def _check_irreducible(f):
    t = sympy.Symbol("t")
    P = sympy.Poly(list(reversed(f)), t)
    _, factors = P.factor_list()
    if len(factors) > 1 or factors[0][1] > 1:
        parts = [[int(c) for c in reversed(p.all_coeffs())] for p, m in factors for _ in range(m)]
        raise ReducibleError(f"{poly.to_str(f, 'x')} is reducible over Q", parts)


def _complex_root_ball(f, approx, prec):
    """Disk around a Newton-polished root; radius d*|f/f'| contains a root of f."""
    d = len(f) - 1
    coeffs = [int(c) for c in reversed(f)]
    dcoeffs = [int(c) * (d - i) for i, c in enumerate(coeffs[:-1])]
    with mpmath.workprec(prec + 2 * _GUARD):
        z = mpmath.mpc(approx)
        for _ in range(200):
            step = mpmath.polyval(coeffs, z) / mpmath.polyval(dcoeffs, z)
            z -= step
            if abs(step) < mpmath.mpf(2) ** (-(prec + _GUARD)):
                break
        r = d * abs(mpmath.polyval(coeffs, z) / mpmath.polyval(dcoeffs, z))
        r = r * 2 + mpmath.mpf(2) ** (-(prec + _GUARD))
        re, im = mpmath.re(z), mpmath.im(z)
    rad = _to_frac(r)
    return (Ball.from_mid_rad(_to_frac(re), rad, prec), Ball.from_mid_rad(_to_frac(im), rad, prec))


def _to_frac(x):
    return _mpf_to_fraction(x)


class FieldElement:
    """An element sum c_i t^i of Q[t]/(f), with exact rational coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        c = _frac_list(coeffs)
        f = field.poly
        if len(c) > field.d:
            c = poly.rem(c, f)
        c = list(c) + [Fraction(0)] * (field.d - len(c))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _lift(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise InputError("elements belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, [other])
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        prod = poly.mul(list(self.coeffs), list(o.coeffs))
        return FieldElement(self.field, poly.rem(prod, self.field.poly) if prod else [])

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by zero in number field")
        # extended Euclid on (self, f) over Q
        r0, r1 = list(self.field.poly), poly.trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while poly.degree(r1) > 0:
            q, r = poly.divmod_poly(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly.sub(s0, poly.mul(q, s1))
        c = r1[0]
        return FieldElement(self.field, poly.scale(s1, 1 / Fraction(c)))

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        out = FieldElement(self.field, [1])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field.poly, self.coeffs))

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def to_str(self, var="a"):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and abs(c) == 1:
                s = mono
            elif mono:
                s = f"{abs(c)}*{mono}"
            else:
                s = f"{abs(c)}"
            terms.append(("-" if c < 0 else "+", s))
        if not terms:
            return "0"
        out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, s in terms[1:]:
            out += f" {sign} {s}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"FieldElement({self.to_str()})"

    def apply_automorphism(self, k):
        g = galois_automorphisms(self.field)[k]
        return FieldElement(self.field, poly.compose_mod(list(self.coeffs), list(g.coeffs), self.field.poly))

    def conjugates(self):
        """The Galois conjugates sigma_k(x), in automorphism order."""
        return [self.apply_automorphism(k) for k in range(self.field.d)]


# exact invariants -------------------------------------------------------------


def multiplication_matrix(x):
    """Matrix of y -> x*y on the power basis (column i = x * t^i)."""
    K = x.field
    cols = []
    for i in range(K.d):
        cols.append((x * FieldElement(K, [0] * i + [1])).coeffs)
    return [[cols[j][i] for j in range(K.d)] for i in range(K.d)]


def characteristic_polynomial(x):
    """Monic char poly of multiplication by x (Faddeev-LeVerrier over Q), constant-first."""
    A = multiplication_matrix(x)
    d = len(A)
    c = [Fraction(0)] * (d + 1)
    c[d] = Fraction(1)
    M = [[Fraction(0)] * d for _ in range(d)]
    for k in range(1, d + 1):
        # M <- A M + c_{d-k+1} I
        AM = [[sum(A[i][m] * M[m][j] for m in range(d)) for j in range(d)] for i in range(d)]
        M = [[AM[i][j] + (c[d - k + 1] if i == j else 0) for j in range(d)] for i in range(d)]
        AM = [[sum(A[i][m] * M[m][j] for m in range(d)) for j in range(d)] for i in range(d)]
        c[d - k] = -sum(AM[i][i] for i in range(d)) / k
    return c


def norm(x):
    return fraction_det(multiplication_matrix(x))


def trace(x):
    A = multiplication_matrix(x)
    return sum(A[i][i] for i in range(len(A)))


def minimal_polynomial(x):
    """Monic minimal polynomial over Q (constant-first), from the first linear dependency of powers."""
    K = x.field
    powers = [FieldElement(K, [1]).coeffs]
    p = FieldElement(K, [1])
    for k in range(1, K.d + 1):
        p = p * x
        powers.append(p.coeffs)
        dep = _rational_dependency(powers)
        if dep is not None:
            lead = dep[-1]
            return [c / lead for c in dep]
    raise AssertionError("powers of x must become dependent by degree d")


def _rational_dependency(vectors):
    """A rational vector c with sum c_i v_i = 0 and c_last != 0, or None."""
    n = len(vectors)
    dim = len(vectors[0])
    # solve sum_{i<n-1} c_i v_i = -v_last
    A = [[Fraction(vectors[i][r]) for i in range(n - 1)] + [-Fraction(vectors[-1][r])] for r in range(dim)]
    cols = n - 1
    piv_cols = []
    row = 0
    for c in range(cols):
        p = next((r for r in range(row, dim) if A[r][c] != 0), None)
        if p is None:
            continue
        A[row], A[p] = A[p], A[row]
        pv = A[row][c]
        A[row] = [v / pv for v in A[row]]
        for r in range(dim):
            if r != row and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[row])]
        piv_cols.append(c)
        row += 1
    if any(A[r][cols] != 0 for r in range(row, dim)):
        return None
    sol = [Fraction(0)] * cols
    for r, c in enumerate(piv_cols):
        sol[c] = A[r][cols]
    return sol + [Fraction(1)]


def is_algebraic_integer(x):
    return all(c.denominator == 1 for c in minimal_polynomial(x))


def is_unit(x):
    if x.is_zero() or not is_algebraic_integer(x):
        return False
    return abs(norm(x)) == 1


def generates_field(x):
    return len(minimal_polynomial(x)) - 1 == x.field.d


def make_field(f):
    """Build Q[t]/(f); accepts an integer coefficient list (constant first)."""
    return NumberField(f)


# numeric embeddings -------------------------------------------------------------


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def embed(x, j, prec=DEFAULT_PREC):
    """Enclosure of the j-th conjugate of x: a Ball (real place) or (re, im) pair."""
    K = x.field
    if x.is_rational():
        b = Ball.exact(x.coeffs[0], prec)
        return b if j < K.r1 else (b, Ball.exact(0, prec))
    size = max(abs(c.numerator).bit_length() + c.denominator.bit_length() for c in x.coeffs)
    w = prec + _GUARD + size
    for _ in range(6):
        r = K.root(j, w)
        if isinstance(r, Ball):
            val = poly_ball_eval(list(x.coeffs), r)
            if _tight(val, prec):
                return val.with_prec(prec)
        else:
            acc = (Ball.exact(0, w), Ball.exact(0, w))
            for c in reversed(x.coeffs):
                acc = _cmul(acc, r)
                acc = (acc[0] + Ball.exact(c, w), acc[1])
            if _tight(acc[0], prec) and _tight(acc[1], prec):
                return (acc[0].with_prec(prec), acc[1].with_prec(prec))
        w *= 2
    raise PrecisionExhausted("embedding did not reach the requested accuracy", w)


def _tight(b, prec):
    return b.rad <= Fraction(1, 1 << prec) * max(Fraction(1), abs(b.mid))


def log_abs_embedding(x, j, prec=DEFAULT_PREC):
    """log|x_j| as a Ball; DomainError if x is zero."""
    if x.is_zero():
        raise InputError("log of zero element")
    if x.is_rational():
        return ball_log(Ball.exact(abs(x.coeffs[0]), prec + _GUARD), prec)
    w = prec
    for _ in range(8):
        e = embed(x, j, w)
        if isinstance(e, Ball):
            if sign_certified(e) is not SignVerdict.UNKNOWN:
                return ball_log(e if e.mid > 0 else -e, prec)
        else:
            sq = e[0] * e[0] + e[1] * e[1]
            if sign_certified(sq) is SignVerdict.POSITIVE:
                return ball_log(sq, prec + 1) / 2
        w *= 2
    raise PrecisionExhausted("conjugate not separated from zero", w)


def log_abs_embeddings(x, prec=DEFAULT_PREC):
    return [log_abs_embedding(x, j, prec) for j in range(x.field.d)]


# Galois group ------------------------------------------------------------------


def _find_automorphisms(K):
    d = K.d
    f = list(K.poly)
    if d == 1:
        return (K.gen,)
    if 0 < K.r1 < d:
        raise NotGaloisError(f"{poly.to_str(f, 'x')} has both real and complex roots")
    disc = abs(K.discriminant) * f[-1] ** (2 * d)
    bits = 2 * disc.bit_length() + 64 * d + 128
    with mpmath.workprec(bits):
        roots = [_mp_root(K, j, bits) for j in range(d)]
        V = mpmath.matrix([[roots[j] ** i for i in range(d)] for j in range(d)])
        auts = []
        for k in range(d):
            found = None
            others = [j for j in range(d) if j != k]
            for perm in itertools.permutations(others, d - 1):
                target = [k] + list(perm)
                rhs = mpmath.matrix([roots[target[j]] for j in range(d)])
                try:
                    g = mpmath.lu_solve(V, rhs)
                except ZeroDivisionError:
                    continue
                coeffs = []
                ok = True
                for i in range(d):
                    re = mpmath.re(g[i]) * disc
                    if abs(mpmath.im(g[i])) * disc > 0.25:
                        ok = False
                        break
                    coeffs.append(Fraction(int(mpmath.nint(re)), disc))
                if not ok:
                    continue
                if not poly.compose_mod(f, coeffs, f):
                    found = FieldElement(K, coeffs)
                    break
            if found is None:
                raise NotGaloisError(f"{poly.to_str(f, 'x')} does not split in its stem field")
            auts.append(found)
    return tuple(auts)


def _mp_root(K, j, bits):
    r = K.root(j, bits)
    if isinstance(r, Ball):
        return mpmath.mpf(r.mid.numerator) / r.mid.denominator
    return mpmath.mpc(mpmath.mpf(r[0].mid.numerator) / r[0].mid.denominator,
                      mpmath.mpf(r[1].mid.numerator) / r[1].mid.denominator)


def galois_automorphisms(K):
    """sigma_0..sigma_{d-1}: sigma_k(t) is the root of f in K whose image under embedding 0 is conjugate k."""
    g = K._galois
    if isinstance(g, NotGaloisError):
        raise g
    return list(g)


# conjugate groups ----------------------------------------------------------------


def _sign_kernel(basis, signs):
    """Sublattice {sum a_i b_i : prod signs_i^a_i = +1} of the lattice with basis b_i."""
    neg = [i for i, s in enumerate(signs) if s < 0]
    if not neg:
        return [list(b) for b in basis]
    p = neg[0]
    out = []
    for i, b in enumerate(basis):
        if i == p:
            out.append([2 * v for v in b])
        elif signs[i] < 0:
            out.append([u + v for u, v in zip(b, basis[p])])
        else:
            out.append(list(b))
    return out


def exact_conjugate_product(x, n):
    """prod_k sigma_k(x)^(n_k), computed exactly (Galois fields only)."""
    conj = x.conjugates()
    out = FieldElement(x.field, [1])
    for c, e in zip(conj, n):
        if e:
            out = out * c ** e
    return out


def conjugate_group_rank(x, H=DEFAULT_HEIGHT, prec=DEFAULT_PREC, max_prec=MAX_PREC):
    """Rank of the free part of the group generated by the conjugates of x.

    Returns (rank, RelationResult).  The relations span the exponent vectors n
    with prod sigma_k(x)^(n_k) = 1 (the sign character is folded in).  For Galois
    fields each relation is checked exactly.
    """
    if x.is_zero():
        raise InputError("conjugate_group_rank needs a nonzero element")
    K = x.field
    d = K.d
    srcs = [(lambda p, j=j: log_abs_embedding(x, j, p)) for j in range(d)]
    galois = K.is_galois
    signs = {}

    def verify(n):
        if not galois:
            return None
        prod = exact_conjugate_product(x, n)
        if prod == 1:
            signs[tuple(n)] = 1
            return True
        if prod == -1:
            signs[tuple(n)] = -1
            return True
        return False

    res = find_integer_relations(srcs, H, prec, max_prec, verify=verify)
    rels = [list(r) for r in res.relations]
    if galois and rels:
        rels = _sign_kernel(rels, [signs.get(tuple(r), 1) for r in rels])
        rels = [list(r) for r in canonical_basis(rels)]
    rank = d - len(rels)
    if galois and rels and all(exact_conjugate_product(x, r) == 1 for r in rels):
        status = Status.exact(H, res.prec)
    else:
        status = Status.numeric(H, res.prec)
    out = RelationResult(tuple(tuple(r) for r in rels), status, res.residuals, res.verified, res.prec, H)
    return rank, out
