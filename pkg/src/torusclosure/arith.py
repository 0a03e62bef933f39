"""Midpoint-radius ball arithmetic over dyadic midpoints, plus real root isolation.

A :class:`Ball` stores its midpoint as ``man * 2**exp`` (exact integers) and a
non-negative radius as a short dyadic :class:`~fractions.Fraction` that is
always rounded *up*.  Every operation returns a ball containing all results
attainable from points of the input balls.
"""

import enum
import functools
import math
from decimal import Decimal
from fractions import Fraction

import mpmath

from . import poly
from .errors import DomainError, InputError, PrecisionExhausted, StructureError

DEFAULT_PREC = 256
MAX_PREC = 16384

_RAD_BITS = 30
_GUARD = 32


def _pow2(e):
    return Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)


def _round_up(q):
    """Smallest dyadic with a ~30-bit mantissa that is >= q (q >= 0)."""
    if q <= 0:
        return Fraction(0)
    a, b = q.numerator, q.denominator
    e = a.bit_length() - b.bit_length() - _RAD_BITS
    if e >= 0:
        m = -((-a) // (b << e))
    else:
        m = -((-(a << -e)) // b)
    return m * _pow2(e)


def _mag_up(man, exp):
    """Upper bound on |man * 2**exp| with a short mantissa."""
    m = abs(man)
    sh = m.bit_length() - _RAD_BITS
    if sh <= 0:
        return m * _pow2(exp)
    return ((m >> sh) + 1) * _pow2(exp + sh)


def _mag_down(man, exp):
    m = abs(man)
    sh = m.bit_length() - _RAD_BITS
    if sh <= 0:
        return m * _pow2(exp)
    return (m >> sh) * _pow2(exp + sh)


def _round_mid(man, exp, prec):
    """Round ``man * 2**exp`` to ``prec`` bits; return (man, exp, error bound)."""
    sh = abs(man).bit_length() - prec
    if sh <= 0:
        return man, exp, Fraction(0)
    q, r = divmod(man, 1 << sh)
    if 2 * r >= (1 << sh):
        q += 1
    return q, exp + sh, _pow2(exp + sh - 1)


class SignVerdict(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    UNKNOWN = "Unknown"
    # only produced by exact (rational or structural) arguments, never by a ball
    ZERO = "Zero"

    def is_nonzero(self):
        return self in (SignVerdict.POSITIVE, SignVerdict.NEGATIVE)


class Ball:
    """A real number known to lie in ``[mid - rad, mid + rad]``."""

    __slots__ = ("man", "exp", "rad", "prec")

    def __init__(self, man=0, exp=0, rad=Fraction(0), prec=DEFAULT_PREC):
        if rad < 0:
            raise ValueError("ball radius must be non-negative")
        if man == 0:
            exp = 0
        object.__setattr__(self, "man", int(man))
        object.__setattr__(self, "exp", int(exp))
        object.__setattr__(self, "rad", Fraction(rad))
        object.__setattr__(self, "prec", int(prec))

    def __setattr__(self, name, value):
        raise AttributeError("Ball is immutable")

    # construction -------------------------------------------------------

    @classmethod
    def exact(cls, value, prec=DEFAULT_PREC):
        """Ball around an int or Fraction, rounded to ``prec`` bits."""
        if isinstance(value, Ball):
            return value
        q = Fraction(value)
        if q.denominator == 1:
            man, exp, err = _round_mid(q.numerator, 0, prec)
            return cls(man, exp, _round_up(err), prec)
        den = q.denominator
        if den & (den - 1) == 0:
            man, exp, err = _round_mid(q.numerator, -(den.bit_length() - 1), prec)
            return cls(man, exp, _round_up(err), prec)
        # s chosen so the quotient carries at least prec + 2 bits
        s = prec + 2 + den.bit_length() - abs(q.numerator).bit_length()
        num = q.numerator << s if s >= 0 else q.numerator
        den2 = den if s >= 0 else den << -s
        man, r = divmod(num, den2)
        if 2 * r >= den2:
            man += 1
        err = _pow2(-s - 1)
        man, exp, err2 = _round_mid(man, -s, prec)
        return cls(man, exp, _round_up(err + err2), prec)

    @classmethod
    def from_mid_rad(cls, mid, rad, prec=DEFAULT_PREC):
        b = cls.exact(Fraction(mid), prec)
        return cls(b.man, b.exp, _round_up(b.rad + Fraction(rad)), prec)

    @classmethod
    def from_decimal(cls, mid, rad, prec=DEFAULT_PREC):
        return cls.from_mid_rad(Fraction(Decimal(mid)), Fraction(Decimal(rad)), prec)

    # inspection ---------------------------------------------------------

    @property
    def mid(self):
        return self.man * _pow2(self.exp)

    @property
    def lower(self):
        return self.mid - self.rad

    @property
    def upper(self):
        return self.mid + self.rad

    def mag(self):
        """Upper bound on |x| for x in the ball."""
        return _mag_up(self.man, self.exp) + self.rad

    def mig(self):
        """Lower bound on |x| for x in the ball (0 if the ball contains 0)."""
        m = _mag_down(self.man, self.exp) - self.rad
        return m if m > 0 else Fraction(0)

    def contains(self, value):
        if isinstance(value, Ball):
            return abs(value.mid - self.mid) + value.rad <= self.rad
        return abs(Fraction(value) - self.mid) <= self.rad

    def contains_zero(self):
        return self.contains(0)

    def is_exact(self):
        return self.rad == 0

    def log2_mag(self):
        """Rough exponent of the magnitude, for scaling decisions."""
        m = self.mag()
        if m == 0:
            return -10 ** 9
        return m.numerator.bit_length() - m.denominator.bit_length()

    def with_prec(self, prec):
        man, exp, err = _round_mid(self.man, self.exp, prec)
        return Ball(man, exp, _round_up(self.rad + err), prec)

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"Ball({mpmath.nstr(mpmath.mpf(self.mid.numerator) / self.mid.denominator, 20)} +/- {float(self.rad):.3g})"

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Ball):
            return other
        if isinstance(other, (int, Fraction)):
            return Ball.exact(other, self.prec)
        return NotImplemented

    def __neg__(self):
        return Ball(-self.man, self.exp, self.rad, self.prec)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.prec, other.prec)
        if self.man == 0:
            man, exp = other.man, other.exp
        elif other.man == 0:
            man, exp = self.man, self.exp
        else:
            exp = min(self.exp, other.exp)
            man = (self.man << (self.exp - exp)) + (other.man << (other.exp - exp))
        man, exp, err = _round_mid(man, exp, prec)
        return Ball(man, exp, _round_up(self.rad + other.rad + err), prec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int) and abs(other).bit_length() <= 64:
            man, exp, err = _round_mid(self.man * other, self.exp, self.prec)
            return Ball(man, exp, _round_up(self.rad * abs(other) + err), self.prec)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.prec, other.prec)
        man, exp, err = _round_mid(self.man * other.man, self.exp + other.exp, prec)
        rad = err
        if self.rad or other.rad:
            rad += (_mag_up(self.man, self.exp) * other.rad
                    + _mag_up(other.man, other.exp) * self.rad
                    + self.rad * other.rad)
        return Ball(man, exp, _round_up(rad), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int) and other != 0:
            return self._div_int(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._div(other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other._div(self)

    def _div_int(self, n):
        prec = self.prec
        s = prec + 2 + abs(n).bit_length() - abs(self.man).bit_length()
        s = max(s, 0)
        # floor division: |exact - q| < 1 ulp
        q = (self.man << s) // n
        err = _pow2(self.exp - s)
        man, exp, err2 = _round_mid(q, self.exp - s, prec)
        return Ball(man, exp, _round_up(self.rad / abs(n) + err + err2), prec)

    def _div(self, other):
        prec = max(self.prec, other.prec)
        dmin = _mag_down(other.man, other.exp) - other.rad
        if dmin <= 0:
            raise DomainError("division by a ball that may contain zero")
        if self.man == 0:
            q, exp, err = 0, 0, Fraction(0)
        else:
            s = prec + 2 + abs(other.man).bit_length() - abs(self.man).bit_length()
            s = max(s, 0)
            num = self.man << s
            # floor division: |num/den - q| < 1, scaled
            q = num // other.man
            exp = self.exp - other.exp - s
            err = _pow2(exp)
        man, exp, err2 = _round_mid(q, exp, prec)
        rad = err + err2
        if self.rad or other.rad:
            dmid = _mag_down(other.man, other.exp)
            rad += (_mag_up(self.man, self.exp) * other.rad + _mag_up(other.man, other.exp) * self.rad) / (dmid * dmin)
        return Ball(man, exp, _round_up(rad), prec)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Ball.exact(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def square(self):
        return self * self

    # serialization ------------------------------------------------------

    def to_strings(self, digits=None):
        """Decimal (mid, rad) strings; re-parsing yields a ball containing this one."""
        if digits is None:
            digits = int(math.ceil(self.prec * math.log10(2))) + 3
        mid = self.mid
        if mid == 0:
            mid_str, err = "0", Fraction(0)
        else:
            e10 = _floor_log10(abs(mid))
            shift = e10 - digits + 1
            scaled = mid / (Fraction(10) ** shift)
            q = round(scaled)
            err = abs(scaled - q) * Fraction(10) ** shift
            mid_str = f"{q}e{shift}" if shift else str(q)
        rad = self.rad + err
        return mid_str, _rad_string(rad)


def _floor_log10(q):
    e = int(math.floor((q.numerator.bit_length() - q.denominator.bit_length()) * math.log10(2)))
    while Fraction(10) ** e > q:
        e -= 1
    while Fraction(10) ** (e + 1) <= q:
        e += 1
    return e


def _rad_string(rad):
    """Round rad up to 8 significant decimal digits."""
    if rad == 0:
        return "0"
    e10 = _floor_log10(rad)
    shift = e10 - 7
    scaled = rad / (Fraction(10) ** shift)
    q = -((-scaled.numerator) // scaled.denominator)
    return f"{q}e{shift}"


def sign_certified(x):
    """Certified sign of a ball; never reports zero."""
    if x.mid - x.rad > 0:
        return SignVerdict.POSITIVE
    if x.mid + x.rad < 0:
        return SignVerdict.NEGATIVE
    return SignVerdict.UNKNOWN


def exact_sign(q):
    q = Fraction(q)
    if q > 0:
        return SignVerdict.POSITIVE
    if q < 0:
        return SignVerdict.NEGATIVE
    return SignVerdict.ZERO


# logarithms ---------------------------------------------------------------


def _atanh_ball(s, w, q):
    """atanh(s) for an exact rational s with |s| <= 1/q.

    The series is truncated once the tail drops below 2**-(w+4); the tail bound
    is added to the radius.
    """
    sb = Ball.exact(s, w)
    if s == 0:
        return Ball(0, 0, Fraction(0), w)
    n_terms = int(math.ceil((w + 4) / (2 * math.log2(q)))) + 1
    s2 = sb * sb
    term = sb
    total = sb
    for j in range(1, n_terms + 1):
        term = term * s2
        total = total + term / (2 * j + 1)
    # tail: sum_{j > N} |s|^(2j+1)/(2j+1) <= |s|^(2N+3) / (1 - s^2)
    tail = Fraction(1, q ** (2 * n_terms + 3)) * Fraction(q * q, q * q - 1)
    return Ball(total.man, total.exp, _round_up(total.rad + tail), w)


@functools.lru_cache(maxsize=64)
def ln2(prec=DEFAULT_PREC):
    """Enclosure of log 2 via 2*atanh(1/3)."""
    w = prec + _GUARD
    return (_atanh_ball(Fraction(1, 3), w, 3) * 2).with_prec(prec)


def _log_of_dyadic(man, exp, w):
    """log(man * 2**exp) for man > 0 not a power of two."""
    L = man.bit_length()
    if 3 * man < 2 << L:
        top, k = 1 << (L - 1), exp + L - 1
    else:
        top, k = 1 << L, exp + L
    # man/top lies in [2/3, 4/3), so |s| <= 1/5
    s = Fraction(man - top, man + top)
    core = _atanh_ball(s, w, 5) * 2
    if k == 0:
        return core
    return ln2(w) * k + core


def ball_log(x, prec=None):
    """Enclosure of log(x) for a ball certified positive."""
    if not isinstance(x, Ball):
        x = Ball.exact(x, prec or DEFAULT_PREC)
    if sign_certified(x) is not SignVerdict.POSITIVE:
        raise DomainError("ball_log requires a ball certified positive")
    prec = prec or x.prec
    w = prec + _GUARD
    if x.man == 1 << (x.man.bit_length() - 1):
        # exact power of two
        core = ln2(w) * (x.exp + x.man.bit_length() - 1)
    else:
        core = _log_of_dyadic(x.man, x.exp, w)
    prop = Fraction(0)
    if x.rad:
        prop = x.rad / (x.mid - x.rad)
    out = core.with_prec(prec)
    return Ball(out.man, out.exp, _round_up(out.rad + prop), prec)


def ball_log_abs(x, prec=None):
    """log|x| for a ball certified nonzero."""
    if sign_certified(x) is SignVerdict.NEGATIVE:
        return ball_log(-x, prec)
    return ball_log(x, prec)


# matrices -----------------------------------------------------------------


def to_ball_matrix(M, prec=DEFAULT_PREC):
    return [[v if isinstance(v, Ball) else Ball.exact(v, prec) for v in row] for row in M]


def _laplace_det(M):
    n = len(M)
    if n == 0:
        return Ball.exact(1)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = None
    for j in range(n):
        if M[0][j].man == 0 and M[0][j].rad == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _laplace_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return Ball(0, 0, Fraction(0), M[0][0].prec)
    return total


def ball_det(M, prec=None):
    """Enclosure of det(M) by pivoted elimination with outward rounding.

    Columns where no pivot can be certified nonzero are finished by cofactor
    expansion, which needs no division and always yields a valid enclosure.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise InputError("ball_det needs a square matrix")
    if n == 0:
        return Ball.exact(1, prec or DEFAULT_PREC)
    A = to_ball_matrix(M, prec or DEFAULT_PREC)
    if prec:
        A = [[v.with_prec(max(prec, v.prec)) for v in row] for row in A]
    det = Ball.exact(1, max(v.prec for row in A for v in row))
    for col in range(n):
        best, best_mig = None, Fraction(0)
        for r in range(col, n):
            m = A[r][col].mig()
            if m > best_mig:
                best, best_mig = r, m
        if best is None:
            rest = [row[col:] for row in A[col:]]
            return det * _laplace_det(rest)
        if best != col:
            A[col], A[best] = A[best], A[col]
            det = -det
        piv = A[col][col]
        det = det * piv
        for r in range(col + 1, n):
            if A[r][col].man == 0 and A[r][col].rad == 0:
                continue
            f = A[r][col] / piv
            A[r] = [A[r][c] - f * A[col][c] if c > col else A[r][c] for c in range(n)]
    return det


def det_exact_zero_by_skew(M, skew=False):
    """Certify det(M) == 0 for an odd-dimensional skew-symmetric matrix.

    ``skew`` is the caller's assertion that the exact underlying matrix satisfies
    M == -M^T; the entry balls are checked for consistency with that claim.
    """
    n = len(M)
    if n % 2 == 0:
        raise StructureError("skew-symmetric determinant vanishes only in odd dimension")
    if not skew:
        raise StructureError("exact skew-symmetry was not asserted by the caller")
    for i in range(n):
        if not _as_ball(M[i][i]).contains_zero():
            raise StructureError(f"diagonal entry {i} is certified nonzero")
        for j in range(i + 1, n):
            if not (_as_ball(M[i][j]) + _as_ball(M[j][i])).contains_zero():
                raise StructureError(f"entries ({i},{j}) and ({j},{i}) refute skew-symmetry")
    return True


def _as_ball(v):
    return v if isinstance(v, Ball) else Ball.exact(v)


def ball_inverse(M):
    """Gauss-Jordan inverse; raises PrecisionExhausted if a pivot cannot be certified."""
    n = len(M)
    A = [list(row) + [Ball.exact(1 if i == j else 0, row[0].prec) for j in range(n)]
         for i, row in enumerate(to_ball_matrix(M))]
    for col in range(n):
        best, best_mig = None, Fraction(0)
        for r in range(col, n):
            m = A[r][col].mig()
            if m > best_mig:
                best, best_mig = r, m
        if best is None:
            raise PrecisionExhausted("matrix inverse: no certified pivot")
        A[col], A[best] = A[best], A[col]
        piv = A[col][col]
        A[col] = [v / piv for v in A[col]]
        for r in range(n):
            if r == col:
                continue
            f = A[r][col]
            if f.man == 0 and f.rad == 0:
                continue
            A[r] = [A[r][c] - f * A[col][c] for c in range(2 * n)]
    return [row[n:] for row in A]


def dot(u, v):
    acc = None
    for a, b in zip(u, v):
        t = a * b
        acc = t if acc is None else acc + t
    return acc if acc is not None else Ball.exact(0)


def fraction_det(M):
    """Exact determinant of a rational matrix (Gaussian elimination over Q)."""
    A = [[Fraction(v) for v in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] / A[c][c]
                A[r] = [A[r][k] - f * A[c][k] for k in range(n)]
    return det


# real roots ---------------------------------------------------------------


def _int_poly(f):
    f = poly.trim(f)
    if any(Fraction(c).denominator != 1 for c in f):
        raise InputError("isolate_real_roots expects integer coefficients")
    return [int(c) for c in f]


def _sign_at(f, x):
    """Exact sign of f at a rational x."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    d = len(f) - 1
    acc = sum(f[i] * p ** i * q ** (d - i) for i in range(d + 1))
    return (acc > 0) - (acc < 0)


def _descartes(f, a, b):
    """Sign variations of (x+1)^d f((a x + b)/(x+1)): bounds roots in (a, b)."""
    d = len(f) - 1
    g = []
    lin = [Fraction(b), Fraction(a)]
    one = [Fraction(1), Fraction(1)]
    pw_lin = [[Fraction(1)]]
    for _ in range(d):
        pw_lin.append(poly.mul(pw_lin[-1], lin))
    pw_one = [[Fraction(1)]]
    for _ in range(d):
        pw_one.append(poly.mul(pw_one[-1], one))
    for i, c in enumerate(f):
        if c:
            g = poly.add(g, poly.scale(poly.mul(pw_lin[i], pw_one[d - i]), c))
    signs = [(c > 0) - (c < 0) for c in g if c != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def isolate_real_roots(f):
    """Disjoint rational isolating intervals (lo, hi), one per real root, ascending.

    ``lo == hi`` marks an exact rational root; otherwise f(lo), f(hi) have
    opposite signs and exactly one root lies strictly between them.
    """
    f = _int_poly(f)
    if not f:
        raise InputError("cannot isolate roots of the zero polynomial")
    if len(f) == 1:
        return []
    if poly.degree(poly.gcd(f, poly.derivative(f))) > 0:
        raise InputError("polynomial is not squarefree")
    lead = abs(f[-1])
    bound = 1 + max(Fraction(abs(c), lead) for c in f[:-1])
    B = 1
    while B <= bound:
        B *= 2
    out = []
    stack = [(Fraction(-B), Fraction(B))]
    while stack:
        a, b = stack.pop()
        v = _descartes(f, a, b)
        if v == 0:
            continue
        if v == 1:
            out.append((a, b))
            continue
        c = (a + b) / 2
        if _sign_at(f, c) == 0:
            out.append((c, c))
        stack.append((a, c))
        stack.append((c, b))
    out.sort()
    return out


def refine_root(f, lo, hi, bits):
    """Shrink an isolating interval to width <= 2**-bits (exact sign checks)."""
    f = _int_poly(f)
    lo, hi = Fraction(lo), Fraction(hi)
    if lo == hi:
        return lo, hi
    width = _pow2(-bits)
    s_lo = _sign_at(f, lo)
    # a few bisections to make Newton safe, then Newton with exact verification
    for _ in range(8):
        if hi - lo <= width:
            return lo, hi
        c = (lo + hi) / 2
        s = _sign_at(f, c)
        if s == 0:
            return c, c
        if s == s_lo:
            lo = c
        else:
            hi = c
    if hi - lo > width:
        with mpmath.workprec(bits + 64):
            fp = [mpmath.mpf(c) for c in reversed(f)]
            try:
                r = mpmath.findroot(lambda x: mpmath.polyval(fp, x),
                                    mpmath.mpf(lo.numerator) / lo.denominator * 0.5
                                    + mpmath.mpf(hi.numerator) / hi.denominator * 0.5)
                mid = _mpf_to_fraction(r)
            except (ZeroDivisionError, ValueError):
                mid = None
        if mid is not None:
            half = _pow2(-bits - 1)
            a, b = mid - half, mid + half
            if lo <= a and b <= hi:
                sa, sb = _sign_at(f, a), _sign_at(f, b)
                if sa == 0:
                    return a, a
                if sb == 0:
                    return b, b
                if sa != sb:
                    return a, b
    while hi - lo > width:
        c = (lo + hi) / 2
        s = _sign_at(f, c)
        if s == 0:
            return c, c
        if s == s_lo:
            lo = c
        else:
            hi = c
    return lo, hi


def _mpf_to_fraction(x):
    # man_exp drops the sign; the raw tuple keeps it
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    q = Fraction(int(man)) * _pow2(int(exp))
    return -q if sign else q


def root_ball(f, interval, prec):
    lo, hi = refine_root(f, interval[0], interval[1], prec + 4)
    mid = (lo + hi) / 2
    return Ball.from_mid_rad(mid, (hi - lo) / 2, prec)


def poly_ball_eval(coeffs, x):
    """Horner evaluation of a rational-coefficient polynomial at a ball."""
    acc = Ball.exact(0, x.prec)
    for c in reversed(coeffs):
        acc = acc * x + Ball.exact(c, x.prec)
    return acc
