"""Dense univariate polynomials over Q, stored as coefficient lists (constant term first)."""

from fractions import Fraction


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p):
    return len(trim(p)) - 1


def add(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p, q):
    return add(p, [-c for c in q])


def mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def scale(p, c):
    return trim([c * a for a in p])


def divmod_poly(p, q):
    """Exact long division over Q; returns (quotient, remainder)."""
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in trim(p)]
    lead = Fraction(q[-1])
    dq = len(q) - 1
    if len(r) - 1 < dq:
        return [], r
    quot = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lead
        quot[k] = c
        if c:
            for j in range(dq + 1):
                r[k + j] -= c * q[j]
    return trim(quot), trim(r[:dq])


def rem(p, q):
    return divmod_poly(p, q)[1]


def monic(p):
    p = trim(p)
    lead = Fraction(p[-1])
    return [Fraction(c) / lead for c in p]


def gcd(p, q):
    a, b = trim(p), trim(q)
    while b:
        a, b = b, rem(a, b)
    return monic(a) if a else []


def derivative(p):
    return trim([i * p[i] for i in range(1, len(p))])


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def compose_mod(p, g, f):
    """p(g(t)) reduced modulo f."""
    acc = []
    for c in reversed(trim(p)):
        acc = rem(add(mul(acc, g), [c]), f)
    return acc


def content(p):
    from math import gcd as igcd
    g = 0
    for c in p:
        g = igcd(g, int(c))
    return g


def to_str(p, var="x"):
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        if i == 0:
            mono = f"{abs(c)}"
        else:
            coef = "" if abs(c) == 1 else f"{abs(c)}*"
            mono = coef + (var if i == 1 else f"{var}^{i}")
        sign = "-" if c < 0 else "+"
        terms.append((sign, mono))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, mono in terms[1:]:
        out += f" {sign} {mono}"
    return out
