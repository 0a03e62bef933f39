"""Parsers for field polynomials (variable x) and field elements (variable a)."""

import re
from fractions import Fraction

from .errors import DivisionByZero, ParseError
from .field import FieldElement, make_field

_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


def tokenize(text):
    """List of (kind, value, position); kind is 'int', 'op' or 'end'."""
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        start = m.start(1) if m.group(1) is not None else m.start(2)
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), start))
        else:
            out.append(("op", m.group(2), start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Cursor:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, op):
        kind, val, _ = self.peek()
        if kind == "op" and val == op:
            self.i += 1
            return True
        return False

    def fail(self, what):
        kind, val, pos = self.peek()
        token = "end of input" if kind == "end" else str(val)
        raise ParseError(f"expected {what}", pos, token)

    def integer(self):
        kind, val, _ = self.peek()
        if kind != "int":
            self.fail("an integer")
        self.i += 1
        return val


# field polynomials -------------------------------------------------------------


def parse_polynomial(text, var="x"):
    """POLY := TERM (('+'|'-') TERM)*, TERM := [INT '*'] var ['^' INT] | INT.

    Returns integer coefficients, constant term first.
    """
    cur = _Cursor(text)
    coeffs = {}
    sign = -1 if cur.accept("-") else 1
    if sign == 1:
        cur.accept("+")
    while True:
        c, e = _poly_term(cur, var)
        coeffs[e] = coeffs.get(e, 0) + sign * c
        if cur.accept("+"):
            sign = 1
        elif cur.accept("-"):
            sign = -1
        elif cur.peek()[0] == "end":
            break
        else:
            cur.fail("'+', '-' or end of input")
    deg = max(coeffs)
    out = [coeffs.get(i, 0) for i in range(deg + 1)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _poly_term(cur, var):
    kind, val, _ = cur.peek()
    if kind == "int":
        c = cur.next()[1]
        if not cur.accept("*"):
            return c, 0
        if not cur.accept(var):
            cur.fail(f"'{var}'")
    elif cur.accept(var):
        c = 1
    else:
        cur.fail(f"an integer or '{var}'")
    e = 1
    if cur.accept("^"):
        e = cur.integer()
    return c, e


def parse_field(text):
    return make_field(parse_polynomial(text, "x"))


# field elements ------------------------------------------------------------------


def parse_element(text, K, var="a"):
    """Rational expression in the generator ``a`` with + - * / ^ and parentheses."""
    cur = _Cursor(text)
    if cur.peek()[0] == "end":
        cur.fail("an expression")
    val = _expr(cur, K, var)
    if cur.peek()[0] != "end":
        cur.fail("an operator or end of input")
    return val


def _expr(cur, K, var):
    val = _term(cur, K, var)
    while True:
        if cur.accept("+"):
            val = val + _term(cur, K, var)
        elif cur.accept("-"):
            val = val - _term(cur, K, var)
        else:
            return val


def _term(cur, K, var):
    val = _unary(cur, K, var)
    while True:
        if cur.accept("*"):
            val = val * _unary(cur, K, var)
        elif cur.peek()[:2] == ("op", "/"):
            pos = cur.peek()[2]
            cur.next()
            rhs = _unary(cur, K, var)
            if rhs.is_zero():
                raise DivisionByZero(f"division by zero at position {pos}")
            val = val / rhs
        else:
            return val


def _unary(cur, K, var):
    if cur.accept("-"):
        return -_unary(cur, K, var)
    if cur.accept("+"):
        return _unary(cur, K, var)
    return _power(cur, K, var)


def _power(cur, K, var):
    base = _atom(cur, K, var)
    if cur.accept("^"):
        neg = cur.accept("-")
        e = cur.integer()
        if neg:
            if base.is_zero():
                raise DivisionByZero("zero raised to a negative power")
            e = -e
        base = base ** e
    return base


def _atom(cur, K, var):
    kind, val, _ = cur.peek()
    if kind == "int":
        cur.next()
        return FieldElement(K, [Fraction(val)])
    if cur.accept(var):
        return K.gen
    if cur.accept("("):
        inner = _expr(cur, K, var)
        if not cur.accept(")"):
            cur.fail("')'")
        return inner
    cur.fail(f"an integer, '{var}' or '('")


def parse_units(text, K):
    return [parse_element(part, K) for part in text.split(";") if part.strip()]


def parse_rational_matrix(text):
    """'2,3;3,2' -> [[2, 3], [3, 2]] with rational entries like 1/2."""
    rows = []
    for r in text.split(";"):
        if not r.strip():
            continue
        row = []
        for item in r.split(","):
            try:
                row.append(Fraction(item.strip()))
            except (ValueError, ZeroDivisionError):
                raise ParseError("bad matrix entry", text.find(item.strip()), item.strip())
        rows.append(row)
    return rows
