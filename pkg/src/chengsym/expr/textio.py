"""Plain-text expression grammar.

Printing is deterministic and round-trips through :func:`parse`:

* infix operators ``+ - * / ^`` with the usual precedence, ``^`` binding
  tightest and right-associative; exponents must be rational constants,
  written ``2``, ``-3`` or ``(1/2)``;
* ``exp(...)`` and ``log(...)`` are reserved;
* applied function atoms are written ``w(f)``; low-order derivatives of
  single-argument atoms use primes (``w''(f)``) and the general form is
  ``D[u,1,0](t, x)`` (one count per argument slot);
* numbers are integers or ratios like ``5/3``.

Vector fields use one summand per coordinate, each ending in ``d/dname``,
e.g. ``g(x) d/dx - v*D[g,1](x) d/dv`` (an omitted coefficient means 1).
"""

from __future__ import annotations

import re
from fractions import Fraction

from chengsym.expr.nodes import (
    Add,
    Atom,
    Exp,
    Expression,
    Log,
    Mul,
    Num,
    Pow,
    Sym,
    add,
    datom,
    exp_,
    log_,
    mul,
    num,
    pow_,
    sym,
)

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _fmt_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _precedence(e: Expression) -> int:
    if isinstance(e, Num):
        if e.value < 0:
            return _PREC_NEG
        return _PREC_ATOM if e.value.denominator == 1 else _PREC_MUL
    if isinstance(e, Add):
        return _PREC_ADD
    if isinstance(e, Mul):
        return _PREC_MUL
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(e: Expression, parent_prec: int) -> str:
    text = to_text(e)
    if _precedence(e) < parent_prec:
        return f"({text})"
    return text


def to_text(e: Expression) -> str:
    """Serialize an expression in the documented grammar."""
    if isinstance(e, Num):
        return _fmt_fraction(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Add):
        parts = []
        for t in e.terms:
            if isinstance(t, Num) and t.value < 0:
                parts.append(("-", _fmt_fraction(-t.value)))
                continue
            if isinstance(t, Mul) and isinstance(t.factors[0], Num) and t.factors[0].value < 0:
                flipped = mul(num(-t.factors[0].value), *t.factors[1:])
                parts.append(("-", _wrap(flipped, _PREC_ADD + 1)))
                continue
            parts.append(("+", _wrap(t, _PREC_ADD + 1)))
        sign, first = parts[0]
        text = ("-" if sign == "-" else "") + first
        for sign, chunk in parts[1:]:
            text += f" {sign} {chunk}"
        return text
    if isinstance(e, Mul):
        factors = e.factors
        if isinstance(factors[0], Num) and factors[0].value == -1 and len(factors) > 1:
            rest = factors[1] if len(factors) == 2 else Mul(factors[1:])
            return "-" + _wrap(rest, _PREC_MUL)
        return "*".join(_wrap(f, _PREC_MUL + 1) for f in factors)
    if isinstance(e, Pow):
        expo = e.exponent
        if expo.denominator == 1 and expo >= 0:
            etext = str(expo.numerator)
        else:
            etext = f"({_fmt_fraction(expo)})"
        return f"{_wrap(e.base, _PREC_POW + 1)}^{etext}"
    if isinstance(e, Exp):
        return f"exp({to_text(e.arg)})"
    if isinstance(e, Log):
        return f"log({to_text(e.arg)})"
    if isinstance(e, Atom):
        args = ", ".join(to_text(a) for a in e.args)
        if all(d == 0 for d in e.deriv):
            return f"{e.name}({args})"
        if len(e.args) == 1 and e.deriv[0] <= 3:
            return f"{e.name}{chr(39) * e.deriv[0]}({args})"
        counts = ",".join(str(d) for d in e.deriv)
        return f"D[{e.name},{counts}]({args})"
    raise TypeError(f"unprintable node {type(e).__name__}")


# -- parsing -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),\[\]'])|(?P<end>$))"
)


class ExprSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos <= len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or (m.end() == pos and pos < len(text)):
            raise ExprSyntaxError(f"unexpected character {text[pos]!r} at position {pos}")
        if m.group("end") is not None and m.end() == pos:
            break
        pos = m.end()
        if m.group("num") is not None:
            tokens.append(("num", m.group("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        elif m.group("op") is not None:
            tokens.append(("op", m.group("op")))
        if pos == len(text):
            break
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, value=None):
        tok = self.advance()
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise ExprSyntaxError(
                f"expected {value or kind}, found {tok[1]!r} in {self.text!r}"
            )
        return tok

    # expr := term (('+'|'-') term)*
    def parse_expr(self) -> Expression:
        terms = [self.parse_term()]
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.advance()[1]
            nxt = self.parse_term()
            terms.append(nxt if op == "+" else mul(num(-1), nxt))
        return add(*terms)

    # term := unary (('*'|'/') unary)*
    def parse_term(self) -> Expression:
        factors = [self.parse_unary()]
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.advance()[1]
            nxt = self.parse_unary()
            factors.append(nxt if op == "*" else pow_(nxt, -1))
        return mul(*factors)

    # unary := ('-'|'+')* power
    def parse_unary(self) -> Expression:
        sign = 1
        while self.peek() in (("op", "-"), ("op", "+")):
            if self.advance()[1] == "-":
                sign = -sign
        e = self.parse_power()
        return e if sign == 1 else mul(num(-1), e)

    # power := primary ('^' exponent)?
    def parse_power(self) -> Expression:
        base = self.parse_primary()
        if self.peek() == ("op", "^"):
            self.advance()
            return pow_(base, self.parse_exponent())
        return base

    def parse_exponent(self) -> Fraction:
        sign = 1
        while self.peek() in (("op", "-"), ("op", "+")):
            if self.advance()[1] == "-":
                sign = -sign
        tok = self.peek()
        if tok == ("op", "("):
            self.advance()
            inner = self.parse_expr()
            self.expect("op", ")")
            if not isinstance(inner, Num):
                raise ExprSyntaxError("exponent must be a rational constant")
            return sign * inner.value
        if tok[0] == "num":
            self.advance()
            return Fraction(sign * int(tok[1]))
        raise ExprSyntaxError(f"bad exponent near {tok[1]!r}")

    def parse_primary(self) -> Expression:
        kind, value = self.advance()
        if kind == "num":
            return num(int(value))
        if kind == "op" and value == "(":
            inner = self.parse_expr()
            self.expect("op", ")")
            return inner
        if kind == "name":
            if value == "D" and self.peek() == ("op", "["):
                return self.parse_dform()
            primes = 0
            while self.peek() == ("op", "'"):
                self.advance()
                primes += 1
            if self.peek() == ("op", "("):
                args = self.parse_args()
                if value == "exp":
                    if primes or len(args) != 1:
                        raise ExprSyntaxError("exp takes exactly one argument")
                    return exp_(args[0])
                if value == "log":
                    if primes or len(args) != 1:
                        raise ExprSyntaxError("log takes exactly one argument")
                    return log_(args[0])
                if primes and len(args) != 1:
                    raise ExprSyntaxError("prime notation needs a one-argument atom")
                deriv = (primes,) if len(args) == 1 else (0,) * len(args)
                return datom(value, deriv, *args)
            if primes:
                raise ExprSyntaxError("prime notation requires an argument list")
            return sym(value)
        raise ExprSyntaxError(f"unexpected token {value!r} in {self.text!r}")

    def parse_dform(self) -> Expression:
        self.expect("op", "[")
        name_tok = self.expect("name")
        counts = []
        while self.peek() == ("op", ","):
            self.advance()
            counts.append(int(self.expect("num")[1]))
        self.expect("op", "]")
        args = self.parse_args()
        if len(counts) != len(args):
            raise ExprSyntaxError("derivative counts must match argument count")
        return datom(name_tok[1], tuple(counts), *args)

    def parse_args(self) -> tuple[Expression, ...]:
        self.expect("op", "(")
        if self.peek() == ("op", ")"):
            self.advance()
            return ()
        args = [self.parse_expr()]
        while self.peek() == ("op", ","):
            self.advance()
            args.append(self.parse_expr())
        self.expect("op", ")")
        return tuple(args)


def parse(text: str) -> Expression:
    """Parse the documented grammar into an expression tree."""
    parser = _Parser(text)
    result = parser.parse_expr()
    parser.expect("end")
    return result


_DDX_RE = re.compile(r"d\s*/\s*d([A-Za-z_][A-Za-z0-9_]*)")


def parse_vector_field_text(text: str) -> list[tuple[str, Expression]]:
    """Parse ``coeff d/dx + ... `` into [(coordinate, coefficient)] pairs.

    Each summand ends in its ``d/dname`` direction; the coefficient before
    it is an ordinary expression (``*`` before the direction optional, an
    omitted coefficient means 1).  Coefficients themselves must not contain
    a bare ``d/dname``.
    """
    pieces = _DDX_RE.split(text)
    if len(pieces) < 3:
        raise ExprSyntaxError(f"no d/dname direction found in {text!r}")
    if pieces[-1].strip():
        raise ExprSyntaxError(f"trailing text after last direction: {pieces[-1]!r}")
    result = []
    for i in range(0, len(pieces) - 1, 2):
        coeff_text = pieces[i].strip()
        coord = pieces[i + 1]
        if coeff_text.endswith("*"):
            coeff_text = coeff_text[:-1].strip()
        if coeff_text in ("", "+"):
            coeff: Expression = num(1)
        elif coeff_text == "-":
            coeff = num(-1)
        else:
            coeff = parse(coeff_text)
        result.append((coord, coeff))
    return result
