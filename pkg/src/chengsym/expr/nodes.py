"""Immutable symbolic expression trees.

Node kinds: exact rational constants, named symbols, n-ary sums and
products, rational powers, exp, log, and applied function atoms that carry
a derivative multi-index (one entry per argument slot).

Construction goes through the factory functions ``add``, ``mul``, ``pow_``,
``exp_``, ``log_``, ``num``, ``sym``, ``atom`` / ``datom`` (the operator
overloads call them).  The factories perform light canonicalisation only:

* sums and products are flattened, constants folded exactly, and equal
  terms / equal bases collected with rational coefficients / exponents;
* children are kept in a canonical total order, so structurally equal
  expressions compare equal;
* ``exp`` distributes over sums and pulls rational coefficients out as
  powers, so that e.g. ``exp(2*s)`` and ``exp(s)**2`` coincide.

Anything stronger (common denominators, expansion of products of sums)
lives in :mod:`chengsym.expr.normal`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from chengsym.errors import SymbolicDomainError

Q = Fraction

ExprLike = Union["Expression", int, Fraction, float]


def _coerce(value: ExprLike) -> "Expression":
    if isinstance(value, Expression):
        return value
    if isinstance(value, (int, Fraction)):
        return num(value)
    if isinstance(value, float):
        # floats convert exactly (every float is a dyadic rational)
        return num(Fraction(value))
    raise TypeError(f"cannot interpret {value!r} as an expression")


class Expression:
    """Base class.  Instances are immutable and safe to share."""

    __slots__ = ("_hash", "_key")

    def _payload(self):
        raise NotImplementedError

    # -- structural identity -------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = num(other)
        if not isinstance(other, Expression):
            return NotImplemented
        if self is other:
            return True
        return type(self) is type(other) and self._payload() == other._payload()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        h = getattr(self, "_hash", None)
        if h is None:
            h = hash((type(self).__name__, self._payload()))
            object.__setattr__(self, "_hash", h)
        return h

    def sort_key(self):
        key = getattr(self, "_key", None)
        if key is None:
            key = (self._rank, self._keytext())
            object.__setattr__(self, "_key", key)
        return key

    def _keytext(self) -> str:
        from chengsym.expr.textio import to_text

        return to_text(self)

    # -- arithmetic sugar ----------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(num(-1), _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(num(-1), self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return mul(self, pow_(_coerce(other), -1))

    def __rtruediv__(self, other):
        return mul(_coerce(other), pow_(self, -1))

    def __pow__(self, exponent):
        return pow_(self, exponent)

    def __neg__(self):
        return mul(num(-1), self)

    def __repr__(self):
        from chengsym.expr.textio import to_text

        return to_text(self)

    # -- views ---------------------------------------------------------------

    def children(self) -> tuple["Expression", ...]:
        return ()

    def free_symbols(self) -> frozenset["Sym"]:
        kids = self.children()
        if not kids:
            return frozenset()
        return frozenset().union(*(c.free_symbols() for c in kids))

    def function_atoms(self) -> tuple["Atom", ...]:
        """All distinct applied atoms, in deterministic (DFS) order."""
        seen: dict[Atom, None] = {}

        def walk(e: Expression):
            for c in e.children():
                walk(c)
            if isinstance(e, Atom):
                seen.setdefault(e, None)

        walk(self)
        return tuple(seen)


class Num(Expression):
    """Exact rational constant (integers are the denominator-1 case)."""

    __slots__ = ("value",)
    _rank = 0

    def __init__(self, value: Fraction):
        object.__setattr__(self, "value", value)

    def _payload(self):
        return self.value

    def _keytext(self):
        return ""

    def sort_key(self):
        return (self._rank, "", self.value)

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1


class Sym(Expression):
    """Named scalar symbol."""

    __slots__ = ("name",)
    _rank = 1

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def _payload(self):
        return self.name

    def free_symbols(self):
        return frozenset((self,))


class Add(Expression):
    __slots__ = ("terms",)
    _rank = 4

    def __init__(self, terms: tuple[Expression, ...]):
        object.__setattr__(self, "terms", terms)

    def _payload(self):
        return self.terms

    def children(self):
        return self.terms


class Mul(Expression):
    __slots__ = ("factors",)
    _rank = 3

    def __init__(self, factors: tuple[Expression, ...]):
        object.__setattr__(self, "factors", factors)

    def _payload(self):
        return self.factors

    def children(self):
        return self.factors


class Pow(Expression):
    """Rational power.  The exponent is an exact Fraction, never 0 or 1."""

    __slots__ = ("base", "exponent")
    _rank = 2

    def __init__(self, base: Expression, exponent: Fraction):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)

    def _payload(self):
        return (self.base, self.exponent)

    def children(self):
        return (self.base,)


class Exp(Expression):
    __slots__ = ("arg",)
    _rank = 5

    def __init__(self, arg: Expression):
        object.__setattr__(self, "arg", arg)

    def _payload(self):
        return self.arg

    def children(self):
        return (self.arg,)


class Log(Expression):
    __slots__ = ("arg",)
    _rank = 6

    def __init__(self, arg: Expression):
        object.__setattr__(self, "arg", arg)

    def _payload(self):
        return self.arg

    def children(self):
        return (self.arg,)


class Atom(Expression):
    """Applied abstract function with a derivative multi-index.

    ``Atom("w", (f,), (2,))`` denotes the second derivative of the
    function ``w`` evaluated at ``f``.
    """

    __slots__ = ("name", "args", "deriv")
    _rank = 7

    def __init__(self, name: str, args: tuple[Expression, ...], deriv: tuple[int, ...]):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "deriv", deriv)

    def _payload(self):
        return (self.name, self.args, self.deriv)

    def children(self):
        return self.args

    @property
    def order(self) -> int:
        return sum(self.deriv)


# -- factories ---------------------------------------------------------------

_NUM_CACHE: dict[Fraction, Num] = {}


def num(value) -> Num:
    """Exact rational constant."""
    if isinstance(value, Num):
        return value
    if isinstance(value, float):
        value = Fraction(value)
    frac = Fraction(value)
    cached = _NUM_CACHE.get(frac)
    if cached is None and -64 <= frac <= 64:
        cached = _NUM_CACHE[frac] = Num(frac)
    return cached if cached is not None else Num(frac)


ZERO = num(0)
ONE = num(1)
MINUS_ONE = num(-1)


def sym(name: str) -> Sym:
    return Sym(name)


def syms(names: str) -> tuple[Sym, ...]:
    return tuple(Sym(n) for n in names.replace(",", " ").split())


def _split_coeff(e: Expression) -> tuple[Fraction, Expression | None]:
    """Split a term into (rational coefficient, remaining factor or None)."""
    if isinstance(e, Num):
        return e.value, None
    if isinstance(e, Mul) and isinstance(e.factors[0], Num):
        rest = e.factors[1:]
        remaining = rest[0] if len(rest) == 1 else Mul(rest)
        return e.factors[0].value, remaining
    return Q(1), e


def add(*terms: ExprLike) -> Expression:
    """Canonicalising n-ary sum."""
    constant = Q(0)
    by_core: dict[Expression, Fraction] = {}
    order: list[Expression] = []
    stack = [_coerce(t) for t in reversed(terms)]
    while stack:
        t = stack.pop()
        if isinstance(t, Add):
            stack.extend(reversed(t.terms))
            continue
        coeff, core = _split_coeff(t)
        if core is None:
            constant += coeff
            continue
        if core not in by_core:
            order.append(core)
            by_core[core] = coeff
        else:
            by_core[core] += coeff
    out: list[Expression] = []
    for core in sorted(order, key=Expression.sort_key):
        coeff = by_core[core]
        if coeff == 0:
            continue
        out.append(core if coeff == 1 else mul(num(coeff), core))
    if constant != 0:
        out.insert(0, num(constant))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(tuple(out))


def mul(*factors: ExprLike) -> Expression:
    """Canonicalising n-ary product; collects equal bases into powers."""
    coeff = Q(1)
    by_base: dict[Expression, Fraction] = {}
    order: list[Expression] = []
    stack = [_coerce(f) for f in reversed(factors)]
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(reversed(f.factors))
            continue
        if isinstance(f, Num):
            coeff *= f.value
            continue
        if isinstance(f, Pow):
            base, expo = f.base, f.exponent
        else:
            base, expo = f, Q(1)
        if base not in by_base:
            order.append(base)
            by_base[base] = expo
        else:
            by_base[base] += expo
    if coeff == 0:
        return ZERO
    out: list[Expression] = []
    for base in sorted(order, key=Expression.sort_key):
        expo = by_base[base]
        if expo == 0:
            continue
        out.append(base if expo == 1 else pow_(base, expo))
    # pow_ may have produced nested structure (e.g. rational roots); redo once
    if any(isinstance(f, (Mul, Num)) for f in out):
        return mul(num(coeff), *out)
    if not out:
        return num(coeff)
    if coeff != 1:
        out.insert(0, num(coeff))
    if len(out) == 1:
        return out[0]
    return Mul(tuple(out))


def _rational_root(value: Fraction, expo: Fraction) -> Fraction | None:
    """Exact value**expo if it is rational, else None."""
    if value == 0:
        return Q(0) if expo > 0 else None
    if value < 0:
        return None

    def iroot(n: int, k: int) -> int | None:
        if n in (0, 1):
            return n
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**k == n:
                return cand
        return None

    p, q = expo.numerator, expo.denominator
    if p < 0:
        value = 1 / value
        p = -p
    rn = iroot(value.numerator, q)
    rd = iroot(value.denominator, q)
    if rn is None or rd is None:
        return None
    return Q(rn, rd) ** p


def pow_(base: ExprLike, exponent) -> Expression:
    """Canonicalising rational power."""
    base = _coerce(base)
    if isinstance(exponent, Expression):
        if not isinstance(exponent, Num):
            raise SymbolicDomainError("power exponents must be rational constants")
        exponent = exponent.value
    expo = Fraction(exponent)
    if expo == 0:
        return ONE
    if expo == 1:
        return base
    if isinstance(base, Num):
        if base.value == 0:
            if expo < 0:
                raise SymbolicDomainError("zero raised to a negative power")
            if expo.denominator == 1:
                return ZERO
        if expo.denominator == 1:
            return num(base.value**expo.numerator)
        exact = _rational_root(base.value, expo)
        if exact is not None:
            return num(exact)
        return Pow(base, expo)
    if isinstance(base, Pow):
        return pow_(base.base, base.exponent * expo)
    if isinstance(base, Mul):
        return mul(*(pow_(f, expo) for f in base.factors))
    return Pow(base, expo)


def exp_(arg: ExprLike) -> Expression:
    """Canonicalising exponential: splits sums, extracts rational factors,
    and cancels against log."""
    arg = _coerce(arg)
    if isinstance(arg, Num) and arg.value == 0:
        return ONE
    if isinstance(arg, Log):
        return arg.arg
    if isinstance(arg, Add):
        return mul(*(exp_(t) for t in arg.terms))
    coeff, core = _split_coeff(arg)
    if core is not None and coeff != 1:
        return pow_(exp_(core), coeff)
    return Exp(arg)


def log_(arg: ExprLike) -> Expression:
    """Canonicalising natural logarithm (cancels exp only)."""
    arg = _coerce(arg)
    if isinstance(arg, Num) and arg.value == 1:
        return ZERO
    if isinstance(arg, Exp):
        return arg.arg
    return Log(arg)


def atom(name: str, *args: ExprLike) -> Atom:
    """Applied function atom with zero derivative multi-index."""
    coerced = tuple(_coerce(a) for a in args)
    return Atom(name, coerced, (0,) * len(coerced))


def datom(name: str, deriv: Iterable[int], *args: ExprLike) -> Atom:
    coerced = tuple(_coerce(a) for a in args)
    deriv = tuple(int(d) for d in deriv)
    if len(deriv) != len(coerced):
        raise ValueError("derivative multi-index length must match argument count")
    if any(d < 0 for d in deriv):
        raise ValueError("derivative multi-index entries must be non-negative")
    return Atom(name, coerced, deriv)
