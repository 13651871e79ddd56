"""Rational-function normal form and zero testing.

``normalize`` rewrites an expression as P/Q, where P and Q are polynomials
(exact Fraction coefficients) in an alphabet of opaque generators: symbols,
``exp``/``log`` applications and function atoms, each with its arguments
normalized recursively.  Products of sums are expanded, constants folded,
like monomials collected, and monomial factors common to P and Q cancelled.
There is deliberately no polynomial gcd beyond that: identities that do not
collapse to a literal zero here are settled by sampling (:func:`is_zero`).

The form is idempotent: re-normalizing a normalized expression returns a
structurally equal tree.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterable

from chengsym.errors import EvalDomainError, IndeterminateZeroError, SymbolicDomainError
from chengsym.expr.calculus import Binding, evaluate
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

Q = Fraction

# A monomial maps generator -> nonzero positive Fraction exponent, stored as
# a tuple sorted by the generator sort key.  A poly maps monomial -> coeff.
Monomial = tuple
Poly = dict

_EMPTY: Monomial = ()


def _mono(items: Iterable) -> Monomial:
    return tuple(sorted(items, key=lambda it: it[0].sort_key()))


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    merged = dict(m1)
    for gen, expo in m2:
        total = merged.get(gen, Q(0)) + expo
        if total == 0:
            merged.pop(gen, None)
        else:
            merged[gen] = total
    return _mono(merged.items())


def _mono_pow(m: Monomial, q: Fraction) -> Monomial:
    return _mono((gen, expo * q) for gen, expo in m)


def _p_const(c: Fraction) -> Poly:
    return {} if c == 0 else {_EMPTY: c}


def _p_gen(gen: Expression) -> Poly:
    return {((gen, Q(1)),): Q(1)}


def _p_add(p1: Poly, p2: Poly) -> Poly:
    out = dict(p1)
    for m, c in p2.items():
        total = out.get(m, Q(0)) + c
        if total == 0:
            out.pop(m, None)
        else:
            out[m] = total
    return out


def _p_mul(p1: Poly, p2: Poly) -> Poly:
    if not p1 or not p2:
        return {}
    out: Poly = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            m = _mono_mul(m1, m2)
            total = out.get(m, Q(0)) + c1 * c2
            if total == 0:
                out.pop(m, None)
            else:
                out[m] = total
    return out


def _p_pow(p: Poly, n: int) -> Poly:
    result = _p_const(Q(1))
    base = p
    while n:
        if n & 1:
            result = _p_mul(result, base)
        base = _p_mul(base, base) if n > 1 else base
        n >>= 1
    return result


def _p_is_monomial(p: Poly) -> bool:
    return len(p) == 1


class RationalPair:
    """P/Q with Q a nonzero polynomial."""

    __slots__ = ("num", "den")

    def __init__(self, num_poly: Poly, den_poly: Poly):
        self.num = num_poly
        self.den = den_poly


def _pair_add(a: RationalPair, b: RationalPair) -> RationalPair:
    if a.den == b.den:
        return RationalPair(_p_add(a.num, b.num), a.den)
    return RationalPair(
        _p_add(_p_mul(a.num, b.den), _p_mul(b.num, a.den)), _p_mul(a.den, b.den)
    )


def _pair_mul(a: RationalPair, b: RationalPair) -> RationalPair:
    return RationalPair(_p_mul(a.num, b.num), _p_mul(a.den, b.den))


def _pair_pow(a: RationalPair, q: Fraction) -> RationalPair | None:
    """None means the power cannot be distributed (non-monomial base with a
    fractional exponent); caller falls back to an opaque generator."""
    if q.denominator == 1:
        n = q.numerator
        if n >= 0:
            return RationalPair(_p_pow(a.num, n), _p_pow(a.den, n))
        if not a.num:
            raise SymbolicDomainError("division by a symbolic zero")
        return RationalPair(_p_pow(a.den, -n), _p_pow(a.num, -n))
    if _p_is_monomial(a.num) and _p_is_monomial(a.den):
        (mn, cn), = a.num.items()
        (md, cd), = a.den.items()
        if cn == 1 and cd == 1:
            return RationalPair({_mono_pow(mn, q): Q(1)}, {_mono_pow(md, q): Q(1)})
    return None


def _to_pair(e: Expression) -> RationalPair:
    if isinstance(e, Num):
        return RationalPair(_p_const(e.value), _p_const(Q(1)))
    if isinstance(e, Sym):
        return RationalPair(_p_gen(e), _p_const(Q(1)))
    if isinstance(e, Add):
        out = _to_pair(e.terms[0])
        for t in e.terms[1:]:
            out = _pair_add(out, _to_pair(t))
        return out
    if isinstance(e, Mul):
        out = _to_pair(e.factors[0])
        for f in e.factors[1:]:
            out = _pair_mul(out, _to_pair(f))
        return out
    if isinstance(e, Pow):
        inner = _to_pair(e.base)
        result = _pair_pow(inner, e.exponent)
        if result is not None:
            return result
        gen = pow_(_rebuild(inner), e.exponent)
        if isinstance(gen, Pow):
            return RationalPair(_p_gen(gen), _p_const(Q(1)))
        return _to_pair(gen)
    if isinstance(e, Exp):
        gen = exp_(normalize(e.arg))
        if isinstance(gen, Exp):
            return RationalPair(_p_gen(gen), _p_const(Q(1)))
        return _to_pair(gen)
    if isinstance(e, Log):
        gen = log_(normalize(e.arg))
        if isinstance(gen, Log):
            return RationalPair(_p_gen(gen), _p_const(Q(1)))
        return _to_pair(gen)
    if isinstance(e, Atom):
        gen = datom(e.name, e.deriv, *(normalize(a) for a in e.args))
        return RationalPair(_p_gen(gen), _p_const(Q(1)))
    raise TypeError(f"cannot normalize {type(e).__name__}")


def _common_monomial(p1: Poly, p2: Poly) -> Monomial:
    """Per-generator minimum exponent over every monomial of both polys."""
    mins: dict[Expression, Fraction] = {}
    first = True
    for poly in (p1, p2):
        for mono in poly:
            entries = dict(mono)
            if first:
                mins = dict(entries)
                first = False
                continue
            for gen in list(mins):
                expo = entries.get(gen)
                if expo is None:
                    del mins[gen]
                else:
                    mins[gen] = min(mins[gen], expo)
    return _mono((g, x) for g, x in mins.items() if x > 0)


def _reduce_pair(pair: RationalPair) -> RationalPair:
    p, q = pair.num, pair.den
    if not q:
        raise SymbolicDomainError("division by a symbolic zero")
    if not p:
        return RationalPair({}, _p_const(Q(1)))
    shared = _common_monomial(p, q)
    if shared:
        inverse = _mono_pow(shared, Q(-1))
        p = {_mono_mul(m, inverse): c for m, c in p.items()}
        q = {_mono_mul(m, inverse): c for m, c in q.items()}
    # scale so the canonically-first denominator monomial has coefficient 1
    lead = min(q, key=lambda m: tuple((g.sort_key(), x) for g, x in m))
    scale = q[lead]
    if scale != 1:
        p = {m: c / scale for m, c in p.items()}
        q = {m: c / scale for m, c in q.items()}
    return RationalPair(p, q)


def _mono_expr(mono: Monomial, coeff: Fraction) -> Expression:
    factors = [pow_(gen, expo) for gen, expo in mono]
    if coeff != 1 or not factors:
        return mul(num(coeff), *factors)
    return mul(*factors)


def _poly_expr(p: Poly) -> Expression:
    if not p:
        return num(0)
    return add(*(_mono_expr(m, c) for m, c in p.items()))


def _rebuild(pair: RationalPair) -> Expression:
    pair = _reduce_pair(pair)
    numerator = _poly_expr(pair.num)
    if pair.den == _p_const(Q(1)):
        return numerator
    if numerator == 0:
        return num(0)
    return mul(numerator, pow_(_poly_expr(pair.den), -1))


def normalize(e: Expression) -> Expression:
    """Rational-function normal form (idempotent, evaluation-preserving
    away from singular points)."""
    return _rebuild(_to_pair(e))


def as_fraction_pair(e: Expression) -> tuple[Poly, Poly]:
    """Reduced (numerator, denominator) polynomials over opaque generators."""
    pair = _reduce_pair(_to_pair(e))
    return pair.num, pair.den


def poly_in(e: Expression, wrt: Expression) -> dict[int, Expression]:
    """View ``e`` (must have a ``wrt``-free denominator after clearing) as a
    polynomial in the generator ``wrt``; returns {degree: coefficient expr}.

    Raises ValueError when the denominator contains ``wrt``.
    """
    p, q = as_fraction_pair(e)
    if _poly_degree(q, wrt) > 0:
        raise ValueError("denominator contains the requested generator")
    qexpr = _poly_expr(q)
    buckets: dict[int, Poly] = {}
    for mono, coeff in p.items():
        deg = Q(0)
        rest = []
        for gen, expo in mono:
            if gen == wrt:
                deg = expo
            else:
                rest.append((gen, expo))
        if deg.denominator != 1:
            raise ValueError("fractional degree in requested generator")
        bucket = buckets.setdefault(int(deg), {})
        m = _mono(rest)
        bucket[m] = bucket.get(m, Q(0)) + coeff
    return {
        deg: normalize(mul(_poly_expr(poly), pow_(qexpr, -1)))
        for deg, poly in buckets.items()
    }


def _poly_degree(p: Poly, gen: Expression) -> int:
    deg = Q(0)
    for mono in p:
        for g, expo in mono:
            if g == gen:
                deg = max(deg, expo)
    return int(deg)


def denominator_degree(e: Expression, wrt: Expression) -> int:
    _, q = as_fraction_pair(e)
    return _poly_degree(q, wrt)


# -- probabilistic zero test ---------------------------------------------------

SAMPLE_LOW = 0.5
SAMPLE_HIGH = 2.0
SAMPLE_POINTS = 20
SAMPLE_TOLERANCE = 1e-9
REDRAW_LIMIT = 100


def jet_flatten(e: Expression) -> tuple[Expression, dict[Atom, Sym]]:
    """Replace every distinct applied atom by a fresh symbol (bottom-up, so
    atoms nested in other atoms' arguments flatten first)."""
    registry: dict[Atom, Sym] = {}

    def walk(e: Expression) -> Expression:
        if isinstance(e, Num) or isinstance(e, Sym):
            return e
        if isinstance(e, Add):
            return add(*(walk(t) for t in e.terms))
        if isinstance(e, Mul):
            return mul(*(walk(f) for f in e.factors))
        if isinstance(e, Pow):
            return pow_(walk(e.base), e.exponent)
        if isinstance(e, Exp):
            return exp_(walk(e.arg))
        if isinstance(e, Log):
            return log_(walk(e.arg))
        if isinstance(e, Atom):
            flat = datom(e.name, e.deriv, *(walk(a) for a in e.args))
            marker = registry.get(flat)
            if marker is None:
                marker = sym(f"_jet{len(registry)}")
                registry[flat] = marker
            return marker
        raise TypeError(f"cannot flatten {type(e).__name__}")

    return walk(e), registry


def is_zero(e: Expression, seed: int = 42) -> bool:
    """True iff the expression normalizes to a literal zero or vanishes
    (|value| < 1e-9) at 20 seeded sample points with coordinates drawn
    uniformly from [0.5, 2.0].

    Distinct atom applications sample as independent coordinates, so a true
    verdict on atom-bearing expressions means "zero identically in the
    atoms".  Singular draws are redrawn up to 100 times; if every point
    stays singular the test raises :class:`IndeterminateZeroError`.
    """
    flat = normalize(e)
    if flat == 0:
        return True
    flat, _ = jet_flatten(flat)
    names = sorted(s.name for s in flat.free_symbols())
    rng = random.Random(seed)
    evaluated = 0
    for _point in range(SAMPLE_POINTS):
        for _attempt in range(REDRAW_LIMIT):
            values = {n: rng.uniform(SAMPLE_LOW, SAMPLE_HIGH) for n in names}
            try:
                value = evaluate(flat, Binding(values))
            except EvalDomainError:
                continue
            if not math.isfinite(value):
                continue
            evaluated += 1
            if abs(value) >= SAMPLE_TOLERANCE:
                return False
            break
    if evaluated == 0:
        raise IndeterminateZeroError(
            "all sample points were singular; zero test is indeterminate"
        )
    return True
