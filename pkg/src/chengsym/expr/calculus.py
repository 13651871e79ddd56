"""Exact differentiation, simultaneous substitution and numeric evaluation."""

from __future__ import annotations

import math
from typing import Callable, Mapping

import numpy as np

from chengsym.errors import EvalDomainError
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
    mul,
    num,
    pow_,
    sym,
)


def differentiate(e: Expression, var: Sym | str) -> Expression:
    """Exact partial derivative with respect to a named symbol.

    Applied atoms chain through their arguments: ``d/dt w(x - c*t)`` gives
    ``-c * w'(x - c*t)``.  Because dependent variables are represented as
    atoms applied to the independent variables, this is simultaneously the
    total derivative on jet expressions.
    """
    if isinstance(var, str):
        var = sym(var)
    if isinstance(e, Num):
        return num(0)
    if isinstance(e, Sym):
        return num(1) if e == var else num(0)
    if isinstance(e, Add):
        return add(*(differentiate(t, var) for t in e.terms))
    if isinstance(e, Mul):
        terms = []
        for i, f in enumerate(e.factors):
            df = differentiate(f, var)
            if df == 0:
                continue
            rest = e.factors[:i] + e.factors[i + 1 :]
            terms.append(mul(df, *rest))
        return add(*terms)
    if isinstance(e, Pow):
        db = differentiate(e.base, var)
        if db == 0:
            return num(0)
        return mul(num(e.exponent), pow_(e.base, e.exponent - 1), db)
    if isinstance(e, Exp):
        da = differentiate(e.arg, var)
        return num(0) if da == 0 else mul(e, da)
    if isinstance(e, Log):
        da = differentiate(e.arg, var)
        return num(0) if da == 0 else mul(da, pow_(e.arg, -1))
    if isinstance(e, Atom):
        terms = []
        for slot, arg in enumerate(e.args):
            darg = differentiate(arg, var)
            if darg == 0:
                continue
            bumped = tuple(
                d + 1 if i == slot else d for i, d in enumerate(e.deriv)
            )
            terms.append(mul(datom(e.name, bumped, *e.args), darg))
        return add(*terms)
    raise TypeError(f"cannot differentiate {type(e).__name__}")


class FunctionRule:
    """Replacement for a function atom: an expression in placeholder symbols,
    one per argument slot.  Derivatives of the atom are realised by
    differentiating the body."""

    def __init__(self, params, body: Expression):
        if isinstance(params, (str, Sym)):
            params = (params,)
        self.params = tuple(sym(p) if isinstance(p, str) else p for p in params)
        self.body = body
        self._deriv_cache: dict[tuple[int, ...], Expression] = {}

    def derivative_body(self, deriv: tuple[int, ...]) -> Expression:
        if len(deriv) != len(self.params):
            raise ValueError("derivative multi-index does not match rule arity")
        cached = self._deriv_cache.get(deriv)
        if cached is None:
            cached = self.body
            for p, count in zip(self.params, deriv):
                for _ in range(count):
                    cached = differentiate(cached, p)
            self._deriv_cache[deriv] = cached
        return cached


def fnrule(params, body) -> FunctionRule:
    from chengsym.expr.nodes import _coerce

    return FunctionRule(params, _coerce(body))


class Binding:
    """Substitution / evaluation environment.

    ``symbols`` maps symbol names to expressions (for :func:`substitute`) or
    to numbers (for :func:`evaluate`).  ``atoms`` maps function-atom names to
    :class:`FunctionRule` instances (always usable) or, for evaluation only,
    to numeric callables.  A plain callable covers the underived atom; an
    object with a ``derivative(multi_index)`` method (returning a callable)
    also covers derived occurrences.
    """

    def __init__(self, symbols: Mapping | None = None, atoms: Mapping | None = None):
        self.symbols: dict[str, object] = {}
        for key, value in (symbols or {}).items():
            name = key.name if isinstance(key, Sym) else key
            self.symbols[name] = value
        self.atoms: dict[str, object] = dict(atoms or {})

    def merged(self, other: "Binding") -> "Binding":
        merged = Binding(dict(self.symbols), dict(self.atoms))
        merged.symbols.update(other.symbols)
        merged.atoms.update(other.atoms)
        return merged


def binding(symbols=None, atoms=None, **more_symbols) -> Binding:
    combined = dict(symbols or {})
    combined.update(more_symbols)
    return Binding(combined, atoms)


def substitute(e: Expression, b: Binding | Mapping) -> Expression:
    """Simultaneous substitution.

    Replacements are not re-scanned, so swaps like ``{x: y, y: x}`` behave
    as expected.  Atom replacements supply a :class:`FunctionRule`; derived
    occurrences substitute the correspondingly differentiated body.
    """
    from chengsym.expr.nodes import _coerce

    if not isinstance(b, Binding):
        b = Binding(b)

    def walk(e: Expression) -> Expression:
        if isinstance(e, Num):
            return e
        if isinstance(e, Sym):
            if e.name in b.symbols:
                return _coerce(b.symbols[e.name])
            return e
        if isinstance(e, Add):
            return add(*(walk(t) for t in e.terms))
        if isinstance(e, Mul):
            return mul(*(walk(f) for f in e.factors))
        if isinstance(e, Pow):
            return pow_(walk(e.base), e.exponent)
        if isinstance(e, Exp):
            from chengsym.expr.nodes import exp_

            return exp_(walk(e.arg))
        if isinstance(e, Log):
            from chengsym.expr.nodes import log_

            return log_(walk(e.arg))
        if isinstance(e, Atom):
            new_args = tuple(walk(a) for a in e.args)
            rule = b.atoms.get(e.name)
            if rule is None:
                return datom(e.name, e.deriv, *new_args)
            if not isinstance(rule, FunctionRule):
                raise TypeError(
                    f"substitution for atom {e.name!r} must be a FunctionRule"
                )
            body = rule.derivative_body(e.deriv)
            inner = Binding({p.name: a for p, a in zip(rule.params, new_args)})
            return substitute(body, inner)
        raise TypeError(f"cannot substitute into {type(e).__name__}")

    return walk(e)


def _as_float(value, node) -> float:
    try:
        result = float(value)
    except (TypeError, ValueError) as err:
        raise EvalDomainError(f"non-numeric value for {node!r}", node) from err
    if not math.isfinite(result):
        raise EvalDomainError(f"non-finite value for {node!r}", node)
    return result


def evaluate(e: Expression, b: Binding | Mapping | None = None) -> float:
    """Recursive binary64 evaluation.

    Division by zero, logs of non-positive values, fractional powers of
    negatives and overflow raise :class:`EvalDomainError` carrying the
    offending subtree.
    """
    if not isinstance(b, Binding):
        b = Binding(b or {})

    def walk(e: Expression) -> float:
        if isinstance(e, Num):
            return float(e.value)
        if isinstance(e, Sym):
            try:
                value = b.symbols[e.name]
            except KeyError:
                raise EvalDomainError(f"unbound symbol {e.name!r}", e) from None
            if isinstance(value, Expression):
                return walk(value)
            return _as_float(value, e)
        if isinstance(e, Add):
            return math.fsum(walk(t) for t in e.terms)
        if isinstance(e, Mul):
            out = 1.0
            for f in e.factors:
                out *= walk(f)
                if not math.isfinite(out):
                    raise EvalDomainError("overflow in product", e)
            return out
        if isinstance(e, Pow):
            base = walk(e.base)
            expo = e.exponent
            if base == 0.0 and expo < 0:
                raise EvalDomainError("division by zero", e)
            if base < 0.0 and expo.denominator != 1:
                raise EvalDomainError("fractional power of a negative value", e)
            try:
                result = base ** float(expo)
            except (OverflowError, ZeroDivisionError) as err:
                raise EvalDomainError(str(err), e) from err
            if not math.isfinite(result):
                raise EvalDomainError("overflow in power", e)
            return result
        if isinstance(e, Exp):
            arg = walk(e.arg)
            try:
                return math.exp(arg)
            except OverflowError as err:
                raise EvalDomainError("overflow in exp", e) from err
        if isinstance(e, Log):
            arg = walk(e.arg)
            if arg <= 0.0:
                raise EvalDomainError("log of a non-positive value", e)
            return math.log(arg)
        if isinstance(e, Atom):
            rule = b.atoms.get(e.name)
            if rule is None:
                raise EvalDomainError(f"unbound function atom {e.name!r}", e)
            args = [walk(a) for a in e.args]
            if isinstance(rule, FunctionRule):
                body = rule.derivative_body(e.deriv)
                inner = Binding({p.name: v for p, v in zip(rule.params, args)})
                return evaluate(body, b.merged(inner))
            if any(e.deriv):
                deriv_of = getattr(rule, "derivative", None)
                if deriv_of is None:
                    raise EvalDomainError(
                        f"numeric rule for {e.name!r} has no derivative method", e
                    )
                return _as_float(deriv_of(e.deriv)(*args), e)
            return _as_float(rule(*args), e)
        raise TypeError(f"cannot evaluate {type(e).__name__}")

    return walk(e)


def evaluate_grid(e: Expression, arrays: Mapping, atoms: Mapping | None = None) -> np.ndarray:
    """Vectorised evaluation over numpy arrays.

    Singular points produce NaN/inf silently (callers mask them); atom rules
    must accept array arguments.
    """
    arrays = {k.name if isinstance(k, Sym) else k: np.asarray(v, dtype=float)
              for k, v in arrays.items()}
    atoms = atoms or {}
    shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()

    def walk(e: Expression):
        if isinstance(e, Num):
            return float(e.value)
        if isinstance(e, Sym):
            return arrays[e.name]
        if isinstance(e, Add):
            out = walk(e.terms[0])
            for t in e.terms[1:]:
                out = out + walk(t)
            return out
        if isinstance(e, Mul):
            out = walk(e.factors[0])
            for f in e.factors[1:]:
                out = out * walk(f)
            return out
        if isinstance(e, Pow):
            base = walk(e.base)
            expo = e.exponent
            if expo.denominator == 1 and expo < 0:
                with np.errstate(divide="ignore", invalid="ignore"):
                    return np.power(base, float(expo))
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.power(base, float(expo))
        if isinstance(e, Exp):
            with np.errstate(over="ignore"):
                return np.exp(walk(e.arg))
        if isinstance(e, Log):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.log(walk(e.arg))
        if isinstance(e, Atom):
            rule = atoms.get(e.name)
            if rule is None:
                raise EvalDomainError(f"unbound function atom {e.name!r}", e)
            if isinstance(rule, FunctionRule):
                raise EvalDomainError("FunctionRule not supported on grids; substitute first", e)
            args = [np.broadcast_to(np.asarray(walk(a), dtype=float), shape) for a in e.args]
            if any(e.deriv):
                fn = rule.derivative(e.deriv)
                return np.asarray(fn(*args), dtype=float)
            return np.asarray(rule(*args), dtype=float)
        raise TypeError(f"cannot grid-evaluate {type(e).__name__}")

    result = walk(e)
    return np.broadcast_to(np.asarray(result, dtype=float), shape).copy() if shape else np.asarray(result, dtype=float)


def compile_numeric(e: Expression, arg_names: list[str]) -> Callable:
    """Compile an expression to a fast float function of the named symbols.

    All other symbols must already have been substituted away.  Generated
    code uses ``math`` only; intended for integrator right-hand sides.
    """
    names = list(arg_names)
    positions = {n: f"_a[{i}]" for i, n in enumerate(names)}

    def emit(e: Expression) -> str:
        if isinstance(e, Num):
            return repr(float(e.value))
        if isinstance(e, Sym):
            try:
                return positions[e.name]
            except KeyError:
                raise EvalDomainError(f"unbound symbol {e.name!r} in compiled expression", e) from None
        if isinstance(e, Add):
            return "(" + "+".join(emit(t) for t in e.terms) + ")"
        if isinstance(e, Mul):
            return "(" + "*".join(emit(f) for f in e.factors) + ")"
        if isinstance(e, Pow):
            expo = e.exponent
            if expo.denominator == 1 and -4 <= expo.numerator <= 4:
                if expo.numerator > 0:
                    return "(" + "*".join([emit(e.base)] * expo.numerator) + ")"
                return "(1.0/(" + "*".join([emit(e.base)] * -expo.numerator) + "))"
            return f"(({emit(e.base)})**{float(expo)!r})"
        if isinstance(e, Exp):
            return f"_exp({emit(e.arg)})"
        if isinstance(e, Log):
            return f"_log({emit(e.arg)})"
        raise TypeError(f"cannot compile {type(e).__name__}; substitute atoms first")

    source = f"lambda _a: {emit(e)}"
    return eval(source, {"_exp": math.exp, "_log": math.log})  # noqa: S307 - generated from our own AST
