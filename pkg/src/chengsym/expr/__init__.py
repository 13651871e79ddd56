"""Minimal immutable symbolic kernel used by the whole toolkit."""

from chengsym.expr.calculus import (
    Binding,
    FunctionRule,
    binding,
    compile_numeric,
    differentiate,
    evaluate,
    evaluate_grid,
    fnrule,
    substitute,
)
from chengsym.expr.nodes import (
    Add,
    Atom,
    Exp,
    Expression,
    Log,
    Mul,
    Num,
    Pow,
    Q,
    Sym,
    add,
    atom,
    datom,
    exp_,
    log_,
    mul,
    num,
    pow_,
    sym,
    syms,
)
from chengsym.expr.normal import (
    as_fraction_pair,
    denominator_degree,
    is_zero,
    jet_flatten,
    normalize,
    poly_in,
)
from chengsym.expr.textio import ExprSyntaxError, parse, parse_vector_field_text, to_text

__all__ = [
    "Add",
    "Atom",
    "Binding",
    "Exp",
    "Expression",
    "ExprSyntaxError",
    "FunctionRule",
    "Log",
    "Mul",
    "Num",
    "Pow",
    "Q",
    "Sym",
    "add",
    "as_fraction_pair",
    "atom",
    "binding",
    "compile_numeric",
    "datom",
    "denominator_degree",
    "differentiate",
    "evaluate",
    "evaluate_grid",
    "exp_",
    "fnrule",
    "is_zero",
    "jet_flatten",
    "log_",
    "mul",
    "normalize",
    "num",
    "parse",
    "parse_vector_field_text",
    "poly_in",
    "pow_",
    "substitute",
    "sym",
    "syms",
    "to_text",
]
