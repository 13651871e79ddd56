"""Infinitesimal generators, prolongation and the Lie symmetry condition.

A :class:`PDESystem` keeps each equation as a residual expression over jet
atoms (dependent variables applied to the independent ones, with derivative
multi-indices).  A :class:`VectorField` stores one coefficient per
coordinate, written in the base coordinates (independents plus bare
dependent symbols).  ``prolong`` extends a field to derivative coordinates
with the total-derivative recursion, ``symmetry_residual`` applies the
prolonged field to each residual and restricts to the solution manifold,
and ``check_symmetry`` settles the result symbolically or by seeded
sampling, instantiating abstract coefficient functions over the basis
{1, s, s^2, exp(s)} when needed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

from chengsym.errors import (
    ChengError,
    IntegrationFailureError,
    ManifoldRestrictionError,
    UnsupportedOrderError,
)
from chengsym.expr import (
    Atom,
    Binding,
    Expression,
    FunctionRule,
    Num,
    Sym,
    add,
    atom,
    compile_numeric,
    datom,
    differentiate,
    exp_,
    fnrule,
    is_zero,
    log_,
    mul,
    normalize,
    num,
    pow_,
    substitute,
    sym,
)

# -- jet-space plumbing --------------------------------------------------------


@dataclass(frozen=True)
class DependentVar:
    """Dependent variable with its declared argument list."""

    name: str
    args: tuple[Sym, ...]

    def jet(self, deriv: tuple[int, ...]) -> Atom:
        return datom(self.name, deriv, *self.args)

    @property
    def base(self) -> Atom:
        return self.jet((0,) * len(self.args))


def multi_indices(dim: int, max_order: int) -> list[tuple[int, ...]]:
    """All derivative multi-indices with 1 <= total order <= max_order,
    ordered by total order then lexicographically."""
    out = []
    for total in range(1, max_order + 1):
        for combo in itertools.product(range(total + 1), repeat=dim):
            if sum(combo) == total:
                out.append(combo)
    return out


@dataclass(frozen=True)
class PDESystem:
    """Differential equations as residual expressions (residual == 0)."""

    residuals: tuple[Expression, ...]
    independent: tuple[Sym, ...]
    dependent: tuple[DependentVar, ...]
    order: int
    name: str = ""
    solve_hints: tuple[tuple[str, tuple[int, ...]], ...] = ()

    def __post_init__(self):
        declared = {d.name: d for d in self.dependent}
        for residual in self.residuals:
            for app in residual.function_atoms():
                dep = declared.get(app.name)
                if dep is None:
                    continue  # parameter atom such as g(x)
                if app.args != dep.args:
                    raise ValueError(
                        f"atom {app.name} applied to {app.args}, declared {dep.args}"
                    )
                if app.order > self.order:
                    raise ValueError(
                        f"derivative of order {app.order} exceeds declared order {self.order}"
                    )

    def dependent_named(self, name: str) -> DependentVar:
        for d in self.dependent:
            if d.name == name:
                return d
        raise KeyError(name)


@dataclass(frozen=True)
class VectorField:
    """Point-field coefficients, one per coordinate symbol."""

    independent: tuple[Sym, ...]
    dependent: tuple[Sym, ...]
    coefficients: tuple[tuple[Sym, Expression], ...]
    label: str = ""

    def __post_init__(self):
        coords = [c for c, _ in self.coefficients]
        if len(set(coords)) != len(coords):
            raise ValueError("every coordinate appears exactly once")
        expected = set(self.independent) | set(self.dependent)
        if set(coords) != expected:
            raise ValueError("coefficients must cover exactly the declared coordinates")

    def coefficient(self, coord: Sym | str) -> Expression:
        name = coord if isinstance(coord, str) else coord.name
        for c, e in self.coefficients:
            if c.name == name:
                return e
        raise KeyError(name)

    def coords(self) -> tuple[Sym, ...]:
        return tuple(c for c, _ in self.coefficients)

    def text(self) -> str:
        from chengsym.expr import to_text

        parts = []
        for coord, coeff in self.coefficients:
            if coeff == 0:
                continue
            parts.append(f"({to_text(coeff)}) d/d{coord.name}")
        return " + ".join(parts) if parts else "0"


def vector_field(system: PDESystem, label: str = "", **coeffs) -> VectorField:
    """Field over a system's coordinates; unmentioned coordinates get 0."""
    from chengsym.expr.nodes import _coerce

    dep_syms = tuple(sym(d.name) for d in system.dependent)
    table = []
    known = {s.name for s in system.independent} | {s.name for s in dep_syms}
    for name in coeffs:
        if name not in known:
            raise KeyError(f"unknown coordinate {name!r}")
    for s in (*system.independent, *dep_syms):
        table.append((s, _coerce(coeffs.get(s.name, 0))))
    return VectorField(system.independent, dep_syms, tuple(table), label)


@dataclass(frozen=True)
class ProlongedField:
    base: VectorField
    order: int
    # (dependent name, multi-index) -> extended coefficient, in jet atoms
    extended: tuple[tuple[tuple[str, tuple[int, ...]], Expression], ...]

    def coefficient(self, name: str, deriv: tuple[int, ...]) -> Expression:
        for key, value in self.extended:
            if key == (name, tuple(deriv)):
                return value
        raise KeyError((name, deriv))


def _to_jet_expression(e: Expression, system: PDESystem) -> Expression:
    """Rewrite bare dependent symbols as their applied atoms."""
    rules = {d.name: d.base for d in system.dependent}
    return substitute(e, Binding(rules))


def _flatten_dependent(e: Expression, system: PDESystem):
    """Replace dependent-variable jet atoms by fresh symbols; parameter atoms
    stay applied so explicit derivatives still chain through them."""
    dep_names = {d.name for d in system.dependent}
    registry: dict[Atom, Sym] = {}

    from chengsym.expr.nodes import Add, Exp, Log, Mul, Pow

    def walk(node: Expression) -> Expression:
        if isinstance(node, (Num, Sym)):
            return node
        if isinstance(node, Add):
            return add(*(walk(t) for t in node.terms))
        if isinstance(node, Mul):
            return mul(*(walk(f) for f in node.factors))
        if isinstance(node, Pow):
            return pow_(walk(node.base), node.exponent)
        if isinstance(node, Exp):
            return exp_(walk(node.arg))
        if isinstance(node, Log):
            return log_(walk(node.arg))
        if isinstance(node, Atom):
            rebuilt = datom(node.name, node.deriv, *(walk(a) for a in node.args))
            if node.name not in dep_names:
                return rebuilt
            marker = registry.get(rebuilt)
            if marker is None:
                marker = sym(f"_jet{len(registry)}")
                registry[rebuilt] = marker
            return marker
        raise TypeError(type(node).__name__)

    return walk(e), registry


def jet_replace(e: Expression, mapping: Mapping[Atom, Expression]) -> Expression:
    """Structural replacement of exact jet-atom applications."""
    from chengsym.expr.nodes import Add, Exp, Log, Mul, Pow

    def walk(node: Expression) -> Expression:
        if isinstance(node, (Num, Sym)):
            return node
        if isinstance(node, Add):
            return add(*(walk(t) for t in node.terms))
        if isinstance(node, Mul):
            return mul(*(walk(f) for f in node.factors))
        if isinstance(node, Pow):
            return pow_(walk(node.base), node.exponent)
        if isinstance(node, Exp):
            return exp_(walk(node.arg))
        if isinstance(node, Log):
            return log_(walk(node.arg))
        if isinstance(node, Atom):
            rebuilt = datom(node.name, node.deriv, *(walk(a) for a in node.args))
            return mapping.get(rebuilt, rebuilt)
        raise TypeError(type(node).__name__)

    return walk(e)


def prolong(vf: VectorField, order: int, system: PDESystem) -> ProlongedField:
    """Extend a point field to jet coordinates up to the given order.

    Uses the recursion  eta_{J+e_i} = D_i(eta_J) - sum_j u_{J+e_j} D_i(xi_j),
    where D_i is the total derivative (automatic here because dependents are
    applied atoms).
    """
    if order not in (1, 2):
        raise UnsupportedOrderError(f"prolongation order {order} unsupported (use 1 or 2)")
    vf_names = {c.name for c in vf.coords()}
    sys_names = {s.name for s in system.independent} | {d.name for d in system.dependent}
    if vf_names != sys_names:
        raise ValueError(f"field coordinates {vf_names} do not match system {sys_names}")

    xi = {s: _to_jet_expression(vf.coefficient(s), system) for s in system.independent}
    table: dict[tuple[str, tuple[int, ...]], Expression] = {}
    for dep in system.dependent:
        zero = (0,) * len(system.independent)
        table[(dep.name, zero)] = _to_jet_expression(vf.coefficient(dep.name), system)
    dim = len(system.independent)
    for target in multi_indices(dim, order):
        i = next(idx for idx, c in enumerate(target) if c > 0)
        source = tuple(c - 1 if idx == i else c for idx, c in enumerate(target))
        y_i = system.independent[i]
        for dep in system.dependent:
            eta_j = table[(dep.name, source)]
            correction = []
            for j, y_j in enumerate(system.independent):
                dxi = differentiate(xi[y_j], y_i)
                if dxi == 0:
                    continue
                bumped = tuple(c + 1 if idx == j else c for idx, c in enumerate(source))
                correction.append(mul(dep.jet(bumped), dxi))
            table[(dep.name, target)] = normalize(
                differentiate(eta_j, y_i) - add(*correction) if correction
                else differentiate(eta_j, y_i)
            )
    return ProlongedField(vf, order, tuple(table.items()))


def solved_derivative_rules(system: PDESystem) -> dict[Atom, Expression]:
    """Solve each equation for a leading derivative and close the rules under
    mutual substitution (the "on solutions" restriction)."""
    rules: dict[Atom, Expression] = {}
    taken: set[Atom] = set()
    hints = list(system.solve_hints)
    for idx, residual in enumerate(system.residuals):
        flat, registry = _flatten_dependent(residual, system)
        inverse = {marker: app for app, marker in registry.items()}
        candidates: list[Atom]
        if hints:
            name, deriv = hints[idx]
            candidates = [system.dependent_named(name).jet(deriv)]
        else:
            apps = sorted(
                (app for app in registry if any(app.deriv)),
                key=lambda a: (-a.order, a.sort_key()),
            )
            candidates = [a for a in apps if a not in taken]
        solved = False
        for app in candidates:
            marker = registry.get(app)
            if marker is None:
                continue
            coeff = differentiate(flat, marker)
            if marker in coeff.free_symbols():
                continue  # not linear in this derivative
            rest = substitute(flat, {marker.name: num(0)})
            if is_zero(coeff, seed=7):
                continue
            unflat = {m.name: a for m, a in inverse.items()}
            solution = normalize(substitute(mul(num(-1), rest, pow_(coeff, -1)), unflat))
            rules[app] = solution
            taken.add(app)
            solved = True
            break
        if not solved:
            raise ManifoldRestrictionError(
                f"equation {idx} not solvable for a leading derivative",
                unsolved=[a for a in candidates],
            )
    for _ in range(8):
        updated = {app: normalize(jet_replace(expr, rules)) for app, expr in rules.items()}
        if updated == rules:
            break
        rules = updated
    else:
        raise ManifoldRestrictionError("solved-derivative rules did not close")
    return rules


def lie_derivative(prolonged: ProlongedField, residual: Expression, system: PDESystem) -> Expression:
    """Apply the prolonged field to a residual (no manifold restriction)."""
    flat, registry = _flatten_dependent(residual, system)
    unflat = {marker.name: app for app, marker in registry.items()}
    pieces = []
    for s in system.independent:
        coeff = prolonged.base.coefficient(s)
        partial = differentiate(flat, s)
        if coeff == 0 or partial == 0:
            continue
        pieces.append(mul(_to_jet_expression(coeff, system), substitute(partial, unflat)))
    for app, marker in registry.items():
        partial = differentiate(flat, marker)
        if partial == 0:
            continue
        eta = prolonged.coefficient(app.name, app.deriv)
        if eta == 0:
            continue
        pieces.append(mul(eta, substitute(partial, unflat)))
    return add(*pieces)


def symmetry_residual(system: PDESystem, vf: VectorField) -> list[Expression]:
    """Lie derivative of each equation, restricted to the solution manifold
    by substituting the solved leading derivatives."""
    prolonged = prolong(vf, system.order, system)
    rules = solved_derivative_rules(system)
    out = []
    for residual in system.residuals:
        action = lie_derivative(prolonged, residual, system)
        out.append(normalize(jet_replace(action, rules)))
    return out


_BASIS_LABELS = ("1", "s", "s^2", "exp(s)")


def _basis_rules(arg_count: int) -> list[FunctionRule]:
    if arg_count != 1:
        raise ChengError("abstract-atom basis instantiation supports unary atoms only")
    p = sym("_p")
    return [fnrule((p,), body) for body in (num(1), p, pow_(p, 2), exp_(p))]


@dataclass(frozen=True)
class EquationCheck:
    ok: bool
    method: str  # "normalize" | "sampled" | "basis"
    residual: Expression


@dataclass(frozen=True)
class SymmetryCheck:
    system: str
    field_label: str
    field_text: str
    per_equation: tuple[EquationCheck, ...]
    abstract_atoms: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(eq.ok for eq in self.per_equation)


def check_symmetry(system: PDESystem, vf: VectorField, seed: int = 42) -> SymmetryCheck:
    """Settle the symmetry condition per equation.

    Abstract coefficient functions (atoms that are not declared dependents)
    are accepted when the residual normalizes to zero identically in them;
    otherwise each is instantiated over {1, s, s^2, exp(s)} and every
    combination must vanish under the sampled zero test.
    """
    residuals = symmetry_residual(system, vf)
    dep_names = {d.name for d in system.dependent}
    abstract = sorted(
        {app.name for r in residuals for app in r.function_atoms()} - dep_names
    )
    checks = []
    for residual in residuals:
        if normalize(residual) == 0:
            checks.append(EquationCheck(True, "normalize", num(0)))
            continue
        present = sorted(
            {app.name for app in residual.function_atoms()} - dep_names
        )
        if not present:
            checks.append(EquationCheck(is_zero(residual, seed), "sampled", residual))
            continue
        arities = {}
        for app in residual.function_atoms():
            if app.name in present:
                arities[app.name] = len(app.args)
        ok = True
        for combo in itertools.product(*[
            _basis_rules(arities[name]) for name in present
        ]):
            instantiated = substitute(
                residual, Binding(atoms=dict(zip(present, combo)))
            )
            if not is_zero(instantiated, seed):
                ok = False
                break
        checks.append(EquationCheck(ok, "basis", residual))
    return SymmetryCheck(
        system.name, vf.label, vf.text(), tuple(checks), tuple(abstract)
    )


def commutator(vf1: VectorField, vf2: VectorField) -> VectorField:
    """Lie bracket of two point fields over the same coordinates."""
    if [c.name for c in vf1.coords()] != [c.name for c in vf2.coords()]:
        raise ValueError("fields must share coordinates")
    table = []
    for coord in vf1.coords():
        terms = []
        for z in vf1.coords():
            f1z = vf1.coefficient(z)
            f2z = vf2.coefficient(z)
            d2 = differentiate(vf2.coefficient(coord), z)
            d1 = differentiate(vf1.coefficient(coord), z)
            terms.append(mul(f1z, d2) - mul(f2z, d1))
        table.append((coord, normalize(add(*terms))))
    return VectorField(
        vf1.independent,
        vf1.dependent,
        tuple(table),
        label=f"[{vf1.label or 'A'}, {vf2.label or 'B'}]",
    )


def is_zero_field(vf: VectorField, seed: int = 42) -> bool:
    return all(is_zero(coeff, seed) for _, coeff in vf.coefficients)


# -- one-parameter group flow ----------------------------------------------------


def flow_closed_form_plan(vf: VectorField):
    """Per-coordinate closed form when every coefficient is 0, a constant
    (translation) or a constant multiple of its own coordinate (scaling)."""
    plan = []
    for coord, coeff in vf.coefficients:
        coeff = normalize(coeff)
        if coeff == 0:
            plan.append((coord.name, "fixed", 0.0))
            continue
        if isinstance(coeff, Num):
            plan.append((coord.name, "translate", float(coeff.value)))
            continue
        ratio = normalize(mul(coeff, pow_(coord, -1)))
        if isinstance(ratio, Num):
            plan.append((coord.name, "scale", float(ratio.value)))
            continue
        return None
    return plan


def group_flow(
    vf: VectorField, epsilon: float, point: Mapping[str, float], rtol: float = 1e-12
) -> dict[str, float]:
    """Flow a point along the field for parameter distance epsilon.

    Translations and scalings (per decoupled coordinate) use the exact
    exponential; anything else integrates the flow system numerically.
    """
    values = {k: float(v) for k, v in point.items()}
    missing = [c.name for c in vf.coords() if c.name not in values]
    if missing:
        raise KeyError(f"point is missing coordinates {missing}")
    if epsilon == 0:
        return dict(values)
    plan = flow_closed_form_plan(vf)
    if plan is not None:
        out = dict(values)
        for name, kind, rate in plan:
            if kind == "translate":
                out[name] = values[name] + epsilon * rate
            elif kind == "scale":
                out[name] = values[name] * math.exp(rate * epsilon)
        return out

    from chengsym import odesolve

    names = [c.name for c in vf.coords()]
    compiled = []
    for coord, coeff in vf.coefficients:
        if coeff.function_atoms():
            raise ChengError(
                f"cannot flow numerically: coefficient for {coord.name} contains abstract atoms"
            )
        compiled.append(compile_numeric(coeff, names))

    def rhs(_eps, y):
        return [fn(y) for fn in compiled]

    problem = odesolve.ODEProblem(
        rhs=rhs,
        x0=0.0,
        y0=[values[n] for n in names],
        x_end=float(epsilon),
        rtol=rtol,
        atol=1e-14,
    )
    trajectory = odesolve.integrate(problem)
    if trajectory.status != "completed":
        raise IntegrationFailureError(
            f"flow stopped early with status {trajectory.status!r}",
            trajectory=trajectory,
        )
    final = trajectory.ys[-1]
    out = dict(values)
    for name, value in zip(names, final):
        out[name] = float(value)
    return out


# -- the equation / field catalogue ------------------------------------------------

T, X, F = sym("t"), sym("x"), sym("f")
A, B, C = sym("a"), sym("b"), sym("c")


def cheng_system(a: Expression | None = None, b: Expression | None = None) -> PDESystem:
    """The light-absorption system: u_x = -a*u*v, v_t = b*u_x."""
    a = A if a is None else a
    b = B if b is None else b
    u = DependentVar("u", (T, X))
    v = DependentVar("v", (T, X))
    u_x = u.jet((0, 1))
    v_t = v.jet((1, 0))
    residuals = (u_x + a * u.base * v.base, b * u_x - v_t)
    return PDESystem(
        residuals=residuals,
        independent=(T, X),
        dependent=(u, v),
        order=1,
        name="cheng",
        solve_hints=(("u", (0, 1)), ("v", (1, 0))),
    )


def spacedep_system(c_of_x: Expression | None = None) -> PDESystem:
    """Single-equation form with space-dependent coefficient:
    u_xt/u - u_x*u_t/u^2 + c(x)*u_x = 0."""
    c_expr = atom("c", X) if c_of_x is None else c_of_x
    u = DependentVar("u", (T, X))
    u_t, u_x, u_xt = u.jet((1, 0)), u.jet((0, 1)), u.jet((1, 1))
    residual = u_xt / u.base - u_x * u_t / pow_(u.base, 2) + c_expr * u_x
    return PDESystem(
        residuals=(residual,),
        independent=(T, X),
        dependent=(u,),
        order=2,
        name="cheng-spacedep",
        solve_hints=(("u", (1, 1)),),
    )


def travelling_ode(a=None, b=None, c=None) -> PDESystem:
    """Second-order travelling-wave equation:
    -c*w'^2/(a*w^2) + c*w''/(a*w) - b*w' = 0."""
    a = A if a is None else a
    b = B if b is None else b
    c = C if c is None else c
    w = DependentVar("w", (F,))
    w0, w1, w2 = w.base, w.jet((1,)), w.jet((2,))
    residual = -c * pow_(w1, 2) / (a * pow_(w0, 2)) + c * w2 / (a * w0) - b * w1
    return PDESystem((residual,), (F,), (w,), 2, name="tw-ode", solve_hints=(("w", (2,)),))


def scaling_ode_a(a=None, b=None) -> PDESystem:
    """Second-order reduction from the first scaling ansatz:
    w'/(a*w) + f*w''/(a*w) - f*w'^2/(a*w^2) + b*w' = 0."""
    a = A if a is None else a
    b = B if b is None else b
    w = DependentVar("w", (F,))
    w0, w1, w2 = w.base, w.jet((1,)), w.jet((2,))
    residual = w1 / (a * w0) + F * w2 / (a * w0) - F * pow_(w1, 2) / (a * pow_(w0, 2)) + b * w1
    return PDESystem((residual,), (F,), (w,), 2, name="iia-ode", solve_hints=(("w", (2,)),))


def scaling_ode_b(a=None, b=None) -> PDESystem:
    """Second-order reduction from the second scaling ansatz:
    f*w*w'' + a*b*w^3 + w*w' + a*b*f*w^2*w' - f*w'^2 = 0."""
    a = A if a is None else a
    b = B if b is None else b
    w = DependentVar("w", (F,))
    w0, w1, w2 = w.base, w.jet((1,)), w.jet((2,))
    residual = (
        F * w0 * w2 + a * b * pow_(w0, 3) + w0 * w1
        + a * b * F * pow_(w0, 2) * w1 - F * pow_(w1, 2)
    )
    return PDESystem((residual,), (F,), (w,), 2, name="iib-ode", solve_hints=(("w", (2,)),))


def spacedep_ode(variant: str = "derived") -> PDESystem:
    """Reduced equation for the space-dependent case at the canonical
    instantiation.  ``derived``: w''/w = w'^2/w^2 + w'.  ``printed``:
    w''/w = w'/w^2 + w' (kept verbatim so reports can compare the two)."""
    w = DependentVar("w", (F,))
    w0, w1, w2 = w.base, w.jet((1,)), w.jet((2,))
    if variant == "derived":
        residual = w2 / w0 - pow_(w1, 2) / pow_(w0, 2) - w1
    elif variant == "printed":
        residual = w2 / w0 - w1 / pow_(w0, 2) - w1
    else:
        raise ValueError("variant must be 'derived' or 'printed'")
    return PDESystem(
        (residual,), (F,), (w,), 2,
        name=f"spacedep-ode-{variant}", solve_hints=(("w", (2,)),),
    )


def translation_x(system: PDESystem | None = None) -> VectorField:
    return vector_field(system or cheng_system(), label="translation-x", x=1)


def translation_t(system: PDESystem | None = None) -> VectorField:
    return vector_field(system or cheng_system(), label="translation-t", t=1)


def scaling_x(system: PDESystem | None = None) -> VectorField:
    v = sym("v")
    return vector_field(system or cheng_system(), label="scaling-x", x=X, v=-v)


def scaling_t(system: PDESystem | None = None) -> VectorField:
    u = sym("u")
    return vector_field(system or cheng_system(), label="scaling-t", t=T, u=-u)


def general_x_family(g: Expression | None = None, label: str = "general-x") -> VectorField:
    """g(x) d/dx - v*g'(x) d/dv with g abstract by default."""
    g0 = atom("g", X) if g is None else g
    gp = differentiate(g0, X) if g is not None else datom("g", (1,), X)
    v = sym("v")
    return vector_field(cheng_system(), label=label, x=g0, v=-v * gp)


def general_t_family(h: Expression | None = None, label: str = "general-t") -> VectorField:
    """h(t) d/dt - u*h'(t) d/du with h abstract by default."""
    h0 = atom("h", T) if h is None else h
    hp = differentiate(h0, T) if h is not None else datom("h", (1,), T)
    u = sym("u")
    return vector_field(cheng_system(), label=label, t=h0, u=-u * hp)


def ode_translation(system: PDESystem, label="f-translation") -> VectorField:
    return vector_field(system, label=label, f=1)


def ode_scaling(system: PDESystem, label="f-scaling") -> VectorField:
    w = sym("w")
    return vector_field(system, label=label, f=F, w=-w)


def ode_log_scaling(system: PDESystem, orientation: int = 1, label="f-log-scaling") -> VectorField:
    """+/- (f*log(f) d/df - w d/dw); both orientations generate the flow."""
    w = sym("w")
    return vector_field(
        system, label=label,
        f=orientation * F * log_(F), w=-orientation * w,
    )


def iib_log_scaling(system: PDESystem | None = None) -> VectorField:
    """f*log(f) d/df - (log(f)+1)*w d/dw on the second scaling reduction."""
    w = sym("w")
    return vector_field(
        system or scaling_ode_b(), label="iib-log-scaling",
        f=F * log_(F), w=-(log_(F) + 1) * w,
    )


def spacedep_x_family(c_of_x: Expression | None = None) -> VectorField:
    """c(x) d/dx - c'(x)*u d/du on the space-dependent equation.

    Applying the prolonged field leaves the term -c*c''*u on the solution
    manifold, so this printed family is a symmetry exactly when c is affine
    (which covers every concrete c the reductions use).  For general c see
    :func:`spacedep_x_family_corrected`.
    """
    system = spacedep_system(c_of_x)
    c0 = atom("c", X) if c_of_x is None else c_of_x
    cp = datom("c", (1,), X) if c_of_x is None else differentiate(c_of_x, X)
    u = sym("u")
    return vector_field(system, label="spacedep-x-family", x=c0, u=-cp * u)


def spacedep_x_family_affine() -> tuple[PDESystem, VectorField]:
    """The printed x-family instantiated on c(x) = alpha + beta*x, with the
    affine coefficients kept symbolic so the check covers the whole family."""
    alpha, beta = sym("alpha"), sym("beta")
    c_expr = alpha + beta * X
    system = spacedep_system(c_expr)
    u = sym("u")
    field = vector_field(
        system, label="spacedep-x-family-affine", x=c_expr, u=-beta * u
    )
    return system, field


def spacedep_x_family_corrected() -> tuple[PDESystem, VectorField]:
    """(c/c') d/dx - u d/du: the x-family that satisfies the condition for
    arbitrary non-constant c."""
    system = spacedep_system()
    c0 = atom("c", X)
    cp = datom("c", (1,), X)
    u = sym("u")
    field = vector_field(
        system, label="spacedep-x-family-corrected", x=c0 / cp, u=-u
    )
    return system, field


def spacedep_lambda_family() -> tuple[PDESystem, VectorField]:
    """lambda(x) d/dx with abstract lambda on the constant-coefficient
    equation (the form the elimination produces before c gains x-dependence)."""
    system = spacedep_system(sym("c"))
    field = vector_field(
        system, label="spacedep-lambda-const", x=atom("lam", X)
    )
    return system, field


def spacedep_t_family(tau: Expression | None = None, c_of_x: Expression | None = None) -> VectorField:
    """tau(t) d/dt - tau'(t)*u d/du on the space-dependent equation."""
    system = spacedep_system(c_of_x)
    t0 = atom("tau", T) if tau is None else tau
    tp = datom("tau", (1,), T) if tau is None else differentiate(tau, T)
    u = sym("u")
    return vector_field(system, label="spacedep-t-family", t=t0, u=-tp * u)


@dataclass(frozen=True)
class SuiteEntry:
    label: str
    system: PDESystem
    field: VectorField
    provenance: str = "as-printed"
    note: str = ""


def standard_symmetry_suite() -> list[SuiteEntry]:
    """Every generator shipped with the toolkit, paired with its equation.

    The translation-family generator of the first scaling reduction is
    shipped in derived-corrected form (f d/df): the bare f-translation that
    appears alongside it in the source is not a symmetry of that equation
    (see the discrepancy note on its entry and the reports).
    """
    cheng = cheng_system()
    tw = travelling_ode()
    iia = scaling_ode_a()
    iib = scaling_ode_b()
    sd_ode = spacedep_ode("derived")
    entries = [
        SuiteEntry("cheng/general-x", cheng, general_x_family()),
        SuiteEntry("cheng/general-t", cheng, general_t_family()),
        SuiteEntry("cheng/translation-x", cheng, translation_x(cheng)),
        SuiteEntry("cheng/translation-t", cheng, translation_t(cheng)),
        SuiteEntry("cheng/scaling-x", cheng, scaling_x(cheng)),
        SuiteEntry("cheng/scaling-t", cheng, scaling_t(cheng)),
        SuiteEntry("tw-ode/translation", tw, ode_translation(tw)),
        SuiteEntry("tw-ode/scaling", tw, ode_scaling(tw)),
        SuiteEntry(
            "iia-ode/translation", iia,
            vector_field(iia, label="f-translation-corrected", f=F),
            provenance="derived-corrected",
            note="shipped as f d/df; the plain f-translation printed alongside it fails the condition",
        ),
        SuiteEntry("iia-ode/log-scaling", iia, ode_log_scaling(iia, orientation=-1)),
        SuiteEntry("iib-ode/scaling", iib, ode_scaling(iib, label="iib-scaling")),
        SuiteEntry("iib-ode/log-scaling", iib, iib_log_scaling(iib)),
    ]
    sd_affine_sys, sd_affine_field = spacedep_x_family_affine()
    sd_gen_sys, sd_gen_field = spacedep_x_family_corrected()
    sd_lam_sys, sd_lam_field = spacedep_lambda_family()
    entries += [
        SuiteEntry(
            "spacedep/x-family-affine", sd_affine_sys, sd_affine_field,
            provenance="as-printed (affine c)",
            note="the printed family is a symmetry exactly when c''(x) = 0",
        ),
        SuiteEntry(
            "spacedep/x-family-general", sd_gen_sys, sd_gen_field,
            provenance="derived-corrected",
            note="(c/c') d/dx - u d/du holds for arbitrary non-constant c",
        ),
        SuiteEntry("spacedep/lambda-const", sd_lam_sys, sd_lam_field),
        SuiteEntry("spacedep/t-family", spacedep_system(), spacedep_t_family()),
        SuiteEntry("spacedep-ode/translation", sd_ode, ode_translation(sd_ode)),
        SuiteEntry("spacedep-ode/scaling", sd_ode, ode_scaling(sd_ode)),
    ]
    return entries
