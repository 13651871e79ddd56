"""Closed forms and numerical machinery for the reduced equations.

Contains the exact solutions of the Riccati and Euler-type reductions, a
real Lambert W implementation (both real branches, Halley iteration), an
embedded Dormand-Prince 5(4) integrator with proportional-integral step
control and cubic-Hermite dense output, numeric wrappers for the Abel
equations, and an adaptive-Simpson quadrature used for the reciprocal
antiderivatives of the general reductions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from chengsym.errors import (
    ConvergenceError,
    EvalDomainError,
    IntegrationFailureError,
    QuadratureDomainError,
)
from chengsym.expr import Expression, mul, num, pow_, sym

# -- Lambert W -----------------------------------------------------------------

_INV_E = math.exp(-1.0)


def _halley(x: float, w: float) -> float:
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            return w
        w1 = w + 1.0
        denom = ew * w1 - (w + 2.0) * f / (2.0 * w1)
        step = f / denom
        w -= step
        if abs(step) <= 1e-16 * (1.0 + abs(w)):
            return w
    return w


def lambert_w(x: float, branch: int = 0) -> float:
    """Real Lambert W: the solution w of w*exp(w) = x.

    branch 0 needs x >= -1/e; branch -1 needs -1/e <= x < 0.  The result
    satisfies |w*exp(w) - x| <= 1e-12 * max(1, |x|).
    """
    x = float(x)
    if branch not in (0, -1):
        raise ValueError("branch must be 0 or -1")
    shift = x + _INV_E
    if shift < -1e-12 * max(1.0, abs(x)):
        raise EvalDomainError(f"lambert_w({x}) is outside the real domain")
    if branch == -1 and x >= 0.0:
        raise EvalDomainError("branch -1 requires -1/e <= x < 0")
    p2 = 2.0 * math.e * x + 2.0
    if p2 < 0.0:
        p2 = 0.0  # representable round-off just below the branch point
    if branch == 0:
        if p2 == 0.0:
            return -1.0
        if x < -0.25:
            # series around the branch point, p = sqrt(2*(e*x + 1))
            p = math.sqrt(p2)
            w = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
        elif x < 2.0:
            w = math.log1p(x) if x > -0.2 else x * math.exp(-x)
        else:
            l1 = math.log(x)
            l2 = math.log(l1)
            w = l1 - l2 + l2 / l1
    else:
        if p2 == 0.0:
            return -1.0
        if x < -0.25:
            p = math.sqrt(p2)
            w = -1.0 - p - p * p / 3.0 - 11.0 * p**3 / 72.0
        else:
            l1 = math.log(-x)
            w = l1 - math.log(-l1)
    w = _halley(x, w)
    if abs(w * math.exp(w) - x) > 1e-12 * max(1.0, abs(x)):
        raise ConvergenceError(f"lambert_w failed to converge at x={x}, branch={branch}")
    return w


# -- closed forms ----------------------------------------------------------------


def _as_expr_param(value) -> Expression:
    if isinstance(value, Expression):
        return value
    return num(Fraction(value))


def riccati_closed_form(a, b, c, C0):
    """Solution m(n) = c / ((n*a*b + c*C0) * n) of the travelling-wave
    Riccati reduction m' = -n*m^2*a*b/c - m/n.

    Returns (callable, expression-in-n).  The callable raises
    :class:`EvalDomainError` at roots of the denominator.
    """
    n = sym("n")
    ae, be, ce, C0e = map(_as_expr_param, (a, b, c, C0))
    expression = ce / ((n * ae * be + ce * C0e) * n)

    if any(isinstance(v, Expression) for v in (a, b, c, C0)):
        return None, expression
    af, bf, cf, C0f = (float(Fraction(v)) for v in (a, b, c, C0))

    def m(nv: float) -> float:
        denom = (nv * af * bf + cf * C0f) * nv
        if denom == 0.0:
            raise EvalDomainError(f"riccati closed form singular at n={nv}")
        return cf / denom

    return m, expression


def euler_linear_closed_form(a, b, c, C, which: str = "travelling"):
    """Integrating-factor solutions of the Euler-type linear reductions.

    ``travelling``: m' = n*a*b/c + m/n  ->  m(n) = (a*b/c) n^2 + C n.
    ``scaling``:    v' = -r*a*b + v/r   ->  v(r) = -a*b r^2 + C r.
    """
    n = sym("n" if which == "travelling" else "r")
    ae, be, ce, Ce = map(_as_expr_param, (a, b, c, C))
    if which == "travelling":
        expression = (ae * be / ce) * pow_(n, 2) + Ce * n
    elif which == "scaling":
        expression = mul(num(-1), ae, be) * pow_(n, 2) + Ce * n
    else:
        raise ValueError("which must be 'travelling' or 'scaling'")

    if any(isinstance(v, Expression) for v in (a, b, c, C)):
        return None, expression
    af, bf, cf, Cf = (float(Fraction(v)) for v in (a, b, c, C))
    sign = 1.0 if which == "travelling" else -1.0
    scale = af * bf / cf if which == "travelling" else af * bf

    def m(nv: float) -> float:
        return sign * scale * nv * nv + Cf * nv

    return m, expression


# -- adaptive Runge-Kutta ---------------------------------------------------------

# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_E = (
    35 / 384 - 5179 / 57600,
    0.0,
    500 / 1113 - 7571 / 16695,
    125 / 192 - 393 / 640,
    -2187 / 6784 + 92097 / 339200,
    11 / 84 - 187 / 2100,
    -1 / 40,
)


@dataclass
class ODEProblem:
    """Explicit first-order problem y' = rhs(x, y) on [x0, x_end]."""

    rhs: Callable[[float, Sequence[float]], Sequence[float]]
    x0: float
    y0: Sequence[float]
    x_end: float
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 1_000_000
    fixed_step: float | None = None
    stop_condition: Callable[[float, Sequence[float]], float] | None = None
    # x values the integrator must land on exactly (sorted along the
    # integration direction); keeps later interpolation error at the
    # integration tolerance instead of the dense-output error
    forced_points: Sequence[float] | None = None


@dataclass
class Trajectory:
    """Accepted integration nodes with dense cubic-Hermite evaluation."""

    xs: np.ndarray
    ys: np.ndarray
    derivs: np.ndarray
    error_estimates: np.ndarray
    status: str  # "completed" | "singular-stop" | "event-stop"

    @property
    def span(self) -> tuple[float, float]:
        lo, hi = float(self.xs[0]), float(self.xs[-1])
        return (lo, hi) if lo <= hi else (hi, lo)

    def covers(self, x: float) -> bool:
        lo, hi = self.span
        return lo - 1e-12 <= x <= hi + 1e-12

    def _bracket(self, x: float) -> int:
        xs = self.xs
        if xs[0] <= xs[-1]:
            idx = int(np.searchsorted(xs, x, side="right")) - 1
        else:
            idx = int(np.searchsorted(-xs, -x, side="right")) - 1
        return min(max(idx, 0), len(xs) - 2)

    def interpolate(self, x: float) -> np.ndarray:
        """Cubic Hermite interpolation between accepted nodes."""
        if not self.covers(x):
            raise EvalDomainError(f"x={x} outside trajectory span {self.span}")
        if len(self.xs) == 1:
            return self.ys[0].copy()
        i = self._bracket(x)
        x0, x1 = self.xs[i], self.xs[i + 1]
        h = x1 - x0
        if h == 0:
            return self.ys[i].copy()
        s = (x - x0) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return (
            h00 * self.ys[i]
            + h10 * h * self.derivs[i]
            + h01 * self.ys[i + 1]
            + h11 * h * self.derivs[i + 1]
        )

    def values(self, x: float) -> np.ndarray:
        return self.interpolate(x)

    def final(self) -> tuple[float, np.ndarray]:
        return float(self.xs[-1]), self.ys[-1]

    def to_csv(self, path) -> None:
        import os
        import tempfile

        directory = os.path.dirname(os.fspath(path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as handle:
                writer = csv.writer(handle)
                dim = self.ys.shape[1]
                writer.writerow(["x"] + [f"y{i}" for i in range(dim)] + ["err_estimate"])
                for k in range(len(self.xs)):
                    writer.writerow(
                        [repr(float(self.xs[k]))]
                        + [repr(float(v)) for v in self.ys[k]]
                        + [repr(float(self.error_estimates[k]))]
                    )
            os.replace(tmp, os.fspath(path))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _rhs_vector(problem: ODEProblem, x: float, y: np.ndarray) -> np.ndarray | None:
    try:
        out = np.asarray(problem.rhs(x, y), dtype=float)
    except (EvalDomainError, OverflowError, ZeroDivisionError, ValueError):
        return None
    if not np.all(np.isfinite(out)):
        return None
    return out


def integrate(problem: ODEProblem) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) with PI step control.

    Dense output is cubic Hermite between accepted steps.  Near a
    singularity the step size collapses and the trajectory is returned with
    status "singular-stop" (never extrapolated across the pole).  A
    ``stop_condition`` g(x, y) halts integration with "event-stop" before g
    changes sign.
    """
    x = float(problem.x0)
    y = np.asarray(problem.y0, dtype=float)
    x_end = float(problem.x_end)
    direction = 1.0 if x_end >= x else -1.0
    span = abs(x_end - x)
    if span == 0.0:
        f0 = _rhs_vector(problem, x, y)
        f0 = np.zeros_like(y) if f0 is None else f0
        return Trajectory(
            np.array([x]), np.array([y]), np.array([f0]), np.array([0.0]), "completed"
        )

    f = _rhs_vector(problem, x, y)
    if f is None:
        raise IntegrationFailureError(f"right-hand side singular at the initial point x={x}")
    g_prev = problem.stop_condition(x, y) if problem.stop_condition else None

    xs, ys, fs, errs = [x], [y.copy()], [f.copy()], [0.0]
    if problem.fixed_step is not None:
        h = abs(float(problem.fixed_step)) * direction
    else:
        scale = problem.atol + problem.rtol * np.abs(y)
        d0 = float(np.sqrt(np.mean((y / scale) ** 2)))
        d1 = float(np.sqrt(np.mean((f / scale) ** 2)))
        h = 0.01 * (d0 / d1) if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h = min(h, span) * direction

    safety, min_factor, max_factor = 0.9, 0.2, 5.0
    alpha, beta = 0.7 / 5.0, 0.4 / 5.0
    prev_err_norm = 1.0
    hmin = 1e-14 * max(span, 1.0)
    status = "completed"

    forced = []
    if problem.forced_points is not None:
        forced = sorted(
            (float(p) for p in problem.forced_points
             if (p - x) * direction > 1e-14 and (x_end - p) * direction > 1e-14),
            key=lambda p: p * direction,
        )
    next_forced = 0

    steps = 0
    while (x - x_end) * direction < 0:
        if steps >= problem.max_steps:
            raise IntegrationFailureError(
                "step budget exhausted",
                trajectory=Trajectory(np.array(xs), np.array(ys), np.array(fs),
                                      np.array(errs), "singular-stop"),
            )
        steps += 1
        h_unclipped = h
        while next_forced < len(forced) and (forced[next_forced] - x) * direction <= 1e-14:
            next_forced += 1
        if next_forced < len(forced) and (x + h - forced[next_forced]) * direction > 0:
            h = forced[next_forced] - x
        if (x + h - x_end) * direction > 0:
            h = x_end - x
        k = [f]
        failed = False
        for stage in range(1, 7):
            yi = y + h * sum(a * k[j] for j, a in enumerate(_DP_A[stage]))
            fi = _rhs_vector(problem, x + _DP_C[stage] * h, yi)
            if fi is None:
                failed = True
                break
            k.append(fi)
        if not failed:
            y_new = y + h * sum(b * k[j] for j, b in enumerate(_DP_B5))
            err_vec = h * sum(e * k[j] for j, e in enumerate(_DP_E))
            if not np.all(np.isfinite(y_new)):
                failed = True
        if failed:
            if problem.fixed_step is not None:
                status = "singular-stop"
                break
            h *= 0.5
            if abs(h) < hmin:
                status = "singular-stop"
                break
            continue

        if problem.fixed_step is not None:
            accept, err_norm = True, 0.0
        else:
            scale = problem.atol + problem.rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
            accept = err_norm <= 1.0

        if accept:
            f_new = _rhs_vector(problem, x + h, y_new)
            if f_new is None:
                if problem.fixed_step is not None:
                    status = "singular-stop"
                    break
                h *= 0.5
                if abs(h) < hmin:
                    status = "singular-stop"
                    break
                continue
            if problem.stop_condition is not None:
                g_new = problem.stop_condition(x + h, y_new)
                if g_prev is not None and (
                    g_new == 0.0 or (g_prev > 0) != (g_new > 0)
                ):
                    status = "event-stop"
                    break
                g_prev = g_new
            x = x + h
            y = y_new
            f = f_new
            xs.append(x)
            ys.append(y.copy())
            fs.append(f.copy())
            errs.append(err_norm * float(np.max(problem.atol + problem.rtol * np.abs(y))))
        if problem.fixed_step is None:
            if err_norm == 0.0:
                factor = max_factor
            else:
                factor = safety * err_norm ** (-alpha) * prev_err_norm**beta
                factor = min(max_factor, max(min_factor, factor))
            clipped = h != h_unclipped
            if accept:
                prev_err_norm = max(err_norm, 1e-4)
                # resume the cruising step after landing on a forced point
                h = h_unclipped if clipped else h * factor
            else:
                h *= factor
            if abs(h) < hmin:
                status = "singular-stop"
                break

    return Trajectory(np.array(xs), np.array(ys), np.array(fs), np.array(errs), status)


def integrate_expression(
    rhs_exprs: Sequence[Expression],
    x_name: str,
    y_names: Sequence[str],
    x0: float,
    y0: Sequence[float],
    x_end: float,
    params: dict | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    stop_condition=None,
    fixed_step: float | None = None,
    forced_points: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate symbolic right-hand sides (parameters substituted first)."""
    from chengsym.expr import Binding, compile_numeric, substitute

    params = {k: num(Fraction(v)) for k, v in (params or {}).items()}
    names = [x_name, *y_names]
    compiled = [
        compile_numeric(substitute(e, Binding(params)), names) for e in rhs_exprs
    ]

    def rhs(x, y):
        args = [x, *y]
        return [fn(args) for fn in compiled]

    return integrate(
        ODEProblem(
            rhs=rhs, x0=x0, y0=list(y0), x_end=x_end, rtol=rtol, atol=atol,
            stop_condition=stop_condition, fixed_step=fixed_step,
            forced_points=forced_points,
        )
    )


class TrajectoryFunction:
    """Adapts one trajectory component to the numeric-atom protocol used by
    expression evaluation (vectorised, with first derivatives from the
    stored right-hand side)."""

    def __init__(self, trajectory: Trajectory, component: int = 0):
        self.trajectory = trajectory
        self.component = component

    def _eval(self, x, order: int):
        x_arr = np.asarray(x, dtype=float)
        flat = np.ravel(x_arr)
        out = np.empty(flat.shape, dtype=float)
        for i, xi in enumerate(flat):
            if not self.trajectory.covers(float(xi)):
                out[i] = math.nan
                continue
            if order == 0:
                out[i] = self.trajectory.interpolate(float(xi))[self.component]
            else:
                idx = self.trajectory._bracket(float(xi))
                x0, x1 = self.trajectory.xs[idx], self.trajectory.xs[idx + 1]
                h = x1 - x0
                s = (float(xi) - x0) / h if h else 0.0
                d00 = (6 * s * s - 6 * s) / h
                d10 = 3 * s * s - 4 * s + 1
                d01 = (6 * s - 6 * s * s) / h
                d11 = 3 * s * s - 2 * s
                out[i] = (
                    d00 * self.trajectory.ys[idx][self.component]
                    + d10 * self.trajectory.derivs[idx][self.component]
                    + d01 * self.trajectory.ys[idx + 1][self.component]
                    + d11 * self.trajectory.derivs[idx + 1][self.component]
                )
        result = out.reshape(x_arr.shape)
        return result if result.shape else float(result)

    def __call__(self, x):
        return self._eval(x, 0)

    def derivative(self, deriv):
        order = sum(deriv)
        if order != 1:
            raise EvalDomainError("trajectory functions provide first derivatives only")
        return lambda x: self._eval(x, 1)


# -- Abel wrappers ------------------------------------------------------------------


def abel_solve_numeric(
    kind: str,
    rhs_exprs: Sequence[Expression],
    x_name: str,
    y_names: Sequence[str],
    params: dict,
    ic: Sequence[float],
    span: tuple[float, float],
    denominator: Expression | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> Trajectory:
    """Integrate an Abel reduction numerically.

    ``kind`` is "first" or "second"; second-kind equations must pass the
    denominator expression, which is monitored so integration stops with
    "event-stop" before a sign change.
    """
    if kind not in ("first", "second"):
        raise ValueError("kind must be 'first' or 'second'")
    stop = None
    if kind == "second":
        if denominator is None:
            raise ValueError("second-kind equations require the denominator expression")
        from chengsym.expr import Binding, compile_numeric, substitute

        subs = {k: num(Fraction(v)) for k, v in params.items()}
        monitor = compile_numeric(substitute(denominator, Binding(subs)), [x_name, *y_names])

        def stop(x, y):  # noqa: F811 - intentional closure
            return monitor([x, *y])

        if abs(stop(span[0], list(ic))) < atol:
            raise EvalDomainError("initial condition sits on the singular denominator")
    return integrate_expression(
        rhs_exprs, x_name, y_names, span[0], ic, span[1],
        params=params, rtol=rtol, atol=atol, stop_condition=stop,
    )


# -- adaptive quadrature ---------------------------------------------------------


def _simpson(fn, a, fa, b, fb, fm, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = fn(lm), fn(rm)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0:
        raise QuadratureDomainError("adaptive quadrature failed to converge")
    if abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _simpson(fn, a, fa, m, fm, flm, tol / 2.0, depth - 1) + _simpson(
        fn, m, fm, b, fb, frm, tol / 2.0, depth - 1
    )


def quadrature(fn: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Adaptive Simpson integral of fn over [a, b] to absolute tolerance."""
    if a == b:
        return 0.0
    try:
        fa, fb, fm = fn(a), fn(b), fn(0.5 * (a + b))
    except (ZeroDivisionError, OverflowError, ValueError) as err:
        raise QuadratureDomainError(f"integrand singular on [{a}, {b}]: {err}") from err
    if not all(math.isfinite(v) for v in (fa, fb, fm)):
        raise QuadratureDomainError(f"integrand non-finite on [{a}, {b}]")
    return _simpson(fn, a, fa, b, fb, fm, tol, 48)


class ReciprocalAntiderivative:
    """Numeric antiderivative of 1/h from a base point, with caching.

    Used for the quadrature-defined similarity variables; implements the
    numeric-atom protocol (value plus first derivative 1/h).
    """

    def __init__(self, h: Callable[[float], float], base: float = 1.0, tol: float = 1e-10):
        self.h = h
        self.base = float(base)
        self.tol = tol
        self._cache: dict[float, float] = {self.base: 0.0}

    def _integrand(self, x: float) -> float:
        hx = self.h(x)
        if hx == 0.0 or not math.isfinite(hx):
            raise QuadratureDomainError(f"reciprocal integrand singular at {x}")
        return 1.0 / hx

    def value(self, x: float) -> float:
        x = float(x)
        hit = self._cache.get(x)
        if hit is None:
            hit = quadrature(self._integrand, self.base, x, self.tol)
            self._cache[x] = hit
        return hit

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.array([self.value(v) for v in np.ravel(arr)])
        result = out.reshape(arr.shape)
        return result if result.shape else float(result)

    def derivative(self, deriv):
        order = sum(deriv)
        if order != 1:
            raise EvalDomainError("antiderivative atoms expose first derivatives only")

        def d(x):
            arr = np.asarray(x, dtype=float)
            out = np.array([self._integrand(v) for v in np.ravel(arr)])
            result = out.reshape(arr.shape)
            return result if result.shape else float(result)

        return d
