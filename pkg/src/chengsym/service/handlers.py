"""Request handlers shared by the FastAPI routes and the CLI."""

from __future__ import annotations

import functools
import os
from fractions import Fraction
from pathlib import Path

import numpy as np

from chengsym import __version__, odesolve, reduction, solutions, symmetry
from chengsym.expr import (
    num,
    parse,
    parse_vector_field_text,
    sym,
    to_text,
)
from chengsym.service import schemas

OUTPUT_DIR_ENV = "CHENGSYM_OUTPUT_DIR"


def resolve_output_dir(explicit: str | os.PathLike | None = None) -> Path:
    if explicit is not None:
        path = Path(explicit)
    else:
        path = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


_SYSTEMS = {
    "cheng": symmetry.cheng_system,
    "tw-ode": symmetry.travelling_ode,
    "iia-ode": symmetry.scaling_ode_a,
    "iib-ode": symmetry.scaling_ode_b,
    "spacedep": symmetry.spacedep_system,
    "spacedep-ode": lambda: symmetry.spacedep_ode("derived"),
}

DISCREPANCY_WARNINGS = (
    "the translation-family generator of the first scaling reduction is "
    "shipped as f d/df (derived-corrected); the bare f-translation printed "
    "alongside it is not a symmetry of that equation",
    "the x-family c d/dx - c'(x) u d/du of the space-dependent equation is a "
    "symmetry only for affine c; the corrected general-c family is "
    "(c/c') d/dx - u d/du",
)


def _field_from_text(system: symmetry.PDESystem, text: str, label: str) -> symmetry.VectorField:
    pairs = parse_vector_field_text(text)
    coeffs = {}
    for coord, coeff in pairs:
        if coord in coeffs:
            coeffs[coord] = coeffs[coord] + coeff
        else:
            coeffs[coord] = coeff
    return symmetry.vector_field(system, label=label, **coeffs)


def _symmetry_result(entry_label, system, field, provenance, note, seed) -> schemas.SymmetryResult:
    check = symmetry.check_symmetry(system, field, seed)
    return schemas.SymmetryResult(
        label=entry_label,
        system=system.name,
        field=field.text(),
        provenance=provenance,
        ok=check.ok,
        equations=[
            schemas.EquationVerdict(ok=eq.ok, method=eq.method, residual=to_text(eq.residual))
            for eq in check.per_equation
        ],
        note=note,
    )


def run_verify_symmetries(req: schemas.VerifySymmetriesRequest) -> schemas.VerifySymmetriesReport:
    results: list[schemas.SymmetryResult] = []
    if req.field is not None:
        if req.system in ("all", None):
            raise ValueError("--field needs a concrete --system to attach to")
        factory = _SYSTEMS.get(req.system)
        if factory is None:
            raise KeyError(f"unknown system {req.system!r}")
        system = factory()
        field = _field_from_text(system, req.field, "user-field")
        results.append(_symmetry_result("user-field", system, field, "user", "", req.seed))
    else:
        for entry in symmetry.standard_symmetry_suite():
            if req.system not in ("all", entry.system.name, entry.label.split("/")[0]):
                continue
            results.append(
                _symmetry_result(
                    entry.label, entry.system, entry.field, entry.provenance,
                    entry.note, req.seed,
                )
            )
        if req.g is not None:
            g_expr = parse(req.g)
            system = symmetry.cheng_system()
            field = symmetry.general_x_family(g=g_expr, label=f"general-x[g={req.g}]")
            results.append(
                _symmetry_result(f"cheng/general-x[g={req.g}]", system, field,
                                 "instantiated", "", req.seed)
            )
        if req.h is not None:
            h_expr = parse(req.h)
            system = symmetry.cheng_system()
            field = symmetry.general_t_family(h=h_expr, label=f"general-t[h={req.h}]")
            results.append(
                _symmetry_result(f"cheng/general-t[h={req.h}]", system, field,
                                 "instantiated", "", req.seed)
            )
    if not results:
        raise KeyError(f"no suite entries match system {req.system!r}")
    return schemas.VerifySymmetriesReport(
        seed=req.seed,
        all_passed=all(r.ok for r in results),
        results=results,
        warnings=list(DISCREPANCY_WARNINGS) if req.field is None else [],
    )


def _reduced_model(ode: reduction.ReducedODE) -> schemas.ReducedEquationModel:
    return schemas.ReducedEquationModel(
        name=ode.name,
        tag=ode.tag,
        provenance=ode.provenance,
        independent=ode.independent,
        dependent=list(ode.dependent),
        residuals=ode.residual_text(),
        rhs=[to_text(r) for r in ode.rhs] if ode.rhs else [],
    )


def _verification_model(v: reduction.VerificationReport) -> schemas.VerificationModel:
    return schemas.VerificationModel(
        name=v.name,
        ok=v.ok,
        multipliers=list(v.multipliers),
        failures=[f"eq{idx}: {text}" for idx, text in v.failures],
    )


def _transform_model(tr: reduction.SimilarityTransform) -> schemas.TransformModel:
    from chengsym.expr import substitute

    def display(rule):
        named = substitute(rule.body, {p.name: coord for p, coord in
                                       zip(rule.params, (sym("t"), sym("x")))})
        return to_text(named)

    return schemas.TransformModel(
        name=tr.name,
        new_variable=to_text(tr.f_def),
        dependent_rules={name: display(rule) for name, rule in tr.dep_rules},
        notes=list(tr.notes),
    )


_PRINTED_TARGETS = {
    ("case1", 1, "canonical"): reduction.riccati_travelling,
    ("case1", 1, "invariants"): reduction.euler_travelling,
    ("case1", 2, "canonical"): reduction.abel1_travelling,
    ("case1", 2, "invariants"): lambda: reduction.abel2_travelling("derived"),
    ("case2b", 1, "canonical"): reduction.riccati_scaling_b,
    ("case2b", 1, "invariants"): reduction.euler_scaling_b,
    ("case2b", 2, "canonical"): reduction.abel1_scaling_b,
    ("case2b", 2, "invariants"): reduction.abel2_scaling_b,
}

_CASE_ODES = {
    "case1": symmetry.travelling_ode,
    "case2a": symmetry.scaling_ode_a,
    "case2b": symmetry.scaling_ode_b,
    "space-dep": lambda: symmetry.spacedep_ode("derived"),
}


def _chart_reductions(case: str, chart_kind: str | None, generator: int | None, seed: int):
    if chart_kind is None and generator is None:
        return []
    if case not in _CASE_ODES:
        raise ValueError(f"case {case!r} has no second-order equation to chart-reduce")
    generators = (generator,) if generator else (1, 2)
    kinds = (chart_kind,) if chart_kind else ("canonical", "invariants")
    ode = _CASE_ODES[case]()
    params = ("a", "b", "c") if case == "case1" else ("a", "b") if case != "space-dep" else ()
    out = []
    for gen in generators:
        charts = reduction.charts_for(case, gen)
        for kind in kinds:
            chart = charts[kind]
            derived = reduction.canonical_reduce(ode, chart, parameters=params, seed=seed)
            printed_factory = _PRINTED_TARGETS.get((case, gen, kind))
            matches = None
            printed_name = None
            if printed_factory is not None:
                printed = printed_factory()
                matches = reduction.reduced_equal(derived, printed, seed)
                printed_name = printed.name
            out.append(schemas.ChartReductionModel(
                chart=chart.name,
                kind=chart.kind,
                derived=_reduced_model(derived),
                matches_printed=matches,
                printed_name=printed_name,
            ))
    return out


def run_reduce(req: schemas.ReduceRequest) -> schemas.ReduceReport:
    seed = req.seed
    if req.case == "space-dep":
        c_expr = parse(req.c) if req.c else None
        result = reduction.reduce_space_dependent(c_expr, seed=seed)
        derived_model = _verification_model(result.verdict_derived)
        printed_model = _verification_model(result.verdict_printed)
        derived_model.name = "space-dep/canonical->derived-form"
        printed_model.name = "space-dep/canonical->printed-form"
        verifications = [
            schemas.VerificationModel(
                name="space-dep/elimination", ok=result.elimination_ok,
                multipliers=[result.elimination_multiplier], failures=[],
            ),
            derived_model,
            printed_model,
            *[_verification_model(v) for v in result.general_verdicts],
        ]
        charts = _chart_reductions("space-dep", req.chart, req.generator, seed)
        ok = result.elimination_ok and (result.verdict_derived.ok != result.verdict_printed.ok)
        return schemas.ReduceReport(
            case="space-dep",
            ok=ok,
            transform=_transform_model(result.transform),
            reduced=[_reduced_model(result.reduced_derived),
                     _reduced_model(result.reduced_printed)],
            verifications=verifications,
            chart_reductions=charts,
            selected_form=result.selected_form,
            warnings=list(result.warnings),
        )
    if req.case == "case1":
        c_value = None
        if req.c is not None:
            try:
                c_value = float(Fraction(req.c))
            except ValueError:
                c_value = parse(req.c)
        result = reduction.reduce_travelling_wave(c_value, seed=seed)
    elif req.case in ("case2a", "case2b"):
        result = reduction.reduce_scaling(req.case[-1], seed=seed)
    elif req.case in ("general-I", "general-II"):
        h_expr = parse(req.h) if req.h else None
        g_expr = parse(req.g) if req.g else None
        result = reduction.reduce_general(h_expr, g_expr, variant=req.case.split("-")[1], seed=seed)
    else:
        raise KeyError(f"unknown reduction case {req.case!r}; "
                       f"expected one of {reduction.REDUCTION_CASES}")
    charts = []
    if req.case in _CASE_ODES:
        charts = _chart_reductions(req.case, req.chart, req.generator, seed)
    elif req.chart or req.generator:
        raise ValueError(f"case {req.case!r} has no coordinate charts")
    return schemas.ReduceReport(
        case=result.case,
        ok=result.ok,
        transform=_transform_model(result.transform),
        reduced=[_reduced_model(r) for r in result.reduced],
        verifications=[_verification_model(v) for v in result.verifications],
        chart_reductions=charts,
        warnings=list(result.warnings),
    )


def _grid_from_model(grid: schemas.GridModel) -> solutions.GridSpec:
    return solutions.GridSpec(
        t_min=grid.t_min, t_max=grid.t_max,
        x_min=grid.x_min, x_max=grid.x_max,
        nt=grid.nt, nx=grid.nx,
    )


def _grid_to_model(grid: solutions.GridSpec) -> schemas.GridModel:
    return schemas.GridModel(**grid.as_dict())


def _residual_model(report: solutions.ResidualReport) -> schemas.ResidualReportModel:
    return schemas.ResidualReportModel(
        solution=report.solution,
        provenance=report.provenance,
        method=report.method,
        grid=_grid_to_model(report.grid),
        max_residual=report.max_residual,
        rms_residual=report.rms_residual,
        eq_max=list(report.eq_max),
        masked_count=report.masked_count,
        total_points=report.total_points,
        warnings=list(report.warnings),
    )


def _trajectory_model(traj: odesolve.Trajectory) -> schemas.TrajectoryModel:
    x_end, y_end = traj.final()
    return schemas.TrajectoryModel(
        status=traj.status,
        points=int(len(traj.xs)),
        x_start=float(traj.xs[0]),
        x_end=float(x_end),
        y_end=[float(v) for v in y_end],
    )


_ABEL_DENOMINATORS = {
    "case1.abel2": "m + n",
    "case2b.abel2": "m",
}


@functools.lru_cache(maxsize=1)
def _full_catalog() -> dict[str, reduction.ReducedODE]:
    catalog = reduction.reduced_ode_catalog()
    iia = symmetry.scaling_ode_a()
    for gen, kind, suffix in (
        (1, "canonical", "riccati"), (1, "invariants", "euler"),
        (2, "canonical", "abel1"), (2, "invariants", "abel2"),
    ):
        chart = reduction.charts_for("case2a", gen)[kind]
        ode = reduction.canonical_reduce(
            iia, chart, name=f"case2a.{suffix}", parameters=("a", "b"),
            provenance="derived",
        )
        catalog[ode.name] = ode
    sd = symmetry.spacedep_ode("derived")
    for gen, kind, suffix in ((1, "canonical", "riccati"), (2, "canonical", "abel1")):
        chart = reduction.charts_for("space-dep", gen)[kind]
        ode = reduction.canonical_reduce(
            sd, chart, name=f"space-dep.{suffix}", parameters=(), provenance="derived",
        )
        catalog[ode.name] = ode
    return catalog


def _solution_csv(path: Path, sol, grid: solutions.GridSpec) -> None:
    u, v = sol.evaluate_fields(grid)
    field = solutions.SampledField(
        name=sol.name, grid=grid, u=u, v=v,
        mask=np.isfinite(u) & np.isfinite(v),
        params=sol.params,
    )
    residuals = solutions.field_residual_arrays(field)
    field.to_csv(path, residuals=residuals)


def run_solve(req: schemas.SolveRequest, output_dir: str | os.PathLike | None = None) -> schemas.SolveReport:
    params = req.params
    files: list[str] = []
    warnings: list[str] = []
    out_dir = resolve_output_dir(output_dir) if req.output else None

    form = "printed" if req.form == "paper" else req.form
    if req.target in ("travelling", "general"):
        if req.target == "travelling":
            sol = solutions.travelling_solution(
                params.a, params.b, params.c, params.C0, params.C1, form=form
            )
        else:
            h_expr = parse(req.h) if req.h else num(1)
            g_expr = parse(req.g) if req.g else num(1)
            sol = solutions.general_solution(
                h_expr, g_expr, params.a, params.b, params.C0, params.C1
            )
        report_model = None
        if req.report:
            grid = _grid_from_model(req.grid)
            report = solutions.residual_report(sol, grid, margin=req.margin)
            report_model = _residual_model(report)
            warnings.extend(report.warnings)
        if req.output and out_dir is not None:
            path = out_dir / f"{req.output}.csv"
            _solution_csv(path, sol, _grid_from_model(req.grid))
            files.append(str(path))
        return schemas.SolveReport(
            target=req.target,
            ok=True,
            closed_form={"u": to_text(sol.u), "v": to_text(sol.v)},
            residual_report=report_model,
            files=files,
            warnings=warnings,
        )

    named = {"riccati", "euler", "abel1", "abel2"}
    if req.target in named:
        catalog_id = f"{req.case}.{req.target}"
    else:
        catalog_id = req.target
    catalog = _full_catalog()
    if catalog_id not in catalog:
        raise KeyError(f"unknown solve target {catalog_id!r}; known: {sorted(catalog)}")
    ode = catalog[catalog_id]
    if ode.rhs is None:
        raise ValueError(f"{catalog_id} carries no explicit right-hand side")
    # second-order equations integrate in phase space (w0, w1)
    state_names = (
        ["w0", "w1"] if ode.tag == "SecondOrderScalar" else list(ode.dependent)
    )

    numeric_params = {"a": params.a, "b": params.b, "c": params.c, "C0": params.C0}
    numeric_params = {k: v for k, v in numeric_params.items() if k in ode.parameters or k in ("a", "b", "c")}
    x0, x1 = req.span

    closed_fn = None
    closed_text = None
    if catalog_id == "case1.riccati":
        closed_fn, closed_expr = odesolve.riccati_closed_form(
            params.a, params.b, params.c, params.C0
        )
        closed_text = to_text(closed_expr)
    elif catalog_id == "case1.euler":
        closed_fn, closed_expr = odesolve.euler_linear_closed_form(
            params.a, params.b, params.c, params.C0, which="travelling"
        )
        closed_text = to_text(closed_expr)
    elif catalog_id == "case2b.euler":
        closed_fn, closed_expr = odesolve.euler_linear_closed_form(
            params.a, params.b, params.c, params.C0, which="scaling"
        )
        closed_text = to_text(closed_expr)

    if req.ic is not None:
        ic = list(req.ic)
        if len(ic) != len(state_names):
            raise ValueError(
                f"{catalog_id} needs {len(state_names)} initial values "
                f"({', '.join(state_names)}); got {len(ic)}"
            )
    elif closed_fn is not None:
        ic = [closed_fn(x0)]
    else:
        ic = [0.5] * len(state_names)

    if catalog_id in _ABEL_DENOMINATORS:
        traj = odesolve.abel_solve_numeric(
            "second", list(ode.rhs), ode.independent, state_names,
            numeric_params, ic, (x0, x1),
            denominator=parse(_ABEL_DENOMINATORS[catalog_id]),
        )
    else:
        traj = odesolve.integrate_expression(
            list(ode.rhs), ode.independent, state_names,
            x0, ic, x1, params=numeric_params,
        )
    if traj.status != "completed":
        warnings.append(f"integration stopped early: {traj.status}")

    deviation = None
    ok = True
    if req.check:
        if closed_fn is None:
            raise ValueError(f"{catalog_id} has no closed form to check against")
        worst = 0.0
        for x_val, y_val in zip(traj.xs, traj.ys):
            worst = max(worst, abs(closed_fn(float(x_val)) - float(y_val[0])))
        deviation = worst
        ok = worst < 1e-8
    if req.output and out_dir is not None:
        path = out_dir / f"{req.output}.csv"
        traj.to_csv(path)
        files.append(str(path))
    closed_form = {"m": closed_text} if closed_text else None
    return schemas.SolveReport(
        target=catalog_id,
        ok=ok,
        closed_form=closed_form,
        trajectory=_trajectory_model(traj),
        check_max_deviation=deviation,
        files=files,
        warnings=warnings,
    )


def run_report(req: schemas.ReportRequest) -> schemas.ResidualReportModel:
    params = req.params
    form = "printed" if req.form == "paper" else req.form
    if req.solution == "travelling":
        sol = solutions.travelling_solution(
            params.a, params.b, params.c, params.C0, params.C1, form=form
        )
    elif req.solution == "general":
        h_expr = parse(req.h) if req.h else num(1)
        g_expr = parse(req.g) if req.g else num(1)
        sol = solutions.general_solution(
            h_expr, g_expr, params.a, params.b, params.C0, params.C1
        )
    else:
        raise KeyError(f"unknown solution {req.solution!r}; expected travelling or general")
    report = solutions.residual_report(sol, _grid_from_model(req.grid), margin=req.margin)
    return _residual_model(report)


def health() -> schemas.HealthReport:
    return schemas.HealthReport(status="ok", version=__version__)
