"""Pydantic request/response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class CommonParams(BaseModel):
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0
    C0: float = 1.0
    C1: float = 0.0
    seed: int = 42


class GridModel(BaseModel):
    t_min: float = 1.0
    t_max: float = 2.0
    x_min: float = 1.0
    x_max: float = 2.0
    nt: int = Field(default=101, ge=5)
    nx: int = Field(default=101, ge=5)


class VerifySymmetriesRequest(BaseModel):
    """Run the shipped generator suite, or check one user-supplied field."""

    system: str = "all"
    field: Optional[str] = None  # vector-field text, e.g. "g(x) d/dx - v*g'(x) d/dv"
    g: Optional[str] = None  # instantiation for the x-family, e.g. "x^2"
    h: Optional[str] = None  # instantiation for the t-family
    seed: int = 42


class EquationVerdict(BaseModel):
    ok: bool
    method: str
    residual: str


class SymmetryResult(BaseModel):
    label: str
    system: str
    field: str
    provenance: str
    ok: bool
    equations: list[EquationVerdict]
    note: str = ""


class VerifySymmetriesReport(BaseModel):
    seed: int
    all_passed: bool
    results: list[SymmetryResult]
    warnings: list[str]


class ReduceRequest(BaseModel):
    case: str  # case1 | case2a | case2b | general-I | general-II | space-dep
    chart: Optional[str] = None  # canonical | invariants
    generator: Optional[int] = Field(default=None, ge=1, le=2)
    c: Optional[str] = None  # wave speed (case1) or c(x) expression (space-dep)
    h: Optional[str] = None
    g: Optional[str] = None
    seed: int = 42


class ReducedEquationModel(BaseModel):
    name: str
    tag: str
    provenance: str
    independent: str
    dependent: list[str]
    residuals: list[str]
    rhs: list[str] = []


class VerificationModel(BaseModel):
    name: str
    ok: bool
    multipliers: list[str]
    failures: list[str] = []


class TransformModel(BaseModel):
    name: str
    new_variable: str
    dependent_rules: dict[str, str]
    notes: list[str] = []


class ChartReductionModel(BaseModel):
    chart: str
    kind: str
    derived: ReducedEquationModel
    matches_printed: Optional[bool] = None
    printed_name: Optional[str] = None


class ReduceReport(BaseModel):
    case: str
    ok: bool
    transform: TransformModel
    reduced: list[ReducedEquationModel]
    verifications: list[VerificationModel]
    chart_reductions: list[ChartReductionModel] = []
    selected_form: Optional[str] = None  # space-dep: which reduced variant verified
    warnings: list[str] = []


class SolveRequest(BaseModel):
    target: str  # travelling | general | riccati | euler | abel1 | abel2 | catalog id
    case: str = "case1"  # which reduction family the ODE targets belong to
    form: str = "derived"  # travelling closed form: derived | printed
    params: CommonParams = CommonParams()
    check: bool = False  # cross-validate closed form against the integrator
    report: bool = False  # produce a grid residual report (solution targets)
    span: tuple[float, float] = (1.0, 5.0)
    ic: Optional[list[float]] = None
    grid: GridModel = GridModel()
    margin: float = 0.1
    h: Optional[str] = None
    g: Optional[str] = None
    output: Optional[str] = None  # stem for CSV/JSON artifacts


class ResidualReportModel(BaseModel):
    solution: str
    provenance: str
    method: str
    grid: GridModel
    max_residual: float
    rms_residual: float
    eq_max: list[float]
    masked_count: int
    total_points: int
    warnings: list[str] = []


class TrajectoryModel(BaseModel):
    status: str
    points: int
    x_start: float
    x_end: float
    y_end: list[float]


class SolveReport(BaseModel):
    target: str
    ok: bool
    closed_form: Optional[dict[str, str]] = None
    trajectory: Optional[TrajectoryModel] = None
    check_max_deviation: Optional[float] = None
    residual_report: Optional[ResidualReportModel] = None
    files: list[str] = []
    warnings: list[str] = []


class ReportRequest(BaseModel):
    solution: str = "travelling"  # travelling | general
    form: str = "derived"
    params: CommonParams = CommonParams()
    grid: GridModel = GridModel()
    margin: float = 0.1
    h: Optional[str] = None
    g: Optional[str] = None


class HealthReport(BaseModel):
    status: str
    version: str
