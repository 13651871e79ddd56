"""Command-line client for the analysis pipeline.

The CLI builds the same request models the HTTP service accepts and, by
default, executes them in-process; with ``--server URL`` it posts them to a
running instance instead.  Reports print as JSON on stdout and can also be
written to files (atomically).

Exit codes: 0 success, 1 verification failure, 2 indeterminate or numerical
failure, 64 bad usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from chengsym import __version__
from chengsym.errors import ChengError, IndeterminateZeroError
from chengsym.expr import ExprSyntaxError
from chengsym.service import handlers, schemas

EXIT_OK = 0
EXIT_VERIFICATION_FAILURE = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); remap to 64
        raise _UsageError(message)


def _add_params(parser) -> None:
    parser.add_argument("--a", type=float, default=1.0)
    parser.add_argument("--b", type=float, default=1.0)
    parser.add_argument("--c-param", dest="c_param", type=float, default=1.0,
                        help="wave-speed / coefficient parameter c (default 1)")
    parser.add_argument("--C0", type=float, default=1.0)
    parser.add_argument("--C1", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=42)


def _add_grid(parser) -> None:
    parser.add_argument("--grid", type=float, nargs=4, metavar=("TMIN", "TMAX", "XMIN", "XMAX"),
                        default=[1.0, 2.0, 1.0, 2.0])
    parser.add_argument("--grid-points", type=int, nargs=2, metavar=("NT", "NX"),
                        default=[101, 101])
    parser.add_argument("--margin", type=float, default=0.1,
                        help="singular-locus mask margin in wave-coordinate units")


def build_parser() -> _Parser:
    parser = _Parser(prog="chengsym", description=__doc__)
    parser.add_argument("--version", action="version", version=f"chengsym {__version__}")
    parser.add_argument("--server", default=None,
                        help="POST requests to a running service instead of in-process")
    parser.add_argument("--config", default=None,
                        help="JSON file with request fields (flags override)")
    parser.add_argument("--output-dir", default=None,
                        help=f"directory for artifacts (default ${handlers.OUTPUT_DIR_ENV} or .)")
    parser.add_argument("--output", default=None,
                        help="also write the JSON report to this file (under --output-dir)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-symmetries", help="check the shipped generators (or one field)")
    p.add_argument("--system", default="all",
                   help="all | cheng | tw-ode | iia-ode | iib-ode | spacedep | spacedep-ode")
    p.add_argument("--field", default=None,
                   help='vector field text, e.g. "g(x) d/dx - v*D[g,1](x) d/dv"')
    p.add_argument("--g", default=None, help="instantiate the x-family, e.g. x^2")
    p.add_argument("--h", default=None, help="instantiate the t-family, e.g. exp(t)")
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("reduce", help="run a similarity reduction and verify it")
    p.add_argument("case", choices=["case1", "case2a", "case2b", "general-I", "general-II", "space-dep"])
    p.add_argument("--chart", choices=["canonical", "invariants"], default=None)
    p.add_argument("--generator", type=int, choices=[1, 2], default=None)
    p.add_argument("--c", default=None,
                   help="wave speed (case1) or coefficient expression c(x) (space-dep)")
    p.add_argument("--h", default=None)
    p.add_argument("--g", default=None)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("solve", help="closed forms, numerical integration, residual reports")
    p.add_argument("target",
                   help="travelling | general | riccati | euler | abel1 | abel2 | catalog id")
    p.add_argument("--case", default="case1",
                   help="reduction family for riccati/euler/abel targets")
    p.add_argument("--form", choices=["derived", "printed", "paper"], default="derived",
                   help='closed-form variant; "paper" is accepted as an alias of "printed"')
    p.add_argument("--check", action="store_true",
                   help="cross-validate the integrator against the closed form")
    p.add_argument("--report", action="store_true",
                   help="attach a grid residual report (solution targets)")
    p.add_argument("--span", type=float, nargs=2, default=[1.0, 5.0])
    p.add_argument("--ic", type=float, nargs="+", default=None)
    p.add_argument("--h", default=None)
    p.add_argument("--g", default=None)
    p.add_argument("--artifact", default=None, help="stem for CSV artifacts")
    _add_params(p)
    _add_grid(p)

    p = sub.add_parser("report", help="grid residual report for a closed-form solution")
    p.add_argument("--solution", choices=["travelling", "general"], default="travelling")
    p.add_argument("--form", choices=["derived", "printed", "paper"], default="derived",
                   help='closed-form variant; "paper" is accepted as an alias of "printed"')
    p.add_argument("--h", default=None)
    p.add_argument("--g", default=None)
    _add_params(p)
    _add_grid(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _merge_config(args, request_data: dict) -> dict:
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            base = json.load(handle)
        if not isinstance(base, dict):
            raise _UsageError("--config must contain a JSON object")
        base.update(request_data)
        return base
    return request_data


def _grid_model(args) -> schemas.GridModel:
    t_min, t_max, x_min, x_max = args.grid
    nt, nx = args.grid_points
    return schemas.GridModel(t_min=t_min, t_max=t_max, x_min=x_min, x_max=x_max, nt=nt, nx=nx)


def _params_model(args) -> schemas.CommonParams:
    return schemas.CommonParams(a=args.a, b=args.b, c=args.c_param,
                                C0=args.C0, C1=args.C1, seed=args.seed)


def _build_request(args):
    if args.command == "verify-symmetries":
        data = _merge_config(args, {
            k: v for k, v in (
                ("system", args.system), ("field", args.field),
                ("g", args.g), ("h", args.h), ("seed", args.seed),
            ) if v is not None
        })
        return "/verify-symmetries", schemas.VerifySymmetriesRequest(**data)
    if args.command == "reduce":
        data = _merge_config(args, {
            k: v for k, v in (
                ("case", args.case), ("chart", args.chart),
                ("generator", args.generator), ("c", args.c),
                ("h", args.h), ("g", args.g), ("seed", args.seed),
            ) if v is not None
        })
        return "/reduce", schemas.ReduceRequest(**data)
    if args.command == "solve":
        data = _merge_config(args, {
            "target": args.target,
            "case": args.case,
            "form": args.form,
            "params": _params_model(args).model_dump(),
            "check": args.check,
            "report": args.report,
            "span": tuple(args.span),
            "ic": args.ic,
            "grid": _grid_model(args).model_dump(),
            "margin": args.margin,
            "h": args.h,
            "g": args.g,
            "output": args.artifact,
        })
        return "/solve", schemas.SolveRequest(**data)
    if args.command == "report":
        data = _merge_config(args, {
            "solution": args.solution,
            "form": args.form,
            "params": _params_model(args).model_dump(),
            "grid": _grid_model(args).model_dump(),
            "margin": args.margin,
            "h": args.h,
            "g": args.g,
        })
        return "/report", schemas.ReportRequest(**data)
    raise _UsageError(f"unknown command {args.command!r}")


def _dispatch_local(route: str, request, output_dir):
    if route == "/verify-symmetries":
        return handlers.run_verify_symmetries(request)
    if route == "/reduce":
        return handlers.run_reduce(request)
    if route == "/solve":
        return handlers.run_solve(request, output_dir=output_dir)
    if route == "/report":
        return handlers.run_report(request)
    raise _UsageError(f"unknown route {route}")


def _dispatch_remote(server: str, route: str, request):
    import httpx

    response = httpx.post(server.rstrip("/") + route, json=request.model_dump(), timeout=600.0)
    if response.status_code >= 400:
        raise ChengError(f"server returned {response.status_code}: {response.text}")
    return response.json()


def _report_ok(route: str, payload: dict) -> bool:
    if route == "/verify-symmetries":
        return bool(payload.get("all_passed"))
    if route in ("/reduce", "/solve"):
        return bool(payload.get("ok", True))
    return True


def _write_json(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "serve":
        import uvicorn

        from chengsym.service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    try:
        route, request = _build_request(args)
        if args.server:
            payload = _dispatch_remote(args.server, route, request)
            text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
        else:
            report = _dispatch_local(route, request, args.output_dir)
            text = report.model_dump_json(indent=2) + "\n"
            payload = json.loads(text)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ExprSyntaxError, KeyError, ValueError) as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except IndeterminateZeroError as err:
        print(f"indeterminate: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ChengError as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    sys.stdout.write(text)
    if args.output:
        directory = handlers.resolve_output_dir(args.output_dir)
        _write_json(directory / args.output, text)
    return EXIT_OK if _report_ok(route, payload) else EXIT_VERIFICATION_FAILURE


if __name__ == "__main__":
    sys.exit(main())
