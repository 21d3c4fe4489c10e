"""Command-line front end: ``stklein <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import oracle
from .boost import comoving_energy_spread, verify_continuity
from .errors import EvanescentStatic, NoScattering
from .kinematics import Region, StepProblem, incident_from_energy, transmitted_channels
from .regimes import classify, critical_velocities
from .scattering import scatter
from .sweep import Axis, SweepSpec, SweepSpecError, preset, run_sweep, write_output
from .thresholds import gap_edges, gap_width, gap_width_extrema, min_threshold_over_energy

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


class UsageError(Exception):
    def __init__(self, message: str, code: str = "usage") -> None:
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


def _json_safe(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return {"re": _json_safe(obj.real), "im": _json_safe(obj.imag)}
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _emit(payload) -> None:
    json.dump(_json_safe(payload), sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ei", type=float, required=True, help="incident energy (units of m)")
    p.add_argument("--qv1", type=float, default=0.0)
    p.add_argument("--qa1", type=float, default=0.0)
    p.add_argument("--qv2", type=float, default=None, help="defaults to qv1")
    p.add_argument("--qa2", type=float, default=None, help="defaults to qa1")
    p.add_argument("--vm", type=float, default=0.0, help="front velocity (units of c)")


def _problem(args) -> StepProblem:
    r1 = Region(args.qv1, args.qa1)
    r2 = Region(args.qv1 if args.qv2 is None else args.qv2, args.qa1 if args.qa2 is None else args.qa2)
    return StepProblem.build(args.ei, r1, r2, args.vm)


def cmd_scatter(args) -> int:
    problem = _problem(args)
    try:
        res = scatter(problem)
    except NoScattering as exc:
        _emit({"regime": classify(problem).label.value, "error": str(exc)})
        return EXIT_OK
    row = res.as_row()
    row.update(
        selected_branch=res.regime.selected_branch.value if res.regime.selected_branch else None,
        E_t=complex(res.transmitted.E),
        p_t=complex(res.transmitted.p),
        E_r=res.reflected.E,
        p_r=res.reflected.p,
        r=res.r_amp,
        t=res.t_amp,
        j_i=res.j_i,
        j_r=res.j_r,
        j_t=res.j_t,
        R_plus_T=res.R + res.T,
    )
    _emit(row)
    return EXIT_OK


def cmd_classify(args) -> int:
    problem = _problem(args)
    regime = classify(problem)
    _emit(
        {
            "regime": regime.label.value,
            "selected_branch": regime.selected_branch.value if regime.selected_branch else None,
            "v_g": problem.incident.group_velocity,
            "critical_velocities": critical_velocities(problem.incident, problem.region2).as_dict(),
        }
    )
    return EXIT_OK


def cmd_thresholds(args) -> int:
    if args.min_over_ei:
        e_kin, qdv = min_threshold_over_energy(args.vm, args.rav)
        _emit({"v_m": args.vm, "r_AV": args.rav, "E_i_over_m": e_kin, "qdV_th_min": qdv})
        return EXIT_OK
    inc = incident_from_energy(args.ei, Region())
    if args.vm >= inc.group_velocity:
        _emit({"v_m": args.vm, "r_AV": args.rav, "E_i": args.ei, "regime": "no_catch_up"})
        return EXIT_OK
    gap = gap_edges(inc, args.vm, args.rav)
    _emit(
        {
            "E_i": args.ei,
            "v_m": gap.v_m,
            "r_AV": gap.r_AV,
            "qdV_plus": gap.qdV_plus,
            "qdV_minus": gap.qdV_minus,
            "width": gap.width,
        }
    )
    return EXIT_OK


def cmd_gap(args) -> int:
    vs = np.linspace(0.0, args.vm_max, args.count)
    v_star, w_star = gap_width_extrema(args.rav)
    _emit(
        {
            "r_AV": args.rav,
            "v_m_at_max": v_star,
            "max_width": w_star,
            "rows": [{"v_m": float(v), "width": gap_width(float(v), args.rav)} for v in vs],
        }
    )
    return EXIT_OK


def _sweep_spec(args) -> SweepSpec:
    if args.spec:
        data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        if args.output:
            data.setdefault("output", {})["path"] = args.output
        if args.format:
            data.setdefault("output", {})["format"] = args.format
        return SweepSpec.from_dict(data)
    if not args.axis1:
        raise UsageError("sweep needs --spec or --axis1", code="missing_axis")
    fixed = {}
    for item in args.fixed or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--fixed expects name=value, got {item!r}", code="bad_fixed")
        fixed[name] = float(value)
    spec = SweepSpec(
        axis1=Axis.parse(args.axis1),
        axis2=Axis.parse(args.axis2) if args.axis2 else None,
        fixed=fixed,
        kind=args.kind,
        output_path=args.output,
        output_format=args.format or "csv",
    )
    spec.validate()
    return spec


def _run_and_write(spec: SweepSpec, emit_plot_script: bool) -> int:
    if emit_plot_script and spec.output_path is None:
        raise UsageError("--emit-plot-script needs --output", code="plot_needs_output")
    rows = run_sweep(spec)
    text = write_output(spec, rows, emit_plot_script)
    if text is not None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    return _run_and_write(_sweep_spec(args), args.emit_plot_script)


def cmd_figure(args) -> int:
    spec = preset(args.which, path=args.output, format=args.format or "csv")
    return _run_and_write(spec, args.emit_plot_script)


def _oracle_checks(n: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    max_root = max_rt = 0.0
    failures = 0
    for problem in oracle.random_problems(rng, n):
        plus, minus, geom = transmitted_channels(problem)
        inc = problem.incident
        if not geom.evanescent and not geom.tangent:
            pts = oracle.intersect_line_hyperbola(
                oracle.LineHyperbolaProblem((inc.p_i, inc.E_i), problem.v_m, problem.region2)
            )
            closed = sorted([(plus.p.real, plus.E.real), (minus.p.real, minus.E.real)])
            if len(pts) != 2:
                failures += 1
                continue
            dev = max(abs(a - b) for pc, po in zip(closed, pts) for a, b in zip(pc, po))
            max_root = max(max_root, dev)
            failures += dev > 1e-9
        try:
            res = scatter(problem)
        except NoScattering:
            continue
        err = abs(res.R + res.T - 1.0)
        max_rt = max(max_rt, err)
        failures += err > 1e-10
    # static limits
    static_ok = True
    for dv, expect_gap in ((2.0, False), (4.0, True), (6.0, False)):
        try:
            _, _, R, T = oracle.static_matching_solve(4.0, Region(), Region(dv, 0.0))
            res = scatter(StepProblem.build(4.0, Region(), Region(dv, 0.0), 0.0))
            static_ok &= not expect_gap and abs(res.T - T) < 1e-9
        except EvanescentStatic:
            static_ok &= expect_gap
    failures += not static_ok
    return {
        "samples": n,
        "failures": int(failures),
        "max_root_deviation": max_root,
        "max_flux_error": max_rt,
        "static_limits_ok": bool(static_ok),
    }


def _continuity_checks(n: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    max_res = max_spread = 0.0
    failures = checked = 0
    for problem in oracle.random_problems(rng, n):
        try:
            res = scatter(problem)
        except NoScattering:
            continue
        checked += 1
        resid = verify_continuity(problem, res)
        spread = comoving_energy_spread(problem, res) / max(1.0, abs(problem.incident.E_i))
        max_res = max(max_res, resid)
        max_spread = max(max_spread, spread)
        failures += resid > 1e-10 or spread > 1e-10
    return {
        "samples": checked,
        "failures": int(failures),
        "max_continuity_residual": max_res,
        "max_comoving_energy_spread": max_spread,
    }


def cmd_verify(args) -> int:
    run_oracle = args.oracle or args.all or not args.continuity
    run_cont = args.continuity or args.all or not args.oracle
    report = {}
    if run_oracle:
        report["oracle"] = _oracle_checks(args.samples, args.seed)
    if run_cont:
        report["continuity"] = _continuity_checks(args.samples, args.seed)
    ok = all(section["failures"] == 0 for section in report.values())
    report["passed"] = ok
    _emit(report)
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stklein", description="Electron scattering at a moving potential step.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scatter", help="single-point reflection/transmission")
    _add_problem_flags(p)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("classify", help="regime label and critical velocities")
    _add_problem_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("thresholds", help="Klein-gap edges")
    p.add_argument("--vm", type=float, required=True)
    p.add_argument("--rav", type=float, default=-1.0)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--ei", type=float, help="incident kinetic energy (units of m)")
    g.add_argument("--min-over-ei", action="store_true", help="minimise the threshold over E_i")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("gap", help="gap width versus v_m at fixed r_AV")
    p.add_argument("--rav", type=float, required=True)
    p.add_argument("--vm-max", type=float, default=0.99)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_gap)

    for name, func in (("sweep", cmd_sweep), ("figure", cmd_figure)):
        p = sub.add_parser(name, help=f"{name} to CSV/JSON")
        if name == "sweep":
            p.add_argument("--spec", help="JSON sweep specification")
            p.add_argument("--kind", choices=("scatter", "thresholds"), default="scatter")
            p.add_argument("--axis1", help="name:min:max:count[:scale] or name=v1,v2,..")
            p.add_argument("--axis2")
            p.add_argument("--fixed", action="append", help="name=value, repeatable")
        else:
            p.add_argument("--which", choices=("1b", "3a", "3b"), required=True)
        p.add_argument("--output", "-o", help="output path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--emit-plot-script", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="oracle and continuity self-checks")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--continuity", action="store_true")
    p.add_argument("--all", action="store_true")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def _usage_failure(code: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return EXIT_USAGE


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _usage_failure(exc.code, str(exc))
    except SweepSpecError as exc:
        return _usage_failure("bad_sweep_spec", str(exc))
    except (ValueError, ArithmeticError) as exc:
        return _usage_failure(type(exc).__name__, str(exc))
    except OSError as exc:
        return _usage_failure("io_error", str(exc))


__all__ = ["build_parser", "main"]
