"""Batch command-line front end.

Subcommands:
    eval         closed-form report at a single parameter point
    sweep        1- or 2-axis parameter sweep, CSV and optional SVG output
    feasibility  2-axis (mu, alpha) feasibility map with class labels
    simulate     pulse-level Monte Carlo tally
    validate     Monte Carlo vs closed-form gate (exit 2 on disagreement)
    figure       one-shot information-vs-mu preset (CSV + SVG)

Numeric settings resolve as: command-line flags > config file (``key =
value`` lines) > BB84_EAVESDROP_* environment variables > built-in
defaults. Exit codes: 0 success, 1 configuration error, 2 statistical
disagreement from ``validate``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analytic import AnalyticReport, DegenerateModelError, full_report
from .core import AttackPlan, ParameterError, SystemParams
from .montecarlo import SimConfig, compare_to_analytic, simulate
from .strategy import TableFormatError, TruncationError, build_default_table, load_table
from .sweep import (
    DEFAULT_M,
    MODE_MATCHED,
    PARAM_NAMES,
    SweepAxis,
    SweepSpec,
    run_sweep,
    write_csv,
)
from .svgplot import PlotStyle, render_svg

__all__ = ["main", "build_parser", "ENV_PREFIX", "DEFAULTS"]

ENV_PREFIX = "BB84_EAVESDROP_"

# The canonical demonstration scenario doubles as the built-in defaults.
DEFAULTS: dict[str, float | int] = {
    "mu": 0.1,
    "alpha": 0.01,
    "eta": 0.5,
    "r_c": 0.01,
    "m": DEFAULT_M,
    "pulses": 10_000_000,
    "seed": 20010521,
    "threads": 0,  # 0 means machine parallelism
    "sigma": 3.5,
    "points": 50,
}
_INT_KEYS = frozenset({"m", "pulses", "seed", "threads", "points"})


class _CliError(Exception):
    """Configuration problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _CliError(message)


def _parse_number(key: str, raw: str | float | int) -> float | int:
    try:
        return int(raw) if key in _INT_KEYS else float(raw)
    except (TypeError, ValueError):
        raise _CliError(f"cannot parse {key}={raw!r} as a number") from None


def _env_overrides(environ: dict[str, str]) -> dict[str, float | int]:
    values = {}
    for key in DEFAULTS:
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = _parse_number(key, raw)
    return values


def _read_config(path: str) -> dict[str, float | int]:
    """Parse a flat ``key = value`` config file."""
    config_path = Path(path)
    if not config_path.is_file():
        raise _CliError(f"config file not found: {path}")
    values = {}
    for lineno, raw in enumerate(config_path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _CliError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in DEFAULTS:
            raise _CliError(f"{path}:{lineno}: unknown setting {key!r}; known: {sorted(DEFAULTS)}")
        values[key] = _parse_number(key, value)
    return values


def _resolve_settings(args: argparse.Namespace) -> dict[str, float | int]:
    values: dict[str, float | int] = dict(DEFAULTS)
    values.update(_env_overrides(dict(os.environ)))
    if getattr(args, "config", None):
        values.update(_read_config(args.config))
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    for key in _INT_KEYS:
        values[key] = int(values[key])
    return values


def _workers(settings: dict) -> int:
    threads = int(settings["threads"])
    return threads if threads > 0 else (os.cpu_count() or 1)


def _system_params(settings: dict) -> SystemParams:
    return SystemParams(
        mu=float(settings["mu"]),
        alpha=float(settings["alpha"]),
        eta=float(settings["eta"]),
        r_c=float(settings["r_c"]),
        m=int(settings["m"]),
    )


def _table(args: argparse.Namespace):
    if getattr(args, "table", None):
        return load_table(args.table)
    return build_default_table()


def _write_text(path: str, text: str) -> None:
    out = Path(path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)


def _print_pairs(pairs: list[tuple[str, object]]) -> None:
    for key, value in pairs:
        if isinstance(value, bool):
            print(f"{key} = {'true' if value else 'false'}")
        elif isinstance(value, float):
            print(f"{key} = {value:.12g}")
        else:
            print(f"{key} = {value}")


def _report_pairs(report: AnalyticReport, mode: str) -> list[tuple[str, object]]:
    params = report.params
    return [
        ("mu", params.mu),
        ("alpha", params.alpha),
        ("eta", params.eta),
        ("r_c", params.r_c),
        ("m", params.m),
        ("mode", mode),
        ("direct_rate", report.direct_rate),
        ("p_b", report.plan.p_block),
        ("p_m", report.plan.p_measure),
        ("feasible_pb", report.plan.feasible_block),
        ("feasible_pm", report.plan.feasible_measure),
        ("n", report.sifted),
        ("n_hat", report.sifted_attacked),
        ("e_T", report.errors),
        ("e_T_hat", report.errors_attacked),
        ("s_partial", report.eve_info),
    ]


# ---------------------------------------------------------------------------
# subcommands

def _cmd_eval(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    params = _system_params(settings)
    table = _table(args)
    try:
        report = full_report(params, table, match_count_rate=(args.mode == MODE_MATCHED))
    except DegenerateModelError as exc:
        _print_pairs([("mu", params.mu), ("alpha", params.alpha), ("eta", params.eta),
                      ("r_c", params.r_c), ("m", params.m), ("mode", args.mode),
                      ("degenerate", True)])
        print(f"# {exc}")
        return 0
    _print_pairs(_report_pairs(report, args.mode) + [("degenerate", False)])
    return 0


def _axis_from_args(settings: dict, args: argparse.Namespace, suffix: str = "") -> SweepAxis | None:
    name = getattr(args, f"axis{suffix}")
    if name is None:
        return None
    start = getattr(args, f"start{suffix}")
    stop = getattr(args, f"stop{suffix}")
    if start is None or stop is None:
        raise _CliError(f"--axis{suffix} needs --start{suffix} and --stop{suffix}")
    points = getattr(args, f"points{suffix}")
    return SweepAxis(
        name=name,
        start=start,
        stop=stop,
        points=int(points) if points is not None else int(settings["points"]),
        spacing=getattr(args, f"spacing{suffix}"),
    )


def _cmd_sweep(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    axis = _axis_from_args(settings, args)
    if axis is None:
        axis = SweepAxis(name="mu", start=0.01, stop=1.0, points=int(settings["points"]), spacing="log")
    axes = [axis]
    axis2 = _axis_from_args(settings, args, suffix="2")
    if axis2 is not None:
        axes.append(axis2)
    fixed = {name: float(settings[name]) for name in PARAM_NAMES if name not in {a.name for a in axes}}
    spec = SweepSpec(
        axes=tuple(axes),
        fixed=fixed,
        m=int(settings["m"]),
        mode=args.mode,
        table_source=args.table or "default",
    )
    points = run_sweep(spec, threads=_workers(settings))
    csv_text = write_csv(spec, points)
    if args.csv:
        _write_text(args.csv, csv_text)
        print(f"wrote {args.csv}")
    else:
        sys.stdout.write(csv_text)
    if args.svg:
        if len(axes) != 1:
            raise _CliError("--svg requires a single-axis sweep")
        style = PlotStyle(
            log_x=(axis.spacing == "log"),
            log_y=(args.y_scale == "log"),
            x_label=axis.name,
            annotation=_annotation(fixed, spec.m),
        )
        _write_text(args.svg, render_svg(points, style))
        print(f"wrote {args.svg}")
    return 0


def _annotation(fixed: dict[str, float], m: int) -> str:
    parts = [f"{name}={value:g}" for name, value in fixed.items()]
    parts.append(f"m={m:g}")
    return "fixed: " + ", ".join(parts)


def _cmd_feasibility(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    spec = SweepSpec(
        axes=(
            SweepAxis("mu", args.mu_start, args.mu_stop, args.mu_points, args.mu_spacing),
            SweepAxis("alpha", args.alpha_start, args.alpha_stop, args.alpha_points, args.alpha_spacing),
        ),
        fixed={"eta": float(settings["eta"]), "r_c": float(settings["r_c"])},
        m=int(settings["m"]),
        mode=MODE_MATCHED,
        table_source=args.table or "default",
    )
    csv_text = write_csv(spec, run_sweep(spec, threads=_workers(settings)), with_class=True)
    if args.csv:
        _write_text(args.csv, csv_text)
        print(f"wrote {args.csv}")
    else:
        sys.stdout.write(csv_text)
    return 0


def _plan_with_overrides(report: AnalyticReport, args: argparse.Namespace) -> AttackPlan:
    p_block = args.p_b_override if args.p_b_override is not None else report.plan.p_block
    p_measure = args.p_m_override if args.p_m_override is not None else report.plan.p_measure
    return AttackPlan(p_block=p_block, p_measure=p_measure)


def _cmd_simulate(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    params = _system_params(settings)
    eve_active = args.attack != "none"
    if not eve_active and (args.p_b_override is not None or args.p_m_override is not None):
        raise _CliError("plan overrides require an attack run (--attack matched|error-only)")
    plan = None
    table = None
    if eve_active:
        table = _table(args)
        report = full_report(params, table, match_count_rate=(args.attack == MODE_MATCHED))
        plan = _plan_with_overrides(report, args)
    config = SimConfig(
        params=params,
        n_pulses=int(settings["pulses"]),
        seed=int(settings["seed"]),
        eve_active=eve_active,
        plan=plan,
        table=table,
    )
    tally = simulate(config, workers=_workers(settings))
    pairs: list[tuple[str, object]] = [
        ("attack", args.attack),
        ("n_pulses", tally.pulses),
        ("seed", config.seed),
    ]
    if plan is not None:
        pairs += [("p_b", plan.p_block), ("p_m", plan.p_measure)]
    pairs += [
        ("sifted", tally.sifted),
        ("errors", tally.errors),
        ("eve_known", tally.eve_known),
        ("bob_multi_photon_events", tally.bob_multi_photon_events),
        ("nonzero_photon_pulses", tally.nonzero_photon_pulses),
        ("blocked_1", tally.blocked_1),
        ("blocked_2", tally.blocked_2),
        ("measured_1", tally.measured_1),
        ("passed_1", tally.passed_1),
        ("indirect_2", tally.indirect_2),
        ("direct_success", tally.direct_success),
        ("direct_fail", tally.direct_fail),
        ("stderr_sifted", tally.stderr_sifted),
        ("stderr_errors", tally.stderr_errors),
        ("stderr_eve_known", tally.stderr_eve_known),
    ]
    _print_pairs(pairs)
    if args.csv:
        _write_text(args.csv, tally.csv_header() + "\n" + tally.to_csv_row() + "\n")
        print(f"wrote {args.csv}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    params = _system_params(settings)
    table = _table(args)
    report = full_report(params, table, match_count_rate=(args.attack == MODE_MATCHED))
    plan = _plan_with_overrides(report, args)
    config = SimConfig(
        params=params,
        n_pulses=int(settings["pulses"]),
        seed=int(settings["seed"]),
        eve_active=True,
        plan=plan,
        table=table,
    )
    tally = simulate(config, workers=_workers(settings))
    verdict = compare_to_analytic(tally, report, sigma=float(settings["sigma"]))
    _print_pairs(
        [("mu", params.mu), ("alpha", params.alpha), ("eta", params.eta), ("r_c", params.r_c),
         ("m", params.m), ("attack", args.attack), ("n_pulses", config.n_pulses),
         ("seed", config.seed), ("p_b", plan.p_block), ("p_m", plan.p_measure)]
    )
    print(verdict.format_table())
    if verdict.passed:
        print(f"verdict: PASS (all |z| <= {verdict.sigma:g})")
        return 0
    print(f"verdict: FAIL (some |z| > {verdict.sigma:g})")
    return 2


def _cmd_figure(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    axis = SweepAxis(name="mu", start=0.01, stop=1.0, points=int(settings["points"]), spacing="log")
    fixed = {name: float(settings[name]) for name in PARAM_NAMES if name != "mu"}
    spec = SweepSpec(
        axes=(axis,),
        fixed=fixed,
        m=int(settings["m"]),
        mode="both",
        table_source=args.table or "default",
    )
    points = run_sweep(spec, threads=_workers(settings))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "figure.csv"
    svg_path = outdir / "figure.svg"
    csv_path.write_text(write_csv(spec, points))
    style = PlotStyle(
        log_x=True,
        log_y=True,
        x_label="mu",
        title="Information yield vs mean photon number",
        annotation=_annotation(fixed, spec.m),
    )
    svg_path.write_text(render_svg(points, style))
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(parser: argparse.ArgumentParser, scenario: bool = True) -> None:
    parser.add_argument("--config", help="flat 'key = value' settings file")
    parser.add_argument("--threads", type=int, help="worker threads (0 = machine parallelism)")
    parser.add_argument("--table", help="strategy table file ('l probability' lines)")
    if scenario:
        parser.add_argument("--mu", type=float, help="mean photons per pulse")
        parser.add_argument("--alpha", type=float, help="channel transmittivity")
        parser.add_argument("--eta", type=float, help="detector quantum efficiency")
        parser.add_argument("--r-c", dest="r_c", type=float, help="intrinsic error probability")
        parser.add_argument("--m", type=int, help="pulses per block")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bb84-eavesdrop", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="closed-form report at one parameter point")
    _add_common(p_eval)
    p_eval.add_argument("--mode", choices=("matched", "error-only"), default="matched")
    p_eval.set_defaults(func=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="parameter sweep to CSV (and SVG for one axis)")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", choices=PARAM_NAMES, help="swept parameter (default: mu)")
    p_sweep.add_argument("--start", type=float)
    p_sweep.add_argument("--stop", type=float)
    p_sweep.add_argument("--points", type=int)
    p_sweep.add_argument("--spacing", choices=("linear", "log"), default="log")
    p_sweep.add_argument("--axis2", choices=PARAM_NAMES, help="optional second axis")
    p_sweep.add_argument("--start2", type=float)
    p_sweep.add_argument("--stop2", type=float)
    p_sweep.add_argument("--points2", type=int)
    p_sweep.add_argument("--spacing2", choices=("linear", "log"), default="log")
    p_sweep.add_argument("--mode", choices=("matched", "error-only", "both"), default="both")
    p_sweep.add_argument("--csv", help="CSV output path (default: stdout)")
    p_sweep.add_argument("--svg", help="SVG output path (single-axis sweeps)")
    p_sweep.add_argument("--y-scale", choices=("log", "linear"), default="log")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_feas = sub.add_parser("feasibility", help="(mu, alpha) feasibility map to CSV")
    _add_common(p_feas)
    p_feas.add_argument("--mu-start", type=float, default=0.01)
    p_feas.add_argument("--mu-stop", type=float, default=5.0)
    p_feas.add_argument("--mu-points", type=int, default=40)
    p_feas.add_argument("--mu-spacing", choices=("linear", "log"), default="log")
    p_feas.add_argument("--alpha-start", type=float, default=0.005)
    p_feas.add_argument("--alpha-stop", type=float, default=1.0)
    p_feas.add_argument("--alpha-points", type=int, default=25)
    p_feas.add_argument("--alpha-spacing", choices=("linear", "log"), default="log")
    p_feas.add_argument("--csv", help="CSV output path (default: stdout)")
    p_feas.set_defaults(func=_cmd_feasibility)

    p_sim = sub.add_parser("simulate", help="pulse-level Monte Carlo tally")
    _add_common(p_sim)
    p_sim.add_argument("--pulses", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--attack", choices=("matched", "error-only", "none"), default="matched")
    p_sim.add_argument("--p-b-override", type=float, help="replace the solved blocking probability")
    p_sim.add_argument("--p-m-override", type=float, help="replace the solved measuring probability")
    p_sim.add_argument("--csv", help="write the tally as a one-row CSV")
    p_sim.set_defaults(func=_cmd_simulate)

    p_val = sub.add_parser("validate", help="Monte Carlo vs closed-form gate")
    _add_common(p_val)
    p_val.add_argument("--pulses", type=int)
    p_val.add_argument("--seed", type=int)
    p_val.add_argument("--sigma", type=float)
    p_val.add_argument("--attack", choices=("matched", "error-only"), default="matched")
    p_val.add_argument("--p-b-override", type=float, help="simulate with this blocking probability")
    p_val.add_argument("--p-m-override", type=float, help="simulate with this measuring probability")
    p_val.set_defaults(func=_cmd_validate)

    p_fig = sub.add_parser("figure", help="information-vs-mu preset: figure.csv + figure.svg")
    _add_common(p_fig)
    p_fig.add_argument("--points", type=int)
    p_fig.add_argument("--outdir", default=".")
    p_fig.set_defaults(func=_cmd_figure)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParameterError, TableFormatError, TruncationError, DegenerateModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
