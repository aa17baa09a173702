"""Command-line interface.

Exit codes: 0 success, 1 validation error, 2 simulation jam (sim run only),
3 I/O error.
"""

from __future__ import annotations

import math
import sys

import click

from . import actuation, bench, fileio, fold_geometry
from .errors import JamError, OrigripError
from .fold_geometry import FrictionMode
from .gripper_sim import run_plan
from .plans import reverse_plan

EXIT_VALIDATION = 1
EXIT_JAM = 2
EXIT_IO = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _write(path: str, text: str):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as err:
        _fail(EXIT_IO, f"cannot write {path}: {err}")


@click.group()
def main():
    """Design tools and manipulation benchmarks for variable-friction
    gripper surfaces."""


@main.group()
def design():
    """Fold-pattern design calculations."""


@design.command("sweep")
@click.option("--alpha-min", type=float, default=fold_geometry.FOLD_ANGLE_MIN_RAD,
              show_default=True, help="Fold angle range start (rad).")
@click.option("--alpha-max", type=float, default=fold_geometry.FOLD_ANGLE_MAX_RAD,
              show_default=True, help="Fold angle range end (rad).")
@click.option("--l-min", type=float, default=fold_geometry.LOW_FACE_MIN_MM,
              show_default=True, help="Low-face length range start (mm).")
@click.option("--l-max", type=float, default=fold_geometry.LOW_FACE_MAX_MM,
              show_default=True, help="Low-face length range end (mm).")
@click.option("--steps", type=int, default=50, show_default=True,
              help="Grid steps per axis.")
@click.option("--ratio", type=float, default=1.0, show_default=True,
              help="High/low face length ratio.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def design_sweep(alpha_min, alpha_max, l_min, l_max, steps, ratio, out_path):
    """Export a thickness-change grid over fold angle and face length."""
    try:
        sweep = fold_geometry.sweep_design_space(alpha_min, alpha_max,
                                                 l_min, l_max, steps,
                                                 length_ratio=ratio)
    except OrigripError as err:
        _fail(EXIT_VALIDATION, str(err))
    _write(out_path, fileio.sweep_csv(sweep))
    click.echo(f"wrote {steps}x{steps} grid to {out_path}")


@design.command("report")
@click.option("--params", "params_path", required=True,
              type=click.Path(exists=False, dir_okay=False))
def design_report(params_path):
    """Print the derived quantities of one fold design."""
    try:
        p = fileio.load_fold_parameters(params_path)
    except OSError as err:
        _fail(EXIT_IO, str(err))
    except OrigripError as err:
        _fail(EXIT_VALIDATION, str(err))
    try:
        report = fold_geometry.thickness_report(p)
        gap_hf = fold_geometry.valley_gap(p, FrictionMode.HF)
        gap_lf = fold_geometry.valley_gap(p, FrictionMode.LF)
        travel = actuation.fold_travel(p)
        kappa = actuation.default_hinge_stiffness()
        peak = actuation.peak_fold_force(p, kappa)
    except OrigripError as err:
        _fail(EXIT_VALIDATION, str(err))
    click.echo(f"low face l        : {p.low_face_mm:.3f} mm")
    click.echo(f"high face k       : {p.high_face_mm:.3f} mm")
    click.echo(f"fold angle        : {math.degrees(p.fold_angle_rad):.2f} deg")
    click.echo(f"units             : {p.n_units}")
    click.echo(f"h_HF              : {report.h_hf:.3f} mm")
    click.echo(f"h_LF              : {report.h_lf:.3f} mm")
    click.echo(f"delta_h           : {report.delta_h:.3f} mm")
    click.echo(f"valley gap (HF)   : {gap_hf:.3f} mm")
    click.echo(f"valley gap (LF)   : {gap_lf:.3f} mm")
    click.echo(f"fold travel       : {travel:.3f} mm")
    click.echo(f"peak fold force   : {peak:.3f} N (kappa {kappa:.4f} N*mm/rad)")


@main.group()
def profile():
    """Cross-section profile export."""


@profile.command("emit")
@click.option("--params", "params_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["hf", "lf"]), required=True)
@click.option("--format", "fmt", type=click.Choice(["svg", "csv"]), required=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def profile_emit(params_path, mode, fmt, out_path):
    """Write the labeled cross-section polyline as SVG or CSV."""
    try:
        p = fileio.load_fold_parameters(params_path)
        section = fold_geometry.cross_section(p, FrictionMode(mode))
    except OSError as err:
        _fail(EXIT_IO, str(err))
    except OrigripError as err:
        _fail(EXIT_VALIDATION, str(err))
    text = fileio.profile_svg(section) if fmt == "svg" else fileio.profile_csv(section)
    _write(out_path, text)
    click.echo(f"wrote {mode} profile ({fmt}) to {out_path}")


@main.group()
def sim():
    """Single-scenario simulation."""


@sim.command("run")
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--plan", "plan_kind", type=click.Choice(["translate", "rotate"]),
              required=True)
@click.option("--direction", type=str, default=None,
              help="distal/proximal for translate, cw/ccw for rotate.")
@click.option("--cycles", type=int, default=1, show_default=True)
@click.option("--reverse", "also_reverse", is_flag=True,
              help="Append the reversed plan after the forward one.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def sim_run(scenario_path, plan_kind, direction, cycles, also_reverse, out_path):
    """Run one manipulation plan and export the trajectory log."""
    kind = {"translate": "translation", "rotate": "rotation"}[plan_kind]
    try:
        gripper, state, _seed = fileio.load_scenario(scenario_path)
        plan = bench.build_plan(kind, gripper, direction, cycles)
    except OSError as err:
        _fail(EXIT_IO, str(err))
    except OrigripError as err:
        _fail(EXIT_VALIDATION, str(err))
    try:
        log = run_plan(gripper, state, plan)
        if also_reverse:
            tail = run_plan(gripper, log.final, reverse_plan(plan))
            log.steps.extend(tail.steps[1:])
    except JamError as err:
        _write(out_path, "")
        _fail(EXIT_JAM, f"jam at phase {err.phase}, step {err.step}: {err}")
    except OrigripError as err:
        _fail(EXIT_VALIDATION, str(err))
    _write(out_path, fileio.trajectory_csv(log))
    translation, rotation = bench.net_metrics(log)
    click.echo(f"net translation {translation:.2f} mm, net rotation {rotation:.2f} deg; "
               f"{len(log.steps)} steps -> {out_path}")


@main.group(name="bench")
def bench_group():
    """Full evaluation matrix."""


@bench_group.command("run")
@click.option("--config", "config_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def bench_run(config_path, out_path):
    """Run the benchmark matrix and export per-cell statistics."""
    try:
        config = fileio.load_bench_config(config_path)
    except OSError as err:
        _fail(EXIT_IO, str(err))
    except OrigripError as err:
        _fail(EXIT_VALIDATION, str(err))
    try:
        result = bench.run_bench(config)
    except OrigripError as err:
        _fail(EXIT_VALIDATION, str(err))
    _write(out_path, result.to_csv())
    jams = sum(r.jam_count for r in result.rows)
    click.echo(f"{len(result.rows)} cells, {jams} jammed trials -> {out_path}")


if __name__ == "__main__":
    main()
