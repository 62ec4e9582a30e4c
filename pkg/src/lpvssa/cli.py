"""Command-line interface exposing the library over JSON documents.

Exit codes: 0 when the command ran to completion (verdicts do not change
the exit code), 2 on input errors, 3 when a resource cap is hit.  Every
command is deterministic given its files and flags.  Machine-readable
output (``--json``) carries the tool version and the tolerances in
effect.  The environment variable ``LPVSSA_RANK_RTOL`` overrides the
default rank tolerance; the ``--rank-rtol`` flag takes precedence over
the environment.
"""

from __future__ import annotations

import functools
import json
import os
import sys as _sys
import warnings
from pathlib import Path

import click
import numpy as np

from . import __version__
from .analysis import (
    SINGULARITY_RTOL,
    check_rc,
    find_revealing_scheduling,
    is_observable,
    is_span_reachable_from_zero,
)
from .core import LpvSsa, TimeDomain
from .equivalence import behavior_equivalence_empirical, find_isomorphism
from .errors import InputError, ResourceCapError
from .io import (
    parse_signal,
    parse_system,
    serialize_signal,
    serialize_system,
    serialize_transform,
    trajectory_to_csv,
    trajectory_to_json,
)
from .reduction import minimize as _minimize_op
from .signals import Signal
from .simulation import simulate_ct, simulate_dt

RANK_RTOL_ENV = "LPVSSA_RANK_RTOL"


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            _sys.exit(2)
        except ResourceCapError as exc:
            click.echo(f"resource cap: {exc}", err=True)
            _sys.exit(3)

    return wrapper


def _effective_rtol(flag_value):
    if flag_value is not None:
        return flag_value
    env = os.environ.get(RANK_RTOL_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            raise InputError(f"cannot parse {RANK_RTOL_ENV}={env!r} as a float")
    return None


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")


def _read_system(path) -> LpvSsa:
    return parse_system(_read_text(path))


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit_json(payload: dict) -> None:
    click.echo(json.dumps(_jsonable(payload), indent=2))


def _base_payload(command: str, rank_rtol) -> dict:
    return {
        "version": __version__,
        "command": command,
        "tolerances": {
            "rank_rtol": rank_rtol,
            "rank_rtol_default": "max(rows, cols) * 2**-52 per matrix",
            "singularity_rtol": SINGULARITY_RTOL,
        },
    }


def _rc_payload(rc) -> dict:
    return {
        "convex_ok": rc.convex_ok,
        "dt_invertibility": rc.dt_invertibility,
        "holds": rc.holds,
        "witness": rc.witness,
        "det_poly_1d": rc.det_poly_1d,
        "grid_per_axis": rc.grid_per_axis,
    }


def _rc_text(rc) -> str:
    if rc.dt_invertibility == "not-applicable":
        return "regularity: satisfied (CT; box region is convex with interior)"
    if rc.dt_invertibility == "certified":
        poly = np.array2string(rc.det_poly_1d, precision=12)
        return f"regularity: certified (det A(p) root-free on the interval; coefficients {poly})"
    if rc.dt_invertibility == "heuristic-pass":
        return (
            f"regularity: heuristic pass (grid {rc.grid_per_axis} per axis "
            "plus random sampling; not a certificate)"
        )
    return f"regularity: refuted, witness p* = {np.array2string(rc.witness)}"


_rank_rtol_option = click.option(
    "--rank-rtol",
    type=float,
    default=None,
    help=f"Rank tolerance override (precedence over ${RANK_RTOL_ENV}).",
)
_json_option = click.option(
    "--json", "as_json", is_flag=True, help="Machine-readable output."
)


@click.group()
@click.version_option(__version__, prog_name="lpvssa")
def main():
    """Analysis, minimization, and simulation of affine LPV state-space systems."""


@main.command()
@click.argument("system_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--grid", default=10, show_default=True, help="Regularity grid per axis (DT, n_p >= 2).")
@_rank_rtol_option
@_json_option
@_guard
def check(system_file, grid, rank_rtol, as_json):
    """Observability, span-reachability, and regularity report."""
    rtol = _effective_rtol(rank_rtol)
    sys_ = _read_system(system_file)
    obs, obs_dec = is_observable(sys_, rtol)
    reach, reach_dec = is_span_reachable_from_zero(sys_, rtol)
    rc = check_rc(sys_, grid)
    if as_json:
        payload = _base_payload("check", rtol)
        payload.update(
            {
                "n_x": sys_.n_x,
                "observable": obs,
                "observability_rank": obs_dec.rank,
                "observability_singular_values": obs_dec.singular_values,
                "span_reachable_from_zero": reach,
                "reachability_rank": reach_dec.rank,
                "reachability_singular_values": reach_dec.singular_values,
                "rc": _rc_payload(rc),
            }
        )
        _emit_json(payload)
        return
    click.echo(f"observable: {'yes' if obs else 'no'} (rank {obs_dec.rank}/{sys_.n_x})")
    click.echo(
        f"span-reachable from zero: {'yes' if reach else 'no'} "
        f"(rank {reach_dec.rank}/{sys_.n_x})"
    )
    click.echo(_rc_text(rc))


@main.command()
@click.argument("system_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Reduced system document.")
@click.option(
    "--transform-out",
    type=click.Path(dir_okay=False),
    default=None,
    help="Transform sidecar path [default: OUT with a .transform.json suffix].",
)
@click.option("--grid", default=10, show_default=True, help="Regularity grid per axis.")
@_rank_rtol_option
@_json_option
@_guard
def minimize(system_file, out, transform_out, grid, rank_rtol, as_json):
    """Observability reduction; minimal realization under regularity."""
    rtol = _effective_rtol(rank_rtol)
    sys_ = _read_system(system_file)
    result = _minimize_op(sys_, grid_per_axis=grid, rtol=rtol)
    out_path = Path(out)
    sidecar = (
        Path(transform_out)
        if transform_out
        else out_path.with_name(out_path.stem + ".transform.json")
    )
    out_path.write_text(serialize_system(result.reduced))
    sidecar.write_text(
        serialize_transform(
            result.transform_T, result.projection_Pi, result.o, result.minimality
        )
    )
    if as_json:
        payload = _base_payload("minimize", rtol)
        payload.update(
            {
                "input_dimension": sys_.n_x,
                "reduced_dimension": result.o,
                "minimality": result.minimality,
                "rc": _rc_payload(result.rc),
                "out": str(out_path),
                "transform_out": str(sidecar),
            }
        )
        _emit_json(payload)
        return
    click.echo(f"reduced dimension: {result.o} (from {sys_.n_x})")
    click.echo(f"status: {result.minimality}")
    click.echo(_rc_text(result.rc))
    click.echo(f"wrote {out_path} and {sidecar}")


@main.command()
@click.argument("file1", type=click.Path(exists=True, dir_okay=False))
@click.argument("file2", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", default=1e-8, show_default=True, help="Residual tolerance.")
@_rank_rtol_option
@_json_option
@_guard
def iso(file1, file2, tol, rank_rtol, as_json):
    """Isomorphism between two systems of equal dimension."""
    rtol = _effective_rtol(rank_rtol)
    r = find_isomorphism(_read_system(file1), _read_system(file2), tol=tol, rtol=rtol)
    if as_json:
        payload = _base_payload("iso", rtol)
        payload["tolerances"]["iso_tol"] = tol
        payload.update(
            {
                "verdict": r.verdict,
                "residual": r.residual,
                "obstruction": r.obstruction,
                "condition_number": r.condition_number,
                "T": r.T,
            }
        )
        _emit_json(payload)
        return
    click.echo(f"verdict: {r.verdict}")
    click.echo(f"residual: {r.residual:.3e}")
    if r.obstruction:
        click.echo(f"obstruction: {r.obstruction}")
    if r.T is not None:
        click.echo("T =")
        click.echo(np.array2string(r.T, precision=12, suppress_small=True))


@main.command()
@click.argument("system_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--x0", default=None, help="Comma-separated initial state [default: origin].")
@click.option("--u", "u_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Input signal document [default: zero input].")
@click.option("--p", "p_file", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Scheduling signal document.")
@click.option("--horizon", required=True, type=float, help="Steps (DT) or end time (CT).")
@click.option("--step", default=1e-3, show_default=True, help="CT integrator step.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Trajectory file (.csv or .json by extension) [default: CSV to stdout].")
@_json_option
@_guard
def simulate(system_file, x0, u_file, p_file, horizon, step, out, as_json):
    """Simulate a trajectory under given input and scheduling signals."""
    sys_ = _read_system(system_file)
    p = parse_signal(_read_text(p_file))
    if x0 is None:
        x0_vec = np.zeros(sys_.n_x)
    else:
        try:
            x0_vec = np.array([float(s) for s in x0.split(",")], dtype=float)
        except ValueError:
            raise InputError(f"cannot parse --x0 {x0!r} as comma-separated floats")
    if sys_.domain == TimeDomain.DT:
        n_steps = int(horizon)
        if n_steps != horizon or n_steps < 0:
            raise InputError("--horizon must be a nonnegative integer for DT systems")
        u = (
            parse_signal(_read_text(u_file))
            if u_file
            else Signal.dt(np.zeros((n_steps + 1, sys_.n_u)))
        )
        traj = simulate_dt(sys_, x0_vec, u, p, n_steps)
    else:
        u = (
            parse_signal(_read_text(u_file))
            if u_file
            else Signal.ct_constant(np.zeros(sys_.n_u), horizon)
        )
        traj = simulate_ct(sys_, x0_vec, u, p, horizon, step)
    if out:
        out_path = Path(out)
        if out_path.suffix.lower() == ".json":
            out_path.write_text(
                json.dumps(_jsonable(trajectory_to_json(traj)), indent=2) + "\n"
            )
        else:
            out_path.write_text(trajectory_to_csv(traj))
        click.echo(f"wrote {out_path}")
        return
    if as_json:
        payload = _base_payload("simulate", None)
        payload["trajectory"] = trajectory_to_json(traj)
        _emit_json(payload)
        return
    click.echo(trajectory_to_csv(traj), nl=False)


@main.command()
@click.argument("file1", type=click.Path(exists=True, dir_okay=False))
@click.argument("file2", type=click.Path(exists=True, dir_okay=False))
@click.option("--trials", default=20, show_default=True)
@click.option("--horizon", default=None, type=float, help="[default: 20 steps DT / 2.0 CT]")
@click.option("--seed", default=0, show_default=True)
@click.option("--tol", default=None, type=float, help="[default: 1e-6 DT / 1e-4 CT]")
@click.option("--step", default=1e-2, show_default=True, help="CT integrator step.")
@_json_option
@_guard
def equiv(file1, file2, trials, horizon, seed, tol, step, as_json):
    """Empirical behavior-equivalence test between two systems."""
    report = behavior_equivalence_empirical(
        _read_system(file1),
        _read_system(file2),
        trials=trials,
        horizon=horizon,
        seed=seed,
        tol=tol,
        step=step,
    )
    if as_json:
        payload = _base_payload("equiv", None)
        payload["tolerances"]["equiv_tol"] = report.tolerance
        payload.update(
            {
                "passed": report.passed,
                "max_residual": report.max_residual,
                "trials": report.trials,
                "horizon": report.horizon,
                "seed": report.seed,
                "residuals": report.residuals,
                "rc_sys1": _rc_payload(report.rc_sys1),
                "rc_sys2": _rc_payload(report.rc_sys2),
                "note": report.note,
            }
        )
        _emit_json(payload)
        return
    click.echo(
        f"behavior equivalence: {'PASS' if report.passed else 'FAIL'} "
        f"(max residual {report.max_residual:.3e} vs tolerance {report.tolerance:.1e}, "
        f"{report.trials} trials, horizon {report.horizon})"
    )
    for name, rc in (("system 1", report.rc_sys1), ("system 2", report.rc_sys2)):
        click.echo(f"{name} {_rc_text(rc)}")
    click.echo(f"note: {report.note}")


@main.command()
@click.argument("system_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--trials", default=50, show_default=True)
@click.option("--window", required=True, type=float, help="Steps (DT) or end time (CT).")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the found scheduling signal document here.")
@_rank_rtol_option
@_json_option
@_guard
def reveal(system_file, trials, window, seed, out, rank_rtol, as_json):
    """Search for a scheduling signal revealing the state on a window."""
    rtol = _effective_rtol(rank_rtol)
    sys_ = _read_system(system_file)
    window_val = int(window) if sys_.domain == TimeDomain.DT else window
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        found = find_revealing_scheduling(sys_, trials, window_val, seed, rtol=rtol)
    diagnostics = [str(w.message) for w in caught]
    if as_json:
        payload = _base_payload("reveal", rtol)
        payload.update(
            {
                "found": found is not None,
                "window": window_val,
                "trials": trials,
                "seed": seed,
                "diagnostics": diagnostics,
                "scheduling": (
                    json.loads(serialize_signal(found[0])) if found else None
                ),
            }
        )
        _emit_json(payload)
    else:
        for msg in diagnostics:
            click.echo(f"diagnostic: {msg}")
        if found is None:
            click.echo("no revealing scheduling found")
        else:
            click.echo(f"found a revealing scheduling on window {found[1]}")
    if found and out:
        Path(out).write_text(serialize_signal(found[0]))
        click.echo(f"wrote {out}", err=as_json)


if __name__ == "__main__":
    main()
