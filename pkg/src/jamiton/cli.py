"""Command-line surface: scenario execution with file outputs.

Subcommands: solve (solitary wave), train (periodic), stability (band
report), sim (particle run), traj (trajectories from either source), compare
(theory vs simulation), sweep (existence map). Exit codes: 0 success, 2 a
meaningful negative result (no wave / no unstable band), 3 configuration
error, 4 numerical failure. Diagnostics go to stderr; data to files and
stdout.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import compare_profiles, trajectories_analytic, trajectories_sim
from .errors import (
    ConfigError,
    DensityOverflow,
    JamitonError,
    NoJamiton,
    NoUnstableBand,
    NothingToCompare,
)
from .model import critical_densities, desired_speed
from .output import (
    fmt,
    read_snapshots,
    write_compare_report,
    write_heatmap_svg,
    write_profile_csv,
    write_series_svg,
    write_sidecar,
    write_snapshots,
    write_sweep_csv,
    write_trajectories_csv,
)
from .particles import run as run_particles
from .scenario import Scenario, load_scenario, preset_scenario
from .waves import (
    cj_construct,
    match_ring_density,
    periodic_train,
    solitary_jamiton,
    sweep_existence,
)

__all__ = ["cli_dispatch", "main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamiton",
        description="Self-sustained traffic waves: exact construction and particle simulation",
    )
    parser.add_argument("--version", action="version", version=f"jamiton {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("solve", "construct solitary waves"),
        ("train", "construct a periodic wave train"),
        ("stability", "report the unstable density band"),
        ("sim", "run the ring particle simulation"),
        ("traj", "vehicle trajectories from theory or simulation output"),
        ("compare", "compare an exact train against simulation output"),
        ("sweep", "wave existence map over a density grid"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--preset", help="named preset scenario")
        p.add_argument("--config", help="scenario file path")
        p.add_argument("--out", default="jamiton-out", help="output directory (default: jamiton-out)")
        p.add_argument(
            "--seed-scale",
            type=float,
            default=1.0,
            help="particle count multiplier for convergence studies",
        )
        p.add_argument("--svg", action="store_true", help="also render convenience SVG views")
    return parser


def _load(args) -> Scenario:
    if (args.preset is None) == (args.config is None):
        raise ConfigError("exactly one of --preset or --config is required")
    if args.preset is not None:
        return preset_scenario(args.preset)
    return load_scenario(args.config)


def _scaled_sim(scenario: Scenario, seed_scale: float) -> Scenario:
    if scenario.task != "sim" or seed_scale == 1.0:
        return scenario
    from dataclasses import replace

    config = scenario.sim.config
    n_new = int(round(config.n_particles * seed_scale))
    scaled = replace(
        config,
        n_particles=n_new,
        mass_per_particle=config.mass_per_particle * config.n_particles / n_new,
    )
    return replace(scenario, sim=replace(scenario.sim, config=scaled))


def _task_params_check(scenario: Scenario, command: str) -> Scenario:
    if scenario.task == command:
        return scenario
    # A preset or file may serve other subcommands when only the model
    # constants are needed (stability, sweep with explicit grid is not).
    if command == "stability":
        from dataclasses import replace

        return replace(scenario, task="stability", solve=None, sim=None)
    raise ConfigError(
        f"scenario describes task '{scenario.task}' but subcommand is '{command}'"
    )


def cli_dispatch(argv) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        scenario = _load(args)
        scenario = _task_params_check(scenario, args.command)
        scenario = _scaled_sim(scenario, args.seed_scale)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        handler = {
            "solve": _run_solve,
            "train": _run_train,
            "stability": _run_stability,
            "sim": _run_sim,
            "traj": _run_traj,
            "compare": _run_compare,
            "sweep": _run_sweep,
        }[args.command]
        handler(scenario, out_dir, svg=args.svg)
        write_sidecar(scenario, out_dir, wall_time_s=time.monotonic() - started)
        return 0
    except (NoJamiton, NoUnstableBand) as exc:
        print(f"negative result: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except JamitonError as exc:
        diag = Path(args.out) / "diagnostics.txt"
        try:
            diag.parent.mkdir(parents=True, exist_ok=True)
            diag.write_text(f"{type(exc).__name__}: {exc}\n")
        except OSError:
            pass
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


def _run_solve(scenario: Scenario, out_dir: Path, *, svg: bool) -> None:
    params = scenario.params
    print("rho_minus_vpm,s_mps,m_vps,u_plus_mps,u_sonic_mps")
    profiles = []
    for rho in scenario.solve.rho_minus:
        solution = solitary_jamiton(params, rho)
        tag = f"{rho / params.rho_max:.4g}".replace(".", "p")
        write_profile_csv(solution, out_dir / f"profile_rho{tag}.csv")
        print(
            ",".join(
                (
                    fmt(rho),
                    fmt(solution.frame.s),
                    fmt(solution.frame.m),
                    fmt(solution.post_shock.u),
                    fmt(solution.sonic.u_s),
                )
            )
        )
        profiles.append((solution.x_of_eta(solution.eta), solution.rho / params.rho_max))
    if svg:
        write_series_svg(
            profiles, out_dir / "profiles.svg", x_label="x (m)", y_label="rho / rho_max"
        )


def _run_train(scenario: Scenario, out_dir: Path, *, svg: bool) -> None:
    params = scenario.params
    frame, _sonic = cj_construct(params, scenario.train.rho_minus)
    solution = periodic_train(params, frame, scenario.train.wavelength_eta)
    write_profile_csv(solution, out_dir / "train_profile.csv")
    print(f"s_mps={fmt(solution.frame.s)}")
    print(f"m_vps={fmt(solution.frame.m)}")
    print(f"u_plus_mps={fmt(solution.post_shock.u)}")
    print(f"wavelength_eta_mps={fmt(solution.wavelength_eta)}")
    if svg:
        write_series_svg(
            [(solution.x_of_eta(solution.eta), solution.rho / params.rho_max)],
            out_dir / "train_profile.svg",
            x_label="x (m)",
            y_label="rho / rho_max",
        )


def _run_stability(scenario: Scenario, out_dir: Path, *, svg: bool) -> None:
    params = scenario.params
    rho_lo, rho_hi = critical_densities(params)  # raises NoUnstableBand -> exit 2
    lines = [
        f"rho_lo_vpm={fmt(rho_lo)}",
        f"rho_hi_vpm={fmt(rho_hi)}",
        f"u_eq_at_lo_mps={fmt(desired_speed(params, rho_lo))}",
        f"u_eq_at_hi_mps={fmt(desired_speed(params, rho_hi))}",
    ]
    (out_dir / "stability_band.txt").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)


def _run_sim(scenario: Scenario, out_dir: Path, *, svg: bool) -> None:
    params = scenario.params
    config = scenario.sim.config
    try:
        snapshots = run_particles(config, params)
    except DensityOverflow as exc:
        if exc.snapshots:
            write_snapshots(exc.snapshots, out_dir / "snapshots")
        raise
    write_snapshots(snapshots, out_dir / "snapshots")
    print(f"snapshots={len(snapshots)}")
    print(f"t_final_s={fmt(snapshots[-1].t)}")
    if svg:
        grid = 256
        resampled = [s.resample(grid) for s in snapshots]
        write_heatmap_svg(
            [s.t for s in resampled],
            resampled[0].x,
            np.stack([s.rho for s in resampled]),
            out_dir / "spacetime_density.svg",
            x_label="x (m)",
            y_label="t (s)",
        )
        last = resampled[-1]
        write_series_svg(
            [(last.x, last.rho / params.rho_max)],
            out_dir / "final_density.svg",
            x_label="x (m)",
            y_label="rho / rho_max",
        )


def _run_traj(scenario: Scenario, out_dir: Path, *, svg: bool) -> None:
    params = scenario.params
    task = scenario.traj
    if task.source == "analytic":
        solution = solitary_jamiton(params, task.rho_minus)
        u_minus = solution.far.u
        drop = u_minus - solution.post_shock.u
        t_end = task.t_end
        if t_end is None:
            t_end = 3.0 * params.tau * solution.smooth_eta[-1] / max(u_minus - solution.frame.s, 1e-9)
        spacing = 0.6 * (u_minus - solution.frame.s) * t_end / max(task.n_tracers, 1)
        starts = [-spacing * (i + 1) for i in range(task.n_tracers)]
        trajectories = trajectories_analytic(solution, starts, (0.0, t_end))
        print(f"speed_drop_mps={fmt(drop)}")
    else:
        snap_dir = Path(task.sim_dir)
        if not snap_dir.is_dir():
            raise ConfigError(f"sim output directory not found: {snap_dir}")
        snaps = read_snapshots(snap_dir, _ring_length_from_sidecar(snap_dir))
        snaps = [s.resample(task.resample_cells) for s in snaps]
        length = snaps[0].ring_length
        starts = [(i + 0.5) * length / task.n_tracers for i in range(task.n_tracers)]
        trajectories = trajectories_sim(snaps, starts)
    write_trajectories_csv(trajectories, out_dir / "trajectories.csv")
    print(f"n_tracers={len(trajectories)}")
    if svg:
        write_series_svg(
            [(traj.t, traj.x) for traj in trajectories],
            out_dir / "trajectories.svg",
            x_label="t (s)",
            y_label="x (m)",
        )


def _ring_length_from_sidecar(snap_dir: Path) -> float:
    sidecar = snap_dir.parent / "run_metadata.cfg"
    if not sidecar.is_file():
        raise ConfigError(f"run sidecar not found next to snapshots: {sidecar}")
    scenario = load_scenario(sidecar)
    if scenario.task != "sim":
        raise ConfigError(f"sidecar {sidecar} does not describe a sim run")
    return scenario.sim.config.ring_length


def _run_compare(scenario: Scenario, out_dir: Path, *, svg: bool) -> None:
    params = scenario.params
    task = scenario.compare
    snap_dir = Path(task.sim_dir)
    if not snap_dir.is_dir():
        raise ConfigError(f"sim output directory not found: {snap_dir}")
    length = _ring_length_from_sidecar(snap_dir)
    snaps = read_snapshots(snap_dir, length)
    if not snaps:
        raise NothingToCompare("snapshot directory is empty")
    from .analysis import shock_positions

    n_waves = len(shock_positions(snaps[-1], task.threshold))
    if n_waves == 0:
        raise NothingToCompare("no wave detected in the final snapshot")
    rho_mean = float(np.trapezoid(
        np.concatenate((snaps[-1].rho, snaps[-1].rho[:1])),
        np.concatenate((snaps[-1].x, snaps[-1].x[:1] + length)),
    )) / length
    theory = match_ring_density(params, rho_mean, length / (n_waves * params.tau))
    result = compare_profiles(
        theory, snaps, cells_per_wave=task.cells_per_wave, threshold=task.threshold
    )
    write_compare_report(result, out_dir / "compare_report.txt")
    for key in ("linf_rel", "l2_rel", "speed_err_rel"):
        print(f"{key}={fmt(getattr(result, key))}")
    if svg:
        last = snaps[-1].resample(task.cells_per_wave * n_waves)
        th_x = np.mod(theory.x_of_eta(theory.eta) + result.offset, length)
        order = np.argsort(th_x)
        write_series_svg(
            [(last.x, last.rho), (th_x[order], theory.rho[order])],
            out_dir / "compare_profiles.svg",
            x_label="x (m)",
            y_label="rho (vehicles/m)",
        )


def _run_sweep(scenario: Scenario, out_dir: Path, *, svg: bool) -> None:
    params = scenario.params
    grid = np.linspace(scenario.sweep.lo, scenario.sweep.hi, scenario.sweep.points)
    result = sweep_existence(params, grid)
    write_sweep_csv(result, out_dir / "sweep.csv")
    if result.band_measured is not None:
        print(f"band_measured_vpm={fmt(result.band_measured[0])},{fmt(result.band_measured[1])}")
    if result.band_linear is not None:
        print(f"band_linear_vpm={fmt(result.band_linear[0])},{fmt(result.band_linear[1])}")
    print(f"s_monotone={int(result.s_monotone)}")
    if svg:
        existing = [(r.rho_minus, r.amplitude) for r in result.rows if r.exists]
        if existing:
            xs, amps = zip(*existing)
            write_series_svg(
                [(np.asarray(xs), np.asarray(amps))],
                out_dir / "sweep_amplitude.svg",
                x_label="rho_minus (vehicles/m)",
                y_label="amplitude (m/s)",
            )


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
