"""Scenario files: strict flat key=value configuration with unit-suffixed keys.

Every dimensional key carries its unit in the name (beta_m2ps2, tau_s,
ring_length_m, ...); unknown keys are rejected with the key name and line
number, and a bare key missing its suffix gets a hint. Two presets resolve by
name: "paper-fig1" (five reference wave constructions on the canonical
constants) and "sugiyama-ring" (a 230 m ring carrying 22 vehicles).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, DomainError
from .model import ModelParams
from .particles import Perturbation, SimConfig

__all__ = [
    "Scenario",
    "SolveTask",
    "TrainTask",
    "SimTask",
    "TrajTask",
    "CompareTask",
    "SweepTask",
    "load_scenario",
    "loads_scenario",
    "preset_scenario",
    "scenario_lines",
    "PRESET_NAMES",
]

TASKS = ("solve", "train", "stability", "sim", "traj", "compare", "sweep")
PRESET_NAMES = ("paper-fig1", "sugiyama-ring")

# key -> (type, block); block "model"/"global" or the task it belongs to.
_SCHEMA = {
    "task": (str, "global"),
    "preset": (str, "global"),
    "beta_m2ps2": (float, "model"),
    "rho_max_vpm": (float, "model"),
    "u0_mps": (float, "model"),
    "tau_s": (float, "model"),
    "rho_minus_vpm": ("floats", ("solve", "train", "traj")),
    "wavelength_eta_mps": (float, ("train",)),
    "wavelength_x_m": (float, ("train",)),
    "n_particles": (int, ("sim",)),
    "ring_length_m": (float, ("sim",)),
    "rho0_vpm": (float, ("sim",)),
    "mass_per_particle_veh": (float, ("sim",)),
    "cfl": (float, ("sim",)),
    "visc_coeff": (float, ("sim",)),
    "perturb_mode": (int, ("sim",)),
    "perturb_amplitude": (float, ("sim",)),
    "t_end_s": (float, ("sim", "traj")),
    "output_every_s": (float, ("sim",)),
    "traj_source": (str, ("traj",)),
    "n_tracers": (int, ("traj",)),
    "sim_dir": (str, ("traj", "compare")),
    "resample_cells": (int, ("traj",)),
    "cells_per_wave": (int, ("compare",)),
    "detect_threshold": (float, ("compare",)),
    "sweep_lo_vpm": (float, ("sweep",)),
    "sweep_hi_vpm": (float, ("sweep",)),
    "sweep_points": (int, ("sweep",)),
}

# Bare stems that hint at the suffixed key.
_SUFFIX_HINTS = {
    "beta": "beta_m2ps2",
    "rho_max": "rho_max_vpm",
    "u0": "u0_mps",
    "tau": "tau_s",
    "rho_minus": "rho_minus_vpm",
    "wavelength_eta": "wavelength_eta_mps",
    "wavelength_x": "wavelength_x_m",
    "ring_length": "ring_length_m",
    "rho0": "rho0_vpm",
    "t_end": "t_end_s",
    "output_every": "output_every_s",
    "sweep_lo": "sweep_lo_vpm",
    "sweep_hi": "sweep_hi_vpm",
}


@dataclass(frozen=True)
class SolveTask:
    rho_minus: tuple[float, ...]


@dataclass(frozen=True)
class TrainTask:
    rho_minus: float
    wavelength_eta: float


@dataclass(frozen=True)
class SimTask:
    config: SimConfig


@dataclass(frozen=True)
class TrajTask:
    source: str  # "analytic" | "sim"
    n_tracers: int
    rho_minus: float | None = None
    t_end: float | None = None
    sim_dir: str | None = None
    resample_cells: int = 256


@dataclass(frozen=True)
class CompareTask:
    sim_dir: str
    cells_per_wave: int = 64
    threshold: float = 5.0


@dataclass(frozen=True)
class SweepTask:
    lo: float
    hi: float
    points: int


@dataclass(frozen=True)
class Scenario:
    """A validated run description: model constants plus one task block."""

    params: ModelParams
    task: str
    preset: str | None = None
    solve: SolveTask | None = None
    train: TrainTask | None = None
    sim: SimTask | None = None
    traj: TrajTask | None = None
    compare: CompareTask | None = None
    sweep: SweepTask | None = None


def _parse_value(key: str, raw: str, line_no: int):
    kind = _SCHEMA[key][0]
    try:
        if kind is float:
            return float(raw)
        if kind is int:
            value = int(raw)
            return value
        if kind == "floats":
            return tuple(float(part) for part in raw.split(","))
        return raw.strip()
    except ValueError:
        raise ConfigError(f"line {line_no}: key '{key}' has malformed value '{raw}'") from None


def loads_scenario(text: str, *, source: str = "<string>") -> Scenario:
    """Parse scenario text; see load_scenario for the file-based form."""
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}, line {line_no}: expected key=value, got '{stripped}'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _SCHEMA:
            hint = _SUFFIX_HINTS.get(key)
            if hint is not None:
                raise ConfigError(
                    f"{source}, line {line_no}: key '{key}' is missing its unit suffix; "
                    f"use '{hint}'"
                )
            raise ConfigError(f"{source}, line {line_no}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{source}, line {line_no}: duplicate key '{key}'")
        values[key] = _parse_value(key, raw, line_no)
        lines[key] = line_no

    if "preset" in values:
        preset = values.pop("preset")
        base = preset_scenario(str(preset))
        if len(values) > 0:
            extra = ", ".join(sorted(values))
            raise ConfigError(
                f"{source}: preset scenarios take no extra keys (got {extra}); "
                "copy the preset echo and edit it instead"
            )
        return base

    def fail(key: str, exc: Exception):
        where = f", line {lines[key]}" if key in lines else ""
        raise ConfigError(f"{source}{where}: key '{key}': {exc}") from None

    for key in ("beta_m2ps2", "rho_max_vpm", "u0_mps", "tau_s", "task"):
        if key not in values:
            raise ConfigError(f"{source}: missing required key '{key}'")
    try:
        params = ModelParams(
            beta=values["beta_m2ps2"],
            rho_max=values["rho_max_vpm"],
            u0=values["u0_mps"],
            tau=values["tau_s"],
        )
    except DomainError as exc:
        for key in ("beta_m2ps2", "rho_max_vpm", "u0_mps", "tau_s"):
            if str(exc).startswith(_MODEL_FIELD[key]):
                fail(key, exc)
        raise ConfigError(f"{source}: {exc}") from None

    task = str(values["task"])
    if task not in TASKS:
        fail("task", ValueError(f"must be one of {', '.join(TASKS)}"))

    used = {"beta_m2ps2", "rho_max_vpm", "u0_mps", "tau_s", "task"}
    block_keys = {k for k in values if k not in used}
    for key in block_keys:
        blocks = _SCHEMA[key][1]
        if blocks not in ("global", "model") and task not in blocks:
            fail(key, ValueError(f"not a '{task}' task key"))

    builder = {
        "solve": _build_solve,
        "train": _build_train,
        "stability": _build_stability,
        "sim": _build_sim,
        "traj": _build_traj,
        "compare": _build_compare,
        "sweep": _build_sweep,
    }[task]
    return builder(params, values, fail, source)


_MODEL_FIELD = {
    "beta_m2ps2": "beta",
    "rho_max_vpm": "rho_max",
    "u0_mps": "u0",
    "tau_s": "tau",
}


def _require(values, key, fail, source):
    if key not in values:
        raise ConfigError(f"{source}: task block is missing required key '{key}'")
    return values[key]


def _build_solve(params, values, fail, source):
    rhos = _require(values, "rho_minus_vpm", fail, source)
    for r in rhos:
        if not (0.0 < r < params.rho_max):
            fail("rho_minus_vpm", ValueError(f"{r} outside (0, rho_max)"))
    return Scenario(params=params, task="solve", solve=SolveTask(rho_minus=tuple(rhos)))


def _build_train(params, values, fail, source):
    rhos = _require(values, "rho_minus_vpm", fail, source)
    if len(rhos) != 1:
        fail("rho_minus_vpm", ValueError("train takes a single density"))
    if ("wavelength_eta_mps" in values) == ("wavelength_x_m" in values):
        raise ConfigError(
            f"{source}: train needs exactly one of wavelength_eta_mps, wavelength_x_m"
        )
    lam = values.get("wavelength_eta_mps", None)
    if lam is None:
        lam = values["wavelength_x_m"] / params.tau
    if lam <= 0:
        fail("wavelength_eta_mps" if "wavelength_eta_mps" in values else "wavelength_x_m",
             ValueError("must be positive"))
    return Scenario(
        params=params, task="train", train=TrainTask(rho_minus=rhos[0], wavelength_eta=lam)
    )


def _build_stability(params, values, fail, source):
    return Scenario(params=params, task="stability")


def _build_sim(params, values, fail, source):
    n = _require(values, "n_particles", fail, source)
    length = _require(values, "ring_length_m", fail, source)
    if ("rho0_vpm" in values) == ("mass_per_particle_veh" in values):
        raise ConfigError(
            f"{source}: sim needs exactly one of rho0_vpm, mass_per_particle_veh"
        )
    mu = values.get("mass_per_particle_veh")
    if mu is None:
        mu = values["rho0_vpm"] * length / n
    t_end = _require(values, "t_end_s", fail, source)
    output_every = _require(values, "output_every_s", fail, source)
    try:
        config = SimConfig(
            n_particles=n,
            ring_length=length,
            mass_per_particle=mu,
            t_end=t_end,
            output_every=output_every,
            cfl=values.get("cfl", 0.5),
            visc_coeff=values.get("visc_coeff", 1.0),
            perturbation=Perturbation(
                mode=values.get("perturb_mode", 1),
                amplitude=values.get("perturb_amplitude", 0.0),
            ),
        )
        config.validate_against(params)
    except DomainError as exc:
        raise ConfigError(f"{source}: sim block invalid: {exc}") from None
    return Scenario(params=params, task="sim", sim=SimTask(config=config))


def _build_traj(params, values, fail, source):
    src = values.get("traj_source", "analytic")
    if src not in ("analytic", "sim"):
        fail("traj_source", ValueError("must be 'analytic' or 'sim'"))
    n_tracers = values.get("n_tracers", 8)
    if n_tracers < 1:
        fail("n_tracers", ValueError("must be >= 1"))
    if src == "analytic":
        rhos = _require(values, "rho_minus_vpm", fail, source)
        if len(rhos) != 1:
            fail("rho_minus_vpm", ValueError("analytic trajectories take a single density"))
        return Scenario(
            params=params,
            task="traj",
            traj=TrajTask(
                source=src,
                n_tracers=n_tracers,
                rho_minus=rhos[0],
                t_end=values.get("t_end_s", None),
            ),
        )
    sim_dir = _require(values, "sim_dir", fail, source)
    return Scenario(
        params=params,
        task="traj",
        traj=TrajTask(
            source=src,
            n_tracers=n_tracers,
            sim_dir=sim_dir,
            resample_cells=values.get("resample_cells", 256),
        ),
    )


def _build_compare(params, values, fail, source):
    sim_dir = _require(values, "sim_dir", fail, source)
    return Scenario(
        params=params,
        task="compare",
        compare=CompareTask(
            sim_dir=sim_dir,
            cells_per_wave=values.get("cells_per_wave", 64),
            threshold=values.get("detect_threshold", 5.0),
        ),
    )


def _build_sweep(params, values, fail, source):
    lo = _require(values, "sweep_lo_vpm", fail, source)
    hi = _require(values, "sweep_hi_vpm", fail, source)
    points = _require(values, "sweep_points", fail, source)
    if not (0.0 < lo < hi < params.rho_max):
        raise ConfigError(f"{source}: sweep bounds must satisfy 0 < lo < hi < rho_max")
    if points < 2:
        fail("sweep_points", ValueError("must be >= 2"))
    return Scenario(params=params, task="sweep", sweep=SweepTask(lo=lo, hi=hi, points=points))


def load_scenario(path) -> Scenario:
    """Load and validate a scenario file.

    Raises ConfigError naming the offending key and line on any problem:
    unknown key, missing unit suffix, malformed value, or a violated
    invariant of the referenced module types.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"scenario file not found: {p}")
    return loads_scenario(p.read_text(), source=str(p))


def preset_scenario(name: str) -> Scenario:
    """Named preset scenarios; see PRESET_NAMES."""
    if name == "paper-fig1":
        params = ModelParams.canonical()
        fracs = (0.1, 0.2, 0.3, 0.4, 0.5)
        return Scenario(
            params=params,
            task="solve",
            preset=name,
            solve=SolveTask(rho_minus=tuple(f * params.rho_max for f in fracs)),
        )
    if name == "sugiyama-ring":
        params = ModelParams.canonical()
        ring_length = 230.0
        vehicles = 22.0
        config = SimConfig.for_ring(
            n_particles=2500,
            ring_length=ring_length,
            rho0=vehicles / ring_length,
            t_end=150.0,
            output_every=5.0,
            cfl=0.5,
            visc_coeff=1.0,
            perturbation=Perturbation(mode=1, amplitude=0.01),
        )
        return Scenario(params=params, task="sim", preset=name, sim=SimTask(config=config))
    raise ConfigError(f"unknown preset '{name}'; available: {', '.join(PRESET_NAMES)}")


def scenario_lines(scenario: Scenario) -> list[str]:
    """Flat key=value lines that re-load to an identical Scenario.

    Preset-built scenarios serialize as the preset reference, with the full
    configuration echoed in comment lines for the record.
    """
    p = scenario.params
    lines = [
        f"task={scenario.task}",
        f"beta_m2ps2={p.beta!r}",
        f"rho_max_vpm={p.rho_max!r}",
        f"u0_mps={p.u0!r}",
        f"tau_s={p.tau!r}",
    ]
    if scenario.task == "solve":
        lines.append("rho_minus_vpm=" + ",".join(repr(r) for r in scenario.solve.rho_minus))
    elif scenario.task == "train":
        lines.append(f"rho_minus_vpm={scenario.train.rho_minus!r}")
        lines.append(f"wavelength_eta_mps={scenario.train.wavelength_eta!r}")
    elif scenario.task == "sim":
        c = scenario.sim.config
        lines += [
            f"n_particles={c.n_particles}",
            f"ring_length_m={c.ring_length!r}",
            f"mass_per_particle_veh={c.mass_per_particle!r}",
            f"cfl={c.cfl!r}",
            f"visc_coeff={c.visc_coeff!r}",
            f"perturb_mode={c.perturbation.mode}",
            f"perturb_amplitude={c.perturbation.amplitude!r}",
            f"t_end_s={c.t_end!r}",
            f"output_every_s={c.output_every!r}",
        ]
    elif scenario.task == "traj":
        t = scenario.traj
        lines.append(f"traj_source={t.source}")
        lines.append(f"n_tracers={t.n_tracers}")
        if t.source == "analytic":
            lines.append(f"rho_minus_vpm={t.rho_minus!r}")
            if t.t_end is not None:
                lines.append(f"t_end_s={t.t_end!r}")
        else:
            lines.append(f"sim_dir={t.sim_dir}")
            lines.append(f"resample_cells={t.resample_cells}")
    elif scenario.task == "compare":
        c = scenario.compare
        lines += [
            f"sim_dir={c.sim_dir}",
            f"cells_per_wave={c.cells_per_wave}",
            f"detect_threshold={c.threshold!r}",
        ]
    elif scenario.task == "sweep":
        s = scenario.sweep
        lines += [
            f"sweep_lo_vpm={s.lo!r}",
            f"sweep_hi_vpm={s.hi!r}",
            f"sweep_points={s.points}",
        ]
    if scenario.preset is not None:
        return [f"preset={scenario.preset}"] + [f"# {line}" for line in lines]
    return lines
