"""File emission: CSV data, run sidecars, comparison reports, optional SVG.

CSV is the authoritative output format; every float is written with repr
(shortest round-trip form, locale independent), so identical runs produce
byte-identical files. The SVG renderer is a convenience view over the same
data, hand-rolled so its bytes are deterministic too.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from .analysis import ComparisonResult, Trajectory
from .errors import ConfigError
from .particles import FieldSnapshot
from .scenario import Scenario, scenario_lines
from .waves import JamitonSolution, SweepResult

__all__ = [
    "fmt",
    "write_profile_csv",
    "write_snapshots",
    "read_snapshots",
    "write_trajectories_csv",
    "write_sweep_csv",
    "write_compare_report",
    "write_sidecar",
    "write_series_svg",
    "write_heatmap_svg",
]


def fmt(value: float) -> str:
    return repr(float(value))


def write_profile_csv(solution: JamitonSolution, path, t: float = 0.0) -> Path:
    """Wave profile as eta_mps,x_m,u_mps,rho_vpm,sonic_flag,shock_flag rows."""
    path = Path(path)
    x = solution.x_of_eta(solution.eta, t)
    rows = ["eta_mps,x_m,u_mps,rho_vpm,sonic_flag,shock_flag"]
    for i in range(len(solution.eta)):
        rows.append(
            ",".join(
                (
                    fmt(solution.eta[i]),
                    fmt(x[i]),
                    fmt(solution.u[i]),
                    fmt(solution.rho[i]),
                    str(int(solution.sonic_flag[i])),
                    str(int(solution.shock_flag[i])),
                )
            )
        )
    path.write_text("\n".join(rows) + "\n")
    return path


def write_snapshots(snapshots: list[FieldSnapshot], out_dir) -> Path:
    """Snapshot series: one t_s,x_m,u_mps,rho_vpm file per snapshot plus an index."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    index = ["snapshot,t_s,file"]
    for k, snap in enumerate(snapshots):
        name = f"snap_{k:05d}.csv"
        rows = ["t_s,x_m,u_mps,rho_vpm"]
        t_str = fmt(snap.t)
        for i in range(len(snap.x)):
            rows.append(
                ",".join((t_str, fmt(snap.x[i]), fmt(snap.u[i]), fmt(snap.rho[i])))
            )
        (out_dir / name).write_text("\n".join(rows) + "\n")
        index.append(f"{k},{t_str},{name}")
    (out_dir / "index.csv").write_text("\n".join(index) + "\n")
    return out_dir


def read_snapshots(snap_dir, ring_length: float) -> list[FieldSnapshot]:
    """Snapshot series back from an output directory written by write_snapshots."""
    snap_dir = Path(snap_dir)
    index = snap_dir / "index.csv"
    if not index.is_file():
        raise ConfigError(f"snapshot index not found: {index}")
    snaps = []
    for line in index.read_text().splitlines()[1:]:
        _k, t_str, name = line.split(",")
        body = (snap_dir / name).read_text().splitlines()[1:]
        data = np.array([[float(v) for v in row.split(",")] for row in body])
        snaps.append(
            FieldSnapshot(
                t=float(t_str),
                x=data[:, 1],
                u=data[:, 2],
                rho=data[:, 3],
                ring_length=ring_length,
            )
        )
    return snaps


def write_trajectories_csv(trajectories: list[Trajectory], path) -> Path:
    path = Path(path)
    rows = ["vehicle_id,t_s,x_m,u_mps"]
    for traj in trajectories:
        for i in range(len(traj.t)):
            rows.append(
                ",".join((str(traj.vehicle_id), fmt(traj.t[i]), fmt(traj.x[i]), fmt(traj.u[i])))
            )
    path.write_text("\n".join(rows) + "\n")
    return path


def write_sweep_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    rows = ["rho_minus_vpm,exists,s_mps,m_vps,amplitude_mps,reason"]
    for row in result.rows:
        rows.append(
            ",".join(
                (
                    fmt(row.rho_minus),
                    "1" if row.exists else "0",
                    fmt(row.s),
                    fmt(row.m),
                    fmt(row.amplitude),
                    f'"{row.reason}"' if row.reason else "",
                )
            )
        )
    path.write_text("\n".join(rows) + "\n")
    return path


def write_compare_report(result: ComparisonResult, path) -> Path:
    """Comparison report: the three error numbers plus the alignment offset."""
    path = Path(path)
    lines = [
        f"linf_rel={fmt(result.linf_rel)}",
        f"l2_rel={fmt(result.l2_rel)}",
        f"speed_err_rel={fmt(result.speed_err_rel)}",
        f"alignment_offset_m={fmt(result.offset)}",
        f"n_waves={result.n_waves}",
        f"measured_speed_mps={fmt(result.measured_speed)}",
        f"theory_speed_mps={fmt(result.theory_speed)}",
    ]
    path.write_text("\n".join(lines) + "\n")
    return path


def write_sidecar(scenario: Scenario, out_dir, *, wall_time_s: float | None = None) -> Path:
    """Run metadata sidecar: a re-loadable scenario echo plus provenance comments.

    The data files of a run are reproducible byte-for-byte by re-running the
    scenario held in this file; the comment lines (version, wall time) are
    informational and ignored by the loader.
    """
    from . import __version__

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"# jamiton {__version__}"]
    if wall_time_s is not None:
        lines.append(f"# wall_time_s={wall_time_s:.3f}")
    lines.append(f"# written={time.strftime('%Y-%m-%dT%H:%M:%S%z')}")
    lines.extend(scenario_lines(scenario))
    path = out_dir / "run_metadata.cfg"
    path.write_text("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# Minimal deterministic SVG rendering (convenience views; CSV stays authoritative).

_W, _H = 720, 420
_ML, _MR, _MT, _MB = 62, 16, 18, 44
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _scaled(values, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return out_lo + (np.asarray(values, dtype=float) - lo) * (out_hi - out_lo) / span


def _axes(x_label: str, y_label: str, xlo, xhi, ylo, yhi) -> list[str]:
    parts = [
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" height="{_H - _MT - _MB}" '
        f'fill="none" stroke="#333" stroke-width="1"/>'
    ]
    for i in range(5):
        fx = xlo + (xhi - xlo) * i / 4.0
        px = _ML + (_W - _ML - _MR) * i / 4.0
        fy = ylo + (yhi - ylo) * i / 4.0
        py = _H - _MB - (_H - _MT - _MB) * i / 4.0
        parts.append(
            f'<text x="{px:.1f}" y="{_H - _MB + 16}" font-size="11" text-anchor="middle" '
            f'fill="#333">{fx:.4g}</text>'
        )
        parts.append(
            f'<text x="{_ML - 6}" y="{py + 4:.1f}" font-size="11" text-anchor="end" '
            f'fill="#333">{fy:.4g}</text>'
        )
    parts.append(
        f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 8}" font-size="12" text-anchor="middle" '
        f'fill="#000">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{(_MT + _H - _MB) / 2}" font-size="12" text-anchor="middle" '
        f'fill="#000" transform="rotate(-90 14 {(_MT + _H - _MB) / 2})">{y_label}</text>'
    )
    return parts


def write_series_svg(series, path, *, x_label: str, y_label: str) -> Path:
    """Polyline plot of one or more (x, y) series."""
    path = Path(path)
    xlo = min(float(np.min(x)) for x, _ in series)
    xhi = max(float(np.max(x)) for x, _ in series)
    ylo = min(float(np.min(y)) for _, y in series)
    yhi = max(float(np.max(y)) for _, y in series)
    pad = 0.05 * (yhi - ylo if yhi > ylo else 1.0)
    ylo, yhi = ylo - pad, yhi + pad
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="#fff"/>',
    ]
    parts.extend(_axes(x_label, y_label, xlo, xhi, ylo, yhi))
    for k, (x, y) in enumerate(series):
        px = _scaled(x, xlo, xhi, _ML, _W - _MR)
        py = _scaled(y, ylo, yhi, _H - _MB, _MT)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{_COLORS[k % len(_COLORS)]}" '
            f'stroke-width="1.3"/>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
    return path


def write_heatmap_svg(times, grid_x, values, path, *, x_label: str, y_label: str) -> Path:
    """Space-time heat map (grayscale, dark = dense) from row-per-time values."""
    path = Path(path)
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo if hi > lo else 1.0
    n_t, n_x = values.shape
    cell_w = (_W - _ML - _MR) / n_x
    cell_h = (_H - _MT - _MB) / n_t
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="#fff"/>',
    ]
    parts.extend(
        _axes(x_label, y_label, float(grid_x[0]), float(grid_x[-1]), float(times[0]), float(times[-1]))
    )
    for i in range(n_t):
        y = _H - _MB - (i + 1) * cell_h
        for j in range(n_x):
            shade = int(round(235.0 * (1.0 - (values[i, j] - lo) / span)))
            parts.append(
                f'<rect x="{_ML + j * cell_w:.2f}" y="{y:.2f}" width="{cell_w + 0.5:.2f}" '
                f'height="{cell_h + 0.5:.2f}" fill="rgb({shade},{shade},{shade})"/>'
            )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
    return path
