"""Map the unstable density band and the waves that live inside it.

Linear stability of uniform flow flips where the kinematic wave speed leaves
the characteristic fan; the same band bounds where self-sustained waves
exist. The sweep below reports both boundaries side by side and the wave
amplitude across the band.
"""

import pathlib

import numpy as np

from jamiton import ModelParams, critical_densities, sweep_existence
from jamiton.output import write_series_svg, write_sweep_csv

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

params = ModelParams.canonical()
lo, hi = critical_densities(params)
print(f"linear-stability band: rho in ({lo:.6f}, {hi:.6f}) vehicles/m")
print(f"  in jam-density units: ({lo / params.rho_max:.4f}, {hi / params.rho_max:.4f})")

grid = np.linspace(0.002, 0.198, 50)
result = sweep_existence(params, grid)
write_sweep_csv(result, out_dir / "sweep.csv")

print(f"wave-existence band on the grid: {result.band_measured}")
print(f"wave speed monotone across the band: {result.s_monotone}")

on = [(r.rho_minus, r.amplitude, r.s) for r in result.rows if r.exists]
rho_on = np.array([r[0] for r in on])
amp_on = np.array([r[1] for r in on])
s_on = np.array([r[2] for r in on])
write_series_svg([(rho_on, amp_on)], out_dir / "amplitude_vs_density.svg",
                 x_label="rho_minus (veh/m)", y_label="speed drop u- - u+ (m/s)")
write_series_svg([(rho_on, s_on)], out_dir / "wave_speed_vs_density.svg",
                 x_label="rho_minus (veh/m)", y_label="wave speed s (m/s)")
print(f"wrote sweep.csv and two SVG views under {out_dir}")
print(f"waves move backward (s < 0) above rho = {rho_on[np.argmin(np.abs(s_on))]:.4f} veh/m")
