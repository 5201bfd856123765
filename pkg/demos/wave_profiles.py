"""Construct the five reference self-sustained waves and plot their profiles.

Each wave rides on a uniform far state with density fraction rho/rho_max in
{0.1, ..., 0.5}; the construction pins the wave speed through the sonic-point
regularity condition, attaches the shock from the wave-frame conservation
law, and integrates the smooth transonic flank. Output: one CSV per wave plus
an SVG overlay, written to demos/output/.
"""

import pathlib
import time

from jamiton import ModelParams, solitary_jamiton
from jamiton.output import write_profile_csv, write_series_svg

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

params = ModelParams.canonical()
fractions = (0.1, 0.2, 0.3, 0.4, 0.5)

print("fraction  s (m/s)    m (veh/s)  u_plus     u_sonic    rho_plus")
series = []
for frac in fractions:
    started = time.perf_counter()
    sol = solitary_jamiton(params, frac * params.rho_max)
    elapsed = time.perf_counter() - started
    write_profile_csv(sol, out_dir / f"profile_{int(frac * 100):02d}.csv")
    print(
        f"  {frac:.1f}    {sol.frame.s:+8.4f}  {sol.frame.m:9.5f}  "
        f"{sol.post_shock.u:8.4f}  {sol.sonic.u_s:8.4f}  {sol.post_shock.rho:8.5f}"
        f"   ({elapsed * 1e3:.0f} ms)"
    )
    series.append((sol.x_of_eta(sol.eta), sol.rho / params.rho_max))

write_series_svg(series, out_dir / "profiles.svg",
                 x_label="x (m)", y_label="rho / rho_max")
print(f"\nwrote {len(fractions)} profiles and profiles.svg under {out_dir}")
