"""
Swelling for a uniformly accelerated detector
=============================================

No closed form here: each cell is a proper-time quadrature along the
hyperbolic worldline.  The sweep is spread over worker processes, and
the result does not depend on how many there are.
"""

# %%
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.colors import TwoSlopeNorm
import numpy as np

from udcoherence import (
    GridSpec,
    Rest,
    UniformAcceleration,
    coherence_accelerated,
    coherence_rest_closed_form,
    diff_grid,
    swelling_regions,
    sweep_grid,
)

# %% [markdown]
# Tiny accelerations reproduce the rest result.

# %%
for a in (1e-1, 1e-2, 1e-3):
    print(f"a/Omega = {a:g}: C/g = {coherence_accelerated(1.0, 1.0, a).c_over_g:.10f}")
print(f"rest:          C/g = {coherence_rest_closed_form(1.0, 1.0).c_over_g:.10f}")

# %% [markdown]
# A 40 x 40 map at a/Omega = 2.  Bump the grid to 80 x 80 for a sharper
# picture; it takes about four times as long.

# %%
workers = os.cpu_count() or 1
spec = GridSpec(0.1, 5.0, 0.1, 5.0, 40, 40)
acc = sweep_grid(UniformAcceleration(2.0), spec, workers=workers)
print(f"{acc.meta['seconds']:.1f} s on {workers} worker(s), {acc.meta['flagged']} flagged")
d = diff_grid(acc, sweep_grid(Rest(), spec))
report = swelling_regions(d, threshold=0.0)
print(len(report.components), "swelling components")
for comp in report.components:
    print(f"  E in {comp.e_bar_range}, T in {comp.t_bar_range}")

# %%
fig, ax = plt.subplots(figsize=(5.5, 4.5))
lim = np.max(np.abs(d.values))
mesh = ax.pcolormesh(spec.t_axis, spec.e_axis, d.values, shading="auto", cmap="RdBu_r",
                     norm=TwoSlopeNorm(0.0, -lim, lim))
ax.contour(spec.t_axis, spec.e_axis, d.values, levels=[0.0], colors="k", linewidths=0.8)
fig.colorbar(mesh, label=r"$(C_a - C_0)/g$")
ax.set_xlabel(r"$\Omega T$")
ax.set_ylabel(r"$E/\Omega$")
fig.tight_layout()
fig.savefig("acceleration_swelling.png", dpi=120)
