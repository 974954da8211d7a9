"""
Swelling for a detector in uniform motion
=========================================

An inertial detector sees the right- and left-moving parts of the field
Doppler shifted.  The result is the average of two rest results at
shifted energies, so it can beat the rest value in places.
"""

# %%
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.colors import TwoSlopeNorm
import numpy as np

from udcoherence import (
    ConstantVelocity,
    GridSpec,
    Rest,
    coherence_numeric,
    coherence_velocity_closed_form,
    diff_grid,
    swelling_regions,
    sweep_grid,
)
from udcoherence.qfield import coherence_rest_with_amplitude, doppler_amplitude

# %% [markdown]
# Three ways to get the same number at upsilon = 0.8: the Doppler closed
# form, quadrature along the moving worldline, and a detector at rest in
# the Doppler-reshaped field.  The last one is slow.

# %%
v, e, t = 0.8, 1.0, 1.0
print("closed form  ", coherence_velocity_closed_form(e, t, v).c_over_g)
print("worldline    ", coherence_numeric(ConstantVelocity(v), e, t).c_over_g)
print("rest, doppler", coherence_rest_with_amplitude(lambda q: doppler_amplitude(e, v, q),
                                                     t).c_over_g)

# %% [markdown]
# Motion minus rest over the plane.  Cells count as swelling only when
# the difference beats its own error bound.

# %%
spec = GridSpec(0.1, 5.0, 0.1, 5.0, 80, 80)
d = diff_grid(sweep_grid(ConstantVelocity(v), spec), sweep_grid(Rest(), spec))
report = swelling_regions(d, threshold=0.0)
for k, comp in enumerate(report.components):
    print(f"component {k}: {len(comp.cells)} cells, E in {comp.e_bar_range}, "
          f"T in {comp.t_bar_range}, peak dC/g = {comp.peak[4]:.4f}")

# %%
fig, ax = plt.subplots(figsize=(5.5, 4.5))
lim = np.max(np.abs(d.values))
mesh = ax.pcolormesh(spec.t_axis, spec.e_axis, d.values, shading="auto", cmap="RdBu_r",
                     norm=TwoSlopeNorm(0.0, -lim, lim))
ax.contour(spec.t_axis, spec.e_axis, d.values, levels=[0.0], colors="k", linewidths=0.8)
fig.colorbar(mesh, label=r"$(C_\upsilon - C_0)/g$")
ax.set_xlabel(r"$\Omega T$")
ax.set_ylabel(r"$E/\Omega$")
fig.tight_layout()
fig.savefig("velocity_swelling.png", dpi=120)
