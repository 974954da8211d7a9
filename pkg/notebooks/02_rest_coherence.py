"""
Coherence extracted by a detector at rest
=========================================

A two-level detector with gap Omega sits still in a coherent field of
energy E and interacts for a Gaussian time T.  In reduced units the
coherence C/g depends on E/Omega and Omega T only.
"""

# %%
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from udcoherence import (
    DetectorConfig,
    GridSpec,
    Rest,
    coherence_numeric,
    coherence_rest_closed_form,
    reduce_parameters,
    sweep_grid,
)
from udcoherence.qfield import SHORT_TIME_LIMIT

# %% [markdown]
# Physical inputs are reduced first.  A 2 GHz gap, a field energy of
# 1 GHz and a 0.5 ns interaction give E/Omega = 0.5 and Omega T = 1.

# %%
e_bar, t_bar = reduce_parameters(DetectorConfig(omega=2.0), energy=1.0, duration=0.5)
print("e_bar, t_bar =", e_bar, t_bar)

# %% [markdown]
# The rest case has a closed form.  Brute-force quadrature over proper
# time agrees with it.

# %%
exact = coherence_rest_closed_form(e_bar, t_bar)
numeric = coherence_numeric(Rest(), e_bar, t_bar, rel_tol=1e-10)
print(f"closed form {exact.c_over_g:.12f}  quadrature {numeric.c_over_g:.12f}")

# %% [markdown]
# Very short interactions extract the same amount no matter what the
# field energy is.

# %%
for e in (0.01, 0.25, 1.0, 4.0):
    print(f"E/Omega = {e:<5} C/g(T -> 0) = {coherence_rest_closed_form(e, 1e-4).c_over_g:.6f}")
print("limit           ", SHORT_TIME_LIMIT)

# %% [markdown]
# The whole (E, T) plane.  Coherence always decays with T, but fields
# with E close to Omega hold on to it longest.

# %%
grid = sweep_grid(Rest(), GridSpec(0.1, 5.0, 0.1, 5.0, 120, 120))
print(f"{grid.meta['seconds']:.2f} s for {grid.values.size} cells")

fig, ax = plt.subplots(figsize=(5.5, 4.5))
mesh = ax.pcolormesh(grid.spec.t_axis, grid.spec.e_axis, grid.values, shading="auto")
fig.colorbar(mesh, label="C/g")
ax.set_xlabel(r"$\Omega T$")
ax.set_ylabel(r"$E/\Omega$")
fig.tight_layout()
fig.savefig("rest_coherence.png", dpi=120)
