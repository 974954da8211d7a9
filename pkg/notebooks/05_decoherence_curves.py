"""
Decoherence with interaction time
=================================

Fix a weak field, E = Omega/4, and follow C/g as the interaction gets
longer.  All three detectors start from the same value; the moving ones
lose coherence more slowly.
"""

# %%
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from udcoherence import ConstantVelocity, Rest, UniformAcceleration, decoherence_curve
from udcoherence import formats

trajs = [Rest(), ConstantVelocity(0.8), UniformAcceleration(2.0)]
curve = decoherence_curve(trajs, 0.25, (0.05, 5.0), 100)

# %%
rest = curve.values[:, 0]
for k, tag in enumerate(curve.tags[1:], start=1):
    ahead = curve.values[:, k] - rest > curve.errors[:, k] + curve.errors[:, 0]
    print(f"{tag}: above rest for T >= {curve.t_bar[ahead].min():.2f}")

# %% [markdown]
# The same data as a CSV file, one column per trajectory.

# %%
formats.write(curve, "decoherence_curves.csv")
print(open("decoherence_curves.csv").read().splitlines()[0])

# %%
fig, ax = plt.subplots(figsize=(5.5, 4))
for k, tag in enumerate(curve.tags):
    ax.plot(curve.t_bar, curve.values[:, k], label=tag)
ax.set_xlabel(r"$\Omega T$")
ax.set_ylabel("C/g")
ax.legend()
fig.tight_layout()
fig.savefig("decoherence_curves.png", dpi=120)
