"""
Special functions behind the coherence integrals
================================================

Everything downstream rests on three small pieces: a gamma function, an
exponentially scaled modified Bessel function of order -1/4, and the
field kernel K(y).  This script pokes at each of them.
"""

# %%
import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from udcoherence.qfield import KERNEL_AT_ZERO, kernel, kernel_direct
from udcoherence.specfun import bessel_i_scaled, gamma_real, integrate_adaptive

# %% [markdown]
# Gamma at a few familiar points.  Gamma(1/2) should be sqrt(pi).

# %%
for x in (0.25, 0.5, 0.75, 1.0, 5.5):
    print(f"Gamma({x:<4}) = {gamma_real(x):.15f}")
print("sqrt(pi)     =", f"{math.sqrt(math.pi):.15f}")

# %% [markdown]
# The scaled Bessel function e^{-z} I_{-1/4}(z) stays finite for huge z,
# where I_{-1/4}(z) itself would overflow.  For large z it approaches
# 1/sqrt(2 pi z).

# %%
zs = np.geomspace(1e-3, 1e4, 400)
bz = np.array([bessel_i_scaled(-0.25, z) for z in zs])
print("z = 1e4:", bz[-1], " vs 1/sqrt(2 pi z) =", 1 / math.sqrt(2 * math.pi * 1e4))

# %% [markdown]
# The kernel K(y) is tabulated once per process.  Compare the table with
# the defining integral at a handful of points.

# %%
for y in (0.0, 0.5, 2.0, 7.3, 12.0):
    direct = kernel_direct(y).value
    print(f"K({y:>4}) table {float(kernel(y)):.15f}  direct {direct:.15f}")
print("K(0) exact    ", KERNEL_AT_ZERO)

# %% [markdown]
# The adaptive rule handles complex, oscillatory integrands directly.

# %%
res = integrate_adaptive(lambda x: np.exp(3j * x) * np.exp(-x * x), -6.0, 6.0,
                         rel_tol=1e-12)
print("Int exp(3ix - x^2) dx =", res.value, " exact", math.sqrt(math.pi) * math.exp(-2.25))
print("evaluations:", res.evaluations)

# %%
ys = np.linspace(0, 20, 800)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.loglog(zs, bz)
ax1.set_xlabel("z")
ax1.set_ylabel(r"$e^{-z} I_{-1/4}(z)$")
ax2.plot(ys, kernel(ys))
ax2.axhline(0, color="k", lw=0.5)
ax2.set_xlabel("y")
ax2.set_ylabel("K(y)")
fig.tight_layout()
fig.savefig("special_functions.png", dpi=120)
