"""
==========================================
Support functions and Monte-Carlo widths
==========================================

Convex bodies are only touched through their support function. Averaging
directional widths over uniform directions gives the mean width, and the
standard error tells how far to trust it.
"""

# %%
# Bodies and widths
# -----------------

import math

import matplotlib.pyplot as plt
import numpy as np

from _common import save
from selfcontract import geomcore as g

square = g.Box([0, 0], [1, 1])
u = np.array([1.0, 1.0]) / math.sqrt(2)
print("width of the unit square along the diagonal:", g.directional_width(square, u))

# %%
# Mean width converges at the Monte-Carlo rate
# --------------------------------------------
# In the plane the mean width equals perimeter / pi, so the square should
# give 4 / pi.

counts = [100, 1_000, 10_000, 100_000]
errs, ses = [], []
for N in counts:
    est = g.mean_width(square, g.SphereSampler(seed=42, count=N))
    errs.append(abs(est.value - 4 / math.pi))
    ses.append(est.standard_error)
    print(f"N={N:>6}  W={est.value:.5f}  se={est.standard_error:.1e}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.loglog(counts, errs, "o-", label="|W - 4/pi|")
ax.loglog(counts, ses, "s--", label="standard error")
ax.set_xlabel("directions N")
ax.legend()
save(fig, "mean_width_convergence.png")

# %%
# Calibration bodies
# ------------------

for seed in (42, 43):
    s = g.SphereSampler(seed=seed)
    ball2 = g.mean_width(g.Ball(np.zeros(2), 1.0), s).value
    seg = g.mean_width(g.PointCloud([[0, 0], [1, 0]]), s).value
    print(f"seed {seed}: ball {ball2:.6f} (2), segment {seg:.6f} ({2 / math.pi:.6f})")

# %%
# Spherical caps
# --------------
# Cap fractions are computed by quadrature in log space, so even the tiny
# caps that drive the length constants stay finite.

for n in (2, 3, 5):
    p, se = g.cap_fraction_mc(n, 0.8, g.SphereSampler(seed=1))
    print(f"n={n}: exact {g.cap_fraction(n, 0.8):.5f}  Monte-Carlo {p:.5f} +- {se:.1e}")
print("log cap fraction, n=16, r=3^-96:", g.log_cap_fraction(16, 3.0 ** -96))
