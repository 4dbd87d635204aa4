"""
=====================================
Length against mean width
=====================================

A self-contracted curve cannot be much longer than the mean width of its
hull. The constant that the covering argument produces is enormous; real
curves sit near the low single digits.
"""

# %%
import matplotlib.pyplot as plt
import numpy as np

from _common import save
from selfcontract import geomcore, instances, spherelemmas as S
from selfcontract.curves import DiscreteCurve

for n in (2, 3, 5, 10, 16):
    b = S.bound_constants(n)
    print(f"n={n:>2}  log C_n = {b.log_C_n:10.2f}   zeta bound = {b.zeta_bound:.2e}")

# %%
# Empirical ratios
# ----------------

sampler = geomcore.SphereSampler(seed=42, count=20_000)
ratios = {}
for n in (2, 3, 5):
    ratios[n] = []
    for seed in range(30):
        _, tr = instances.prox_polyline(n, 30, seed)
        rep = S.verify_length_bound(DiscreteCurve(tr.iterates), sampler)
        assert rep.holds
        ratios[n].append(rep.ratio)
    print(f"n={n}: max length/W = {max(ratios[n]):.3f}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.boxplot(list(ratios.values()), tick_labels=[f"n={n}" for n in ratios])
ax.set_ylabel("length / mean width")
save(fig, "length_over_width.png")

# %%
# Tail widths shrink with every step
# ----------------------------------

_, tr = instances.prox_polyline(2, 30, 7)
rep = S.verify_width_monotonicity(DiscreteCurve(tr.iterates), sampler)
print("width decrease holds:", rep.holds, " epsilon =", f"{rep.epsilon:.2e}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(rep.profile, "o-")
ax.set_xlabel("tail start k")
ax.set_ylabel("mean width of conv(p_k, ...)")
save(fig, "tail_width_profile.png")
