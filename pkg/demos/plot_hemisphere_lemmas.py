"""
=========================================
Saturated families and hemisphere picks
=========================================

Unit vectors at pairwise angles above 60 degrees pack at most 3^n to a
sphere. Summing such a family drawn from a nearly non-obtuse set gives a
direction that sees every member of the set at a positive angle.
"""

# %%
import matplotlib.pyplot as plt
import numpy as np

from _common import save
from selfcontract import spherelemmas as S

rng = np.random.default_rng(0)


def sphere(k, n):
    G = rng.standard_normal((k, n))
    return G / np.linalg.norm(G, axis=1)[:, None]


for n in (2, 3, 4, 5):
    sizes = [len(S.greedy_saturated_family(sphere(500, n))) for _ in range(200)]
    print(f"n={n}: largest family {max(sizes)} <= 3^n = {3 ** n}")

# %%
# A direction for a nearly non-obtuse set
# ---------------------------------------

X = sphere(4000, 2)
X = X[X[:, 1] >= -0.02]          # a hemisphere plus a sliver
keep = [X[0]]
for x in X[1:]:
    if all(x @ y >= -(3.0 ** -3) for y in keep):
        keep.append(x)
X = np.array(keep)
h = S.hemisphere_construction(X)
print(f"{len(X)} vectors, family of {len(h.family)}, min <zeta, x> = {h.min_dot:.3f}")

fig, ax = plt.subplots(figsize=(4.5, 4.5))
ax.scatter(*X.T, s=4, color="grey")
ax.scatter(*h.family.vectors.T, s=30, color="tab:red", label="saturated family")
ax.arrow(0, 0, *h.zeta, width=0.01, color="tab:blue", label="zeta")
ax.set_aspect("equal")
ax.legend(loc="lower left")
save(fig, "hemisphere.png")
