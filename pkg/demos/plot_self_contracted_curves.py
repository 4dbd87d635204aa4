"""
=========================
Self-contracted curves
=========================

A curve is self-contracted when the distance to any later point never
increases. This script compares the vertex and polyline forms of the test
and checks that reversing a curve swaps self-contracted for self-expanded.
"""

# %%
import matplotlib.pyplot as plt
import numpy as np

from _common import save
from selfcontract import curves as C
from selfcontract import instances
from selfcontract.curves import DiscreteCurve

# %%
# Vertices are not the whole story
# --------------------------------
# On its vertices this curve is fine, but along the first segment the
# distance to the last vertex dips and then grows again.

c = DiscreteCurve([[0, 0], [2, 0], [1.5, 1.5]])
print("vertex mode   :", C.is_self_contracted(c))
print("polygonal mode:", C.is_self_contracted(c, mode="polygonal"))

s = np.linspace(0, 1, 200)
path = np.outer(1 - s, c.points[0]) + np.outer(s, c.points[1])
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(s, np.linalg.norm(path - c.points[2], axis=1))
ax.set_xlabel("position along the first segment")
ax.set_ylabel("distance to the last vertex")
save(fig, "vertex_vs_polygonal.png")

# %%
# Prox traces against random walks
# --------------------------------

traces = [DiscreteCurve(instances.prox_polyline(2, 30, s)[1].iterates) for s in range(20)]
walks = [instances.random_walk(2, 30, s) for s in range(20)]
print("prox traces self-contracted:", sum(C.is_self_contracted(t).holds for t in traces), "/ 20")
print("random walks self-contracted:", sum(C.is_self_contracted(w).holds for w in walks), "/ 20")

bad = C.is_self_contracted(walks[0])
print("first walk fails at", bad.witness, f"by {bad.violation:.3f}")

# %%
# Reversal
# --------

agree = all(C.is_self_contracted(x, mode="polygonal").holds == C.is_self_expanded(C.reverse(x)).holds
            for x in traces + walks)
print("SC(curve) == SE(reverse(curve)) on all 40 curves:", agree)

# %%
# Arc-length resampling keeps the property
# ----------------------------------------

r = C.arc_length_reparam(traces[0], C.length(traces[0]) / 100)
print(len(traces[0]), "->", len(r), "points; still SC:", C.is_self_contracted(r).holds)
