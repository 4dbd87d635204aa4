"""
=============================================
Sublevel orbits and polygonal approximation
=============================================

Projecting onto shrinking sublevel sets traces a self-contracted polyline.
The gradient flow of a strictly convex quadratic is strongly
self-contracted, and can be replaced by a self-contracted polyline within
any accuracy.
"""

# %%
import matplotlib.pyplot as plt
import numpy as np

from _common import save
from selfcontract import curves, foliation, prox

f = prox.quadratic(np.diag([1.0, 4.0]))
x0 = np.array([1.0, 1.0])

orbit = foliation.sublevel_projection_orbit(f, x0, np.geomspace(2.0, 1e-3, 12))
print("orbit self-contracted:", curves.is_self_contracted(orbit.curve).holds)
print("levels decrease:", foliation.decreasing_level_check(orbit, f).holds)

# %%
# Gradient flow, resampled by arc length
# --------------------------------------

flow = foliation.gradient_flow_curve(f, x0, 1e-3, 10.0)
flow = curves.arc_length_reparam(flow, 1e-3)
print(len(flow), "samples, strong check:", curves.secant_cone_check(flow).holds)

# %%
# Coarse self-contracted polylines
# --------------------------------

fig, ax = plt.subplots(figsize=(5, 5))
ax.plot(*flow.points.T, lw=2, color="lightgrey", label="flow")
for delta in (0.05, 0.2):
    res = foliation.polygonal_approximation(flow, delta)
    ok = foliation.approximation_holds(res)
    print(f"delta={delta}: {len(res.polyline)} vertices, d_H={res.hausdorff_achieved:.1e}, ok={ok}")
    ax.plot(*res.polyline.points.T, "o-", ms=3, lw=1, label=f"delta={delta}")
ax.plot(*orbit.curve.points.T, "k^", ms=4, label="sublevel orbit")
ax.set_aspect("equal")
ax.legend()
save(fig, "foliation.svg")
