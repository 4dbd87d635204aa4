"""
===============================================
A proximal sequence that stops short
===============================================

With summable step sizes the proximal algorithm still has finite length,
but it may converge to a point that is not critical. The piecewise
function below, started at 2 with steps 1/2, 1/4, ..., walks down the
linear branch and halts exactly at 1.
"""

# %%
import matplotlib.pyplot as plt
import numpy as np

from _common import save
from selfcontract import prox

f = prox.paper_piecewise()
trace = prox.run_prox(f, [2.0], prox.ProxSchedule.geometric(0.5), max_iter=60)
limit = trace.iterates[-1, 0]
print(f"{len(trace) - 1} steps, terminated by {trace.terminated_by}, limit {limit!r}")
print("least-norm subgradient at the limit:", f.min_norm_subgradient(trace.iterates[-1]))

# %%
# Every trace-level check
# -----------------------

for name, verdict in prox.verify_trace(trace, f).items():
    print(f"{name:>18}: {'holds' if prox._holds(verdict) else 'FAILS'}")

# %%
# Harmonic steps do reach the minimizer
# -------------------------------------

harm = prox.run_prox(f, [2.0], prox.ProxSchedule.harmonic(), max_iter=200)
print("harmonic schedule ends at", harm.iterates[-1, 0])

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(trace.iterates[:, 0], "o-", ms=3, label="t_i = 2^-(i+1)")
ax.plot(harm.iterates[:60, 0], "s-", ms=3, label="t_i = 1/(i+1)")
ax.axhline(1.0, color="grey", lw=0.8)
ax.set_xlabel("iteration")
ax.set_ylabel("x_i")
ax.legend()
save(fig, "noncritical_limit.png")
