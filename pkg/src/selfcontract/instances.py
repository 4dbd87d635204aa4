"""Seeded random instances: PSD quadratics, schedules, prox polylines, random walks."""

import numpy as np

from .curves import DiscreteCurve
from .prox import ProxSchedule, quadratic, run_prox


def random_psd_quadratic(n, rng, eig_range=(0.1, 10.0)):
    """Quadratic ``(x - c)' A (x - c) / 2`` with random eigenbasis and center."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(np.log(eig_range[0]), np.log(eig_range[1]), n))
    A = (Q * lam) @ Q.T
    A = 0.5 * (A + A.T)
    center = rng.standard_normal(n)
    return quadratic(A, -A @ center, 0.5 * center @ A @ center)


def random_schedule(count, rng, low=0.01):
    return ProxSchedule.explicit(rng.uniform(low, 1.0, count))


def prox_polyline(n, iters, seed):
    """Proximal trace of a random PSD quadratic; returns ``(f, trace)``."""
    rng = np.random.default_rng(seed)
    f = random_psd_quadratic(n, rng)
    x0 = f.minimizer + 3.0 * rng.standard_normal(n)
    trace = run_prox(f, x0, random_schedule(iters, rng), max_iter=iters)
    return f, trace


def random_walk(n, steps, seed):
    """Gaussian random walk; almost never self-contracted."""
    rng = np.random.default_rng(seed)
    pts = np.cumsum(np.vstack([np.zeros(n), rng.standard_normal((steps, n))]), axis=0)
    return DiscreteCurve(pts)
