"""
Orbits of sublevel-set foliations, gradient-flow test curves, and greedy
self-contracted polygonal approximation of strongly self-contracted curves.
"""

from dataclasses import dataclass

import math

import numpy as np

from .curves import (DEFAULT_TOLERANCE, DiscreteCurve, _verdict, arc_length_reparam,
                     is_self_contracted, secant_cone_check)
from .errors import InputError, PreconditionError, SolverError
from .geomcore import distance_to_polyline
from .prox import _prox

_LAMBDA_MAX = 1e12


@dataclass(frozen=True)
class FoliationOrbit:
    curve: DiscreteCurve
    levels: np.ndarray


def project_to_sublevel(f, x, level, tol=1e-12, max_iter=400):
    """Nearest point of ``[f <= level]`` to ``x``.

    Uses ``lam -> f(prox_{lam f}(x))``, which is continuous and nonincreasing,
    and bisects ``lam`` (geometrically) until the level is met within ``tol``.
    """
    x = np.asarray(x, dtype=float).ravel()
    fx = f(x)
    if fx <= level:
        return x.copy()
    if f.infimum is not None and level < f.infimum - tol:
        raise InputError(f"level {level!r} is below inf f = {f.infimum!r}")
    lo, hi = 0.0, 1.0
    z = _prox(f, x, hi)[0]
    while f(z) > level + tol:
        lo, hi = hi, 2 * hi
        if hi > _LAMBDA_MAX:
            raise InputError(f"level {level!r} appears to be below inf f")
        z = _prox(f, x, hi)[0]
    if abs(f(z) - level) <= tol:
        return z
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi) if lo > 0 else 0.5 * hi
        z = _prox(f, x, mid)[0]
        fz = f(z)
        if abs(fz - level) <= tol:
            return z
        if fz > level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    z = _prox(f, x, hi)[0]
    if abs(f(z) - level) <= max(tol, 1e-12 * (1 + abs(level))):
        return z
    raise SolverError(f"sublevel projection stalled with |f - r| = {abs(f(z) - level):.3g}",
                      abs(f(z) - level))


def sublevel_projection_orbit(f, x0, levels, tol=1e-12):
    """Successive projections ``p_{k+1} = proj_{[f <= r_{k+1}]}(p_k)``.

    ``levels`` must be strictly decreasing and start at or below ``f(x0)``;
    a first level equal to ``f(x0)`` leaves the orbit at ``x0``. The returned
    orbit starts at ``x0`` with level ``f(x0)``.
    """
    x = np.asarray(x0, dtype=float).ravel()
    levels = np.asarray(levels, dtype=float).ravel()
    f0 = f(x)
    if levels.size == 0:
        raise InputError("need at least one level")
    if np.any(np.diff(levels) >= 0):
        raise InputError("levels must be strictly decreasing")
    if levels[0] > f0:
        raise InputError("first level must not exceed f(x0)")
    pts, lv = [x], [f0]
    for r in levels:
        if r == f0 and len(pts) == 1:
            continue
        x = project_to_sublevel(f, x, r, tol)
        pts.append(x)
        lv.append(r)
    return FoliationOrbit(DiscreteCurve(np.array(pts)), np.array(lv))


def decreasing_level_check(orbit, f, tol=1e-9):
    """Levels strictly decrease along the orbit and match ``f`` at each point."""
    P = orbit.curve.points
    vals = np.array([f(p) for p in P])
    mismatch = np.abs(vals - orbit.levels)
    if mismatch.max() > tol:
        k = int(np.argmax(mismatch))
        return _verdict(False, (k,), mismatch[k], -float(mismatch.max()),
                        f"f(p{k}) differs from its recorded level")
    drops = -np.diff(vals)
    margin = float(drops.min()) if drops.size else float("inf")
    if drops.size and margin <= 0:
        k = int(np.argmin(drops))
        return _verdict(False, (k, k + 1), -margin + tol, margin,
                        f"f does not decrease from p{k} to p{k + 1}")
    return _verdict(True, None, 0.0, margin)


def gradient_flow_curve(f, x0, h, T):
    """Classical RK4 integration of ``x' = -grad f(x)`` on ``[0, T]``.

    The final step is shortened so the last sample sits exactly at ``T``.
    """
    if f.gradient is None:
        raise InputError("gradient flow needs a declared gradient")
    if not h > 0 or not T >= 0:
        raise InputError("need h > 0 and T >= 0")
    x = np.asarray(x0, dtype=float).ravel()
    if T == 0:
        return DiscreteCurve(x[None, :], [0.0])
    N = int(math.ceil(T / h - 1e-9))
    times = np.minimum(np.arange(N + 1) * h, T)
    out = np.empty((N + 1, x.size))
    out[0] = x
    g = f.gradient
    for i in range(N):
        dt = times[i + 1] - times[i]
        k1 = -g(x)
        k2 = -g(x + 0.5 * dt * k1)
        k3 = -g(x + 0.5 * dt * k2)
        k4 = -g(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = x
    return DiscreteCurve(out, times)


@dataclass(frozen=True)
class ApproximationResult:
    polyline: DiscreteCurve
    accuracy: float
    hausdorff_achieved: float
    vertex_source_indices: np.ndarray


def polygonal_approximation(curve, delta, tol=None):
    """Greedy backward self-contracted polygonal approximation of accuracy ``delta``.

    ``hausdorff_achieved`` is the Hausdorff distance between the returned
    polyline and the input polyline.

    Starting from the last sample ``z_0``, the next vertex is the earliest
    sample within backward arc length ``delta`` whose secant to the current
    vertex points strictly into the normal cone of the hull of the whole tail
    after the current vertex. Vertices are returned in forward order.
    """
    tol = tol or DEFAULT_TOLERANCE
    if not delta > 0:
        raise InputError("delta must be > 0")
    C, idx = curve.collapsed()
    if len(C) >= 3:
        pre = secant_cone_check(C, tol)
        if not pre.holds:
            raise PreconditionError(
                f"curve is not strongly self-contracted at the sampling scale: "
                f"witness {tuple(int(idx[i]) for i in pre.witness)}", verdict=pre)
    P = C.points
    M = len(P) - 1
    if M == 0:
        return ApproximationResult(C, float(delta), 0.0, idx[[0]])
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(P, axis=0), axis=1))])
    slack_s = 1e-12 * max(s[-1], 1.0)
    chosen = [M]
    c = M
    while c > 0:
        first = int(np.searchsorted(s, s[c] - delta - slack_s, side="left"))
        cand = np.arange(first, c)
        if cand.size == 0:
            raise PreconditionError(
                f"no sample within backward arc length {delta} of index {int(idx[c])}")
        tail = P[c + 1:] - P[c]
        tail_norm = np.linalg.norm(tail, axis=1)
        nxt = None
        for lo in range(0, cand.size, 16):
            block = cand[lo:lo + 16]
            if not tail.size:
                nxt = int(block[0])
                break
            V = P[block] - P[c]
            cos = (V @ tail.T) / np.outer(np.linalg.norm(V, axis=1), tail_norm)
            ok = np.flatnonzero(np.all(cos <= -tol.rel_margin, axis=1))
            if ok.size:
                nxt = int(block[ok[0]])
                break
        if nxt is None:
            raise PreconditionError(f"no admissible backward vertex from index {int(idx[c])}")
        c = nxt
        chosen.append(c)
    chosen = _drop_collinear(P, np.array(chosen[::-1]))
    poly = DiscreteCurve(P[chosen])
    # both curves are compared as polylines; the approximation side is
    # sampled at spacing delta/64
    dense = arc_length_reparam(poly, delta / 64).points
    achieved = float(max(distance_to_polyline(P, poly.points).max(),
                         distance_to_polyline(dense, P).max()))
    return ApproximationResult(poly, float(delta), achieved, idx[chosen])


def _drop_collinear(P, chosen):
    # an interior vertex lying on the segment between its neighbours does not
    # change the polyline's image, so it is removed
    keep = [chosen[0]]
    for j in range(1, len(chosen) - 1):
        a, b, c = P[keep[-1]], P[chosen[j]], P[chosen[j + 1]]
        u, v = b - a, c - b
        e = v / np.linalg.norm(v)
        off = np.linalg.norm(u - (u @ e) * e)
        if not (u @ e > 0 and off <= 1e-12 * np.linalg.norm(u)):
            keep.append(chosen[j])
    keep.append(chosen[-1])
    return np.array(keep)


def approximation_holds(result, tol=None):
    """Both halves of the approximation guarantee: accuracy and self-contractedness."""
    tol = tol or DEFAULT_TOLERANCE
    return (result.hausdorff_achieved <= result.accuracy + tol.abs_tol
            and is_self_contracted(result.polyline, tol).holds)
