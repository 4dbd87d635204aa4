"""
Discrete curves and the predicates built on them.

A :class:`DiscreteCurve` is a finite ordered sample ``p_0, ..., p_{m-1}`` of a
curve in R^n. Predicates come in two flavours:

* vertex predicates look only at the samples (``mode="vertex"``);
* polygonal predicates treat the curve as the polyline through the samples
  (``mode="polygonal"``), which is the Lipschitz curve that the
  reversal and half-space lemmas talk about.

Every polyline that is self-contracted as a polyline is also self-contracted
on its vertices; the converse fails (e.g. ``(0,0), (2,0), (1.5,1.5)``).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InputError
from .geomcore import DEFAULT_TOL, as_points, tail_width_samples

_BLOCK = 64


@dataclass(frozen=True)
class ToleranceConfig:
    abs_tol: float = DEFAULT_TOL
    rel_margin: float = 1e-6

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_margin < 0:
            raise InputError("tolerances must be >= 0")


DEFAULT_TOLERANCE = ToleranceConfig()


@dataclass(frozen=True)
class PredicateVerdict:
    """Outcome of a curve predicate.

    ``witness`` holds indices (into the caller's curve) of a violating
    configuration and ``violation`` its magnitude beyond zero. ``margin`` is the
    smallest slack over all inequalities checked; a positive margin means every
    inequality held strictly.
    """
    holds: bool
    witness: tuple = None
    violation: float = 0.0
    margin: float = float("inf")
    message: str = ""

    def __bool__(self):
        return self.holds


def _verdict(holds, witness, violation, margin, message=""):
    if holds:
        return PredicateVerdict(True, None, 0.0, float(margin), message)
    return PredicateVerdict(False, tuple(int(i) for i in witness), float(violation), float(margin), message)


@dataclass(frozen=True)
class DiscreteCurve:
    points: np.ndarray
    params: np.ndarray = field(default=None)

    def __post_init__(self):
        P = as_points(self.points)
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        if self.params is not None:
            t = np.asarray(self.params, dtype=float).ravel()
            if t.size != P.shape[0]:
                raise InputError("params must have one entry per point")
            if not np.all(np.isfinite(t)) or np.any(np.diff(t) <= 0):
                raise InputError("params must be finite and strictly increasing")
            t.setflags(write=False)
            object.__setattr__(self, "params", t)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def collapsed(self):
        """Drop consecutive exact duplicates.

        Returns ``(curve, index)`` where ``index[j]`` is the position in
        ``self`` of the first copy of the j-th kept point.
        """
        P = self.points
        keep = np.ones(len(P), dtype=bool)
        keep[1:] = np.any(P[1:] != P[:-1], axis=1)
        idx = np.flatnonzero(keep)
        params = None if self.params is None else self.params[idx]
        return DiscreteCurve(P[idx], params), idx


def length(curve):
    """Polygonal length: sum of distances between consecutive samples."""
    P = curve.points
    if len(P) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(P, axis=0), axis=1).sum())


def reverse(curve):
    """Reverse orientation; parameters are negated and reversed."""
    params = None if curve.params is None else -curve.params[::-1]
    return DiscreteCurve(curve.points[::-1].copy(), params)


def _tol(tol):
    return DEFAULT_TOLERANCE if tol is None else tol


def _segment_dots(P, k):
    """Direction of segment k and its length."""
    d = P[k + 1] - P[k]
    return d, float(np.linalg.norm(d))


def is_self_contracted(curve, tol=None, mode="vertex"):
    """Check ``d(p_i, p_k)`` is nonincreasing in ``i <= k`` for every ``k``.

    With ``mode="polygonal"`` the polyline itself is checked: along every
    segment ``[p_k, p_{k+1}]`` the distance to each later vertex must not
    increase, i.e. ``<p_{k+1} - p_k, p_w - p_{k+1}> >= -abs_tol |p_{k+1} - p_k|``.
    Witness is ``(i, i+1, k)`` for vertex mode and ``(k, k+1, w)`` for
    polygonal mode.
    """
    tol = _tol(tol)
    if mode == "polygonal":
        return _polygonal_sc(curve, tol)
    if mode != "vertex":
        raise InputError(f"unknown mode {mode!r}")
    C, idx = curve.collapsed()
    P = C.points
    m = len(P)
    margin = float("inf")
    for k0 in range(1, m, _BLOCK):
        k1 = min(k0 + _BLOCK, m)
        ks = np.arange(k0, k1)
        D = cdist(P[:k1], P[k0:k1])
        # slack[i, j] = d(p_i, p_k) - d(p_{i+1}, p_k) for k = ks[j], i < k
        slack = D[:-1] - D[1:]
        slack[np.arange(k1 - 1)[:, None] >= ks[None, :]] = np.inf
        margin = min(margin, float(slack.min()))
        bad = slack < -tol.abs_tol
        if bad.any():
            j = int(np.flatnonzero(bad.any(axis=0))[0])
            i = int(np.flatnonzero(bad[:, j])[0])
            k = int(ks[j])
            return _verdict(False, (idx[i], idx[i + 1], idx[k]), -slack[i, j], margin,
                            f"d(p{idx[i + 1]}, p{idx[k]}) exceeds d(p{idx[i]}, p{idx[k]})")
    return _verdict(True, None, 0.0, margin)


def _polygonal_sc(curve, tol):
    C, idx = curve.collapsed()
    P = C.points
    m = len(P)
    margin = float("inf")
    for k in range(m - 2):
        d, dn = _segment_dots(P, k)
        later = P[k + 2:] - P[k + 1]
        s = later @ d / dn
        j = int(np.argmin(s))
        margin = min(margin, float(s[j]))
        bad = np.flatnonzero(s < -tol.abs_tol)
        if bad.size:
            w = k + 2 + int(bad[0])
            return _verdict(False, (idx[k], idx[k + 1], idx[w]), -s[bad[0]], margin,
                            f"distance to p{idx[w]} increases along segment {idx[k]}")
    return _verdict(True, None, 0.0, margin)


def is_self_expanded(curve, tol=None):
    """Discrete self-expandedness of the polyline.

    For each segment ``d_k = p_{k+1} - p_k`` and each earlier vertex ``p_u``
    (``u <= k``), both ``<d_k, p_k - p_u>`` and ``<d_k, p_{k+1} - p_u>`` must be
    ``>= -abs_tol |d_k|``. The inner product is affine along the segment, so
    the two endpoints cover every point where the derivative exists.
    Witness is ``(u, k, k+1)``.
    """
    tol = _tol(tol)
    C, idx = curve.collapsed()
    P = C.points
    if len(P) < 2:
        return _verdict(True, None, 0.0, float("inf"))
    margin = float("inf")
    for k in range(len(P) - 1):
        d, dn = _segment_dots(P, k)
        earlier = P[:k + 1]
        s = np.minimum((P[k] - earlier) @ d, (P[k + 1] - earlier) @ d) / dn
        j = int(np.argmin(s))
        margin = min(margin, float(s[j]))
        if s[j] < -tol.abs_tol:
            u = int(np.flatnonzero(s < -tol.abs_tol)[0])
            return _verdict(False, (idx[u], idx[k], idx[k + 1]), -s[u], margin,
                            f"segment {idx[k]} moves toward earlier vertex p{idx[u]}")
    return _verdict(True, None, 0.0, margin)


def check_halfspace_property(curve, tol=None):
    """Velocity on each segment points into the half-space of every later vertex.

    Discrete form: ``<d_k, p_u - q> >= -abs_tol |d_k| |p_u - q|`` for
    ``q in {p_k, p_{k+1}}`` and every later vertex ``p_u`` (``u > k``). Both
    segment endpoints are limits of points where the polyline is
    differentiable. Witness is ``(k, k+1, u)``.
    """
    tol = _tol(tol)
    C, idx = curve.collapsed()
    P = C.points
    margin = float("inf")
    for k in range(len(P) - 1):
        d, dn = _segment_dots(P, k)
        for q in (P[k], P[k + 1]):
            later = P[k + 1:] - q
            norms = np.linalg.norm(later, axis=1)
            ok = norms > 0
            if not ok.any():
                continue
            cos = np.full(len(later), np.inf)
            cos[ok] = (later[ok] @ d) / (dn * norms[ok])
            j = int(np.argmin(cos))
            margin = min(margin, float(cos[j]))
            if cos[j] < -tol.abs_tol:
                u = k + 1 + int(np.flatnonzero(cos < -tol.abs_tol)[0])
                return _verdict(False, (idx[k], idx[k + 1], idx[u]), -cos[u - k - 1], margin,
                                f"later vertex p{idx[u]} lies behind segment {idx[k]}")
    return _verdict(True, None, 0.0, margin)


def secant_cone_check(curve, tol=None):
    """Strong self-contractedness on the samples.

    At each interior vertex ``p_k`` the backward secant
    ``v = (p_{k-1} - p_k) / |p_{k-1} - p_k|`` must lie strictly inside the
    normal cone of the hull of the tail: ``<v, p_u - p_k> <= -rel_margin |p_u - p_k|``
    for every ``u > k``. Witness is ``(k-1, k, u)``; ``margin`` is the smallest
    ``-cos`` observed minus ``rel_margin``.
    """
    tol = _tol(tol)
    C, idx = curve.collapsed()
    P = C.points
    m = len(P)
    margin = float("inf")
    for k0 in range(1, m - 1, _BLOCK):
        k1 = min(k0 + _BLOCK, m - 1)
        ks = np.arange(k0, k1)
        V = P[ks - 1] - P[ks]
        V /= np.linalg.norm(V, axis=1)[:, None]
        later = P[k0 + 1:]
        # cos[r, j] between v_k and p_u - p_k, u = k0 + 1 + r, k = ks[j]
        dots = later @ V.T - np.einsum("ij,ij->i", P[ks], V)[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            cos = dots / cdist(later, P[ks])
        slack = -cos - tol.rel_margin
        slack[(k0 + 1 + np.arange(len(later)))[:, None] <= ks[None, :]] = np.inf
        margin = min(margin, float(slack.min()))
        bad = slack < 0
        if bad.any():
            j = int(np.flatnonzero(bad.any(axis=0))[0])
            r = int(np.flatnonzero(bad[:, j])[0])
            k, u = int(ks[j]), k0 + 1 + r
            return _verdict(False, (idx[k - 1], idx[k], idx[u]), -slack[r, j], margin,
                            f"backward secant at p{idx[k]} is not inside the tail normal cone")
    return _verdict(True, None, 0.0, margin)


def arc_length_reparam(curve, spacing):
    """Resample the polyline by arc length.

    Output points sit at every multiple of ``spacing`` along the polyline and
    at every original (deduplicated) vertex; ``params`` is the cumulative arc
    length, so consecutive output points are at Euclidean distance at most
    their parameter gap. Where rounding would break that (segments far
    shorter than the running length), the parameter is raised by a few ulps.
    """
    if not spacing > 0:
        raise InputError("spacing must be > 0")
    C, _ = curve.collapsed()
    P = C.points
    if len(P) < 2:
        raise InputError("cannot reparameterize a zero-length curve")
    seg = np.linalg.norm(np.diff(P, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    L = s[-1]
    grid = np.arange(1, int(np.floor(L / spacing)) + 1) * spacing
    # drop grid points that coincide with vertices up to rounding
    near = np.abs(grid[:, None] - s[None, :]).min(axis=1) <= 1e-12 * max(L, 1.0)
    params = np.union1d(s, grid[~near])
    seg_idx = np.clip(np.searchsorted(s, params, side="right") - 1, 0, len(seg) - 1)
    frac = (params - s[seg_idx]) / seg[seg_idx]
    pts = P[seg_idx] + frac[:, None] * (P[seg_idx + 1] - P[seg_idx])
    # vertices are copied exactly so the image stays on the original polyline
    at_vertex = np.searchsorted(params, s)
    pts[at_vertex] = P
    # cumulative sums cannot resolve very short segments far from the start;
    # push parameters up where a gap falls short of its chord
    chord = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    short = np.flatnonzero(np.diff(params) < chord)
    if short.size:
        params = params.copy()
        for i in range(int(short[0]), len(chord)):
            need = params[i] + chord[i]
            if params[i + 1] - params[i] < chord[i]:
                params[i + 1] = np.nextafter(need, np.inf)
            while params[i + 1] - params[i] < chord[i]:
                params[i + 1] = np.nextafter(params[i + 1], np.inf)
    return DiscreteCurve(pts, params)


def tail_width_profile(curve, sampler, return_samples=False):
    """Mean width of the hull of each tail ``p_k, ..., p_{m-1}``.

    All tails share the sampler's directions, so the profile is exactly
    nonincreasing in ``k``. With ``return_samples=True`` the per-direction
    width matrix (shape ``(m, N)``) is returned as well.
    """
    U = sampler.directions(curve.dim)
    W = tail_width_samples(curve.points, U)
    profile = W.mean(axis=1)
    if return_samples:
        return profile, W
    return profile
