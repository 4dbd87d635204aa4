"""
Euclidean primitives: support functions, directional and mean width,
spherical caps, diameter and Hausdorff distance of finite sets.

Convex bodies are only ever accessed through their support function
``h_K(u) = max_{x in K} <u, x>``, so the mean width of a point cloud is the
mean width of its convex hull without the hull ever being built.
"""

from dataclasses import dataclass
from typing import Callable

import math

import numpy as np
from scipy import integrate, special
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import InputError

#: absolute slack for geometric comparisons unless a caller overrides it
DEFAULT_TOL = 1e-9

#: number of directions handled per block in Monte-Carlo reductions
_CHUNK = 4096


def as_points(points, dim=None):
    """Return ``points`` as a finite float array of shape (m, n), m >= 1."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :] if dim is None or arr.size == dim else arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InputError(f"expected a nonempty (m, n) point array, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise InputError(f"dimension mismatch: expected {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise InputError("points must have finite coordinates")
    return arr


def as_unit(u, tol=1e-12):
    """Validate a unit vector (|norm - 1| <= tol) and return it as an array."""
    u = np.asarray(u, dtype=float).ravel()
    if u.size == 0 or not np.all(np.isfinite(u)):
        raise InputError("unit vector must be a finite nonempty vector")
    if abs(np.linalg.norm(u) - 1.0) > tol:
        raise InputError(f"not a unit vector: norm = {np.linalg.norm(u)!r}")
    return u


# --------------------------------------------------------------------------
# convex bodies

@dataclass(frozen=True)
class PointCloud:
    """Convex hull of finitely many points."""
    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", as_points(self.points))

    @property
    def dim(self):
        return self.points.shape[1]

    def support_many(self, U):
        return np.max(self.points @ U.T, axis=0)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).ravel()
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise InputError("ball center must be finite")
        if not self.radius >= 0:
            raise InputError("ball radius must be >= 0")
        object.__setattr__(self, "center", c)

    @property
    def dim(self):
        return self.center.size

    def support_many(self, U):
        return U @ self.center + self.radius


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[low, high]``."""
    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.low, dtype=float).ravel()
        hi = np.asarray(self.high, dtype=float).ravel()
        if lo.shape != hi.shape or lo.size == 0:
            raise InputError("box corners must have the same nonzero dimension")
        if np.any(lo > hi):
            raise InputError("box requires low <= high coordinatewise")
        object.__setattr__(self, "low", lo)
        object.__setattr__(self, "high", hi)

    @property
    def dim(self):
        return self.low.size

    def support_many(self, U):
        return np.where(U > 0, U * self.high, U * self.low).sum(axis=1)


@dataclass(frozen=True)
class SupportOracle:
    """Body given only by a support function ``u -> h(u)``."""
    func: Callable
    dim: int

    def support_many(self, U):
        return np.array([float(self.func(u)) for u in U])


def _directions(body, u):
    U = np.atleast_2d(np.asarray(u, dtype=float))
    if U.shape[1] != body.dim:
        raise InputError(f"dimension mismatch: body is {body.dim}-D, direction is {U.shape[1]}-D")
    return U


def support(body, u):
    """Support function ``sup_{x in body} <u, x>``."""
    return float(body.support_many(_directions(body, as_unit(u)))[0])


def directional_width(body, u):
    """Length of the orthogonal projection of ``body`` onto the line ``R u``."""
    U = _directions(body, as_unit(u))
    return float(body.support_many(U)[0] + body.support_many(-U)[0])


def widths(body, U):
    """Directional widths for each row of ``U`` (rows assumed unit)."""
    U = _directions(body, U)
    return body.support_many(U) + body.support_many(-U)


# --------------------------------------------------------------------------
# sphere sampling and mean width

@dataclass(frozen=True)
class SphereSampler:
    """Reproducible uniform directions on the unit sphere.

    Directions are normalized standard Gaussian vectors drawn from numpy's
    PCG64 generator seeded with ``seed``; the same seed, count and dimension
    always give the same array.
    """
    seed: int = 42
    count: int = 100_000

    def __post_init__(self):
        if int(self.count) < 1:
            raise InputError("sample count must be >= 1")

    def directions(self, n):
        if n < 1:
            raise InputError("dimension must be >= 1")
        rng = np.random.default_rng(self.seed)
        G = rng.standard_normal((self.count, n))
        norms = np.linalg.norm(G, axis=1)
        # a zero Gaussian draw has probability 0; guard anyway
        norms[norms == 0.0] = 1.0
        return G / norms[:, None]


@dataclass(frozen=True)
class MeanWidthEstimate:
    value: float
    standard_error: float
    samples: int


def _estimate(samples):
    samples = np.asarray(samples, dtype=float)
    N = samples.size
    se = float(samples.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return MeanWidthEstimate(float(samples.mean()), se, N)


def width_samples(body, sampler):
    """Per-direction widths ``w(u_j)`` for the sampler's directions."""
    U = sampler.directions(body.dim)
    return np.concatenate([widths(body, U[s:s + _CHUNK]) for s in range(0, len(U), _CHUNK)])


def mean_width(body, sampler):
    """Monte-Carlo mean width: average of directional widths over the sphere."""
    if sampler.count < 2:
        raise InputError("mean width needs at least 2 directions")
    return _estimate(width_samples(body, sampler))


def tail_width_samples(points, U):
    """Widths of every tail hull ``conv(points[k:])`` along directions ``U``.

    Returns an array of shape (m, len(U)); row k holds the widths of the
    hull of points k..m-1. Row k dominates row k+1 entrywise.
    """
    P = as_points(points)
    out = np.empty((P.shape[0], U.shape[0]))
    for s in range(0, U.shape[0], _CHUNK):
        proj = P @ U[s:s + _CHUNK].T
        hi = np.maximum.accumulate(proj[::-1], axis=0)[::-1]
        lo = np.minimum.accumulate(proj[::-1], axis=0)[::-1]
        out[:, s:s + _CHUNK] = hi - lo
    return out


# --------------------------------------------------------------------------
# finite-set metrics

def diameter(points):
    """Largest pairwise distance of a nonempty finite set."""
    P = as_points(points)
    if P.shape[0] == 1:
        return 0.0
    return float(cdist(P, P).max())


def hausdorff(A, B):
    """Hausdorff distance between two nonempty finite sets."""
    A = as_points(A)
    B = as_points(B, dim=A.shape[1])
    return float(max(cKDTree(B).query(A)[0].max(), cKDTree(A).query(B)[0].max()))


def distance_to_polyline(Q, P):
    """Distance from each row of ``Q`` to the polyline through the rows of ``P``.

    Only segments with an endpoint within ``r + max_segment / 2`` of a query
    are examined, where ``r`` is the distance to the nearest vertex; the
    closest segment always qualifies, so the result is exact.
    """
    P = as_points(P)
    Q = as_points(Q, dim=P.shape[1])
    tree = cKDTree(P)
    r, _ = tree.query(Q)
    if len(P) == 1:
        return r
    seg = np.diff(P, axis=0)
    half = 0.5 * float(np.linalg.norm(seg, axis=1).max())
    near = tree.query_ball_point(Q, r + half + 1e-12 * (1.0 + r))
    counts = np.fromiter((len(v) for v in near), dtype=np.intp, count=len(Q))
    qi = np.repeat(np.arange(len(Q)), counts)
    vi = np.concatenate([np.asarray(v, dtype=np.intp) for v in near])
    # each nearby vertex contributes the segments on both sides of it
    si = np.concatenate([vi - 1, vi])
    qi = np.concatenate([qi, qi])
    ok = (si >= 0) & (si < len(seg))
    si, qi = si[ok], qi[ok]
    d = seg[si]
    dd = np.einsum("ij,ij->i", d, d)
    w = Q[qi] - P[si]
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = np.where(dd > 0, np.einsum("ij,ij->i", w, d) / dd, 0.0)
    lam = np.clip(lam, 0.0, 1.0)
    dist = np.linalg.norm(w - lam[:, None] * d, axis=1)
    out = r.copy()
    np.minimum.at(out, qi, dist)
    return out


# --------------------------------------------------------------------------
# sphere measures

def sigma_n(n):
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    if int(n) != n or n < 1:
        raise InputError("sigma_n needs an integer n >= 1")
    return n * math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _log_sin_power_integral(p, phi):
    # log of int_0^phi sin(theta)^p dtheta, written as phi^(p+1) * J with
    # J = int_0^1 s^p sinc(phi s)^p ds so tiny caps keep full relative precision
    def integrand(s):
        x = phi * s
        r = math.sin(x) / x if x > 0 else 1.0
        return s ** p * r ** p

    J, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-13, limit=200)
    return (p + 1) * math.log(phi) + math.log(J)


def log_cap_fraction(n, chordal_radius):
    """Natural log of :func:`cap_fraction`; finite even when the fraction underflows."""
    if int(n) != n or n < 2:
        raise InputError("cap_fraction needs an integer n >= 2")
    r = float(chordal_radius)
    if not 0.0 < r <= 2.0:
        raise InputError(f"chordal radius must lie in (0, 2], got {r!r}")
    phi = 2.0 * math.asin(r / 2.0)
    p = n - 2
    # int_0^pi sin^p = sqrt(pi) Gamma((p+1)/2) / Gamma(p/2 + 1)
    log_total = 0.5 * math.log(math.pi) + special.gammaln((p + 1) / 2) - special.gammaln(p / 2 + 1)
    if phi >= math.pi:
        return 0.0
    return min(0.0, _log_sin_power_integral(p, phi) - log_total)


def cap_fraction(n, chordal_radius):
    """Fraction of S^{n-1} within chordal distance ``r`` of a pole.

    The cap ``{v : ||v - pole|| <= r}`` has angular radius
    ``phi = 2 asin(r / 2)``; its normalized measure is
    ``int_0^phi sin^{n-2} / int_0^pi sin^{n-2}``.
    """
    return math.exp(log_cap_fraction(n, chordal_radius))


def cap_fraction_mc(n, chordal_radius, sampler):
    """Monte-Carlo estimate of :func:`cap_fraction` as ``(value, standard_error)``."""
    U = sampler.directions(n)
    pole = np.zeros(n)
    pole[0] = 1.0
    hit = np.linalg.norm(U - pole, axis=1) <= chordal_radius
    p = hit.mean()
    return float(p), float(math.sqrt(max(p * (1 - p), 0.0) / len(U)))
