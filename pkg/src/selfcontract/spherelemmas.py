"""
Saturated spherical families, the hemisphere construction, and the explicit
length-bound constants for self-contracted curves.

Constants for dimension n:

* ``delta = 3**(-3n)``
* ``epsilon = cap_fraction(n, delta**2) / 4``, a quarter of the normalized
  measure of a spherical cap of chordal radius ``delta**2``
* ``C_n = 1 / epsilon``, so that ``length <= C_n * mean_width(hull)``
* ``zeta_bound = 3**(-(2n+1))``, the guaranteed inner product of the
  hemisphere direction with every vector of a nearly non-obtuse family.

``epsilon`` underflows double precision from n = 11 on; ``log_C_n`` is
always finite and ``C_n`` saturates to ``inf`` there.
"""

from dataclasses import dataclass

import math

import numpy as np

from .curves import DEFAULT_TOLERANCE, is_self_contracted, length, tail_width_profile
from .errors import InputError, PreconditionError
from .geomcore import PointCloud, diameter, log_cap_fraction, mean_width

_UNIT_TOL = 1e-12
_DOT_SLACK = 1e-12


@dataclass(frozen=True)
class SaturatedFamily:
    vectors: np.ndarray
    max_pairwise_dot: float
    indices: np.ndarray

    def __len__(self):
        return len(self.vectors)


def _unit_rows(candidates):
    X = np.atleast_2d(np.asarray(candidates, dtype=float))
    if X.size == 0:
        raise InputError("need at least one candidate vector")
    if not np.all(np.isfinite(X)):
        raise InputError("candidate vectors must be finite")
    bad = np.flatnonzero(np.abs(np.linalg.norm(X, axis=1) - 1.0) > _UNIT_TOL)
    if bad.size:
        raise InputError(f"candidate {bad[0]} is not a unit vector")
    return X


def greedy_saturated_family(candidates):
    """Scan candidates in order, keeping each one whose inner product with
    every kept vector is at most 1/2. The result is maximal among the
    candidates and has at most ``3**n`` members.
    """
    X = _unit_rows(candidates)
    # each kept vector rules out every later candidate too close to it, which
    # is the sequential scan done one kept vector at a time
    alive = np.ones(len(X), dtype=bool)
    kept = []
    i = 0
    while i < len(X):
        kept.append(i)
        alive[i + 1:] &= X[i + 1:] @ X[i] <= 0.5
        rest = np.flatnonzero(alive[i + 1:])
        i = i + 1 + int(rest[0]) if rest.size else len(X)
    F = X[kept]
    G = F @ F.T
    np.fill_diagonal(G, -np.inf)
    max_dot = float(G.max()) if len(F) > 1 else -np.inf
    return SaturatedFamily(F, max_dot, np.asarray(kept))


@dataclass(frozen=True)
class HemisphereConstruction:
    zeta: np.ndarray
    v: np.ndarray
    family: SaturatedFamily
    min_dot: float


def hemisphere_construction(sigma):
    """Build ``zeta = v / |v|`` with ``v`` the sum of a saturated subfamily.

    ``sigma`` must satisfy ``<x, y> >= -(1/3)**(n+1)`` for all pairs;
    otherwise :class:`PreconditionError` names the first violating pair.
    """
    X = _unit_rows(sigma)
    n = X.shape[1]
    G = X @ X.T
    floor = -(3.0 ** -(n + 1)) - _DOT_SLACK
    i, j = np.unravel_index(np.argmin(G), G.shape)
    if G[i, j] < floor:
        bad = np.argwhere(G < floor)[0]
        raise PreconditionError(
            f"vectors {bad[0]} and {bad[1]} have inner product {G[bad[0], bad[1]]:.6g} "
            f"< -(1/3)^{n + 1}", pair=(int(bad[0]), int(bad[1])))
    fam = greedy_saturated_family(X)
    v = fam.vectors.sum(axis=0)
    zeta = v / np.linalg.norm(v)
    return HemisphereConstruction(zeta, v, fam, float((X @ zeta).min()))


def hemisphere_direction(sigma):
    """Unit ``zeta`` with ``<zeta, x> >= 3**(-(2n+1))`` for all ``x`` in ``sigma``."""
    return hemisphere_construction(sigma).zeta


@dataclass(frozen=True)
class BoundConstants:
    n: int
    delta: float
    epsilon: float
    C_n: float
    zeta_bound: float
    log_C_n: float


def bound_constants(n):
    if int(n) != n or not 2 <= n <= 16:
        raise InputError("bound constants are provided for 2 <= n <= 16")
    n = int(n)
    delta = 3.0 ** (-3 * n)
    log_eps = log_cap_fraction(n, delta ** 2) - math.log(4.0)
    return BoundConstants(
        n=n,
        delta=delta,
        epsilon=math.exp(log_eps),
        C_n=math.exp(-log_eps) if -log_eps < 709.0 else math.inf,
        zeta_bound=3.0 ** (-(2 * n + 1)),
        log_C_n=-log_eps,
    )


def length_constant(n):
    """``C_n`` for the length bound; in one dimension self-contracted curves
    are monotone, so length equals width and the constant is 1."""
    if n == 1:
        return 1.0
    return bound_constants(n).C_n


@dataclass(frozen=True)
class LengthBoundReport:
    length: float
    mean_width: float
    standard_error: float
    diameter: float
    C_n: float
    ratio: float
    holds: bool
    holds_diameter: bool


def verify_length_bound(curve, sampler, tol=None):
    """Check ``length <= C_n * W + 3 * se`` on a self-contracted curve.

    Also reports the coarser diameter form ``length <= C_n * diam`` and the
    empirical ratio ``length / W``.
    """
    verdict = is_self_contracted(curve, tol or DEFAULT_TOLERANCE)
    if not verdict.holds:
        raise PreconditionError(
            f"curve is not self-contracted: witness {verdict.witness}, "
            f"violation {verdict.violation:.3g}", verdict=verdict)
    ell = length(curve)
    est = mean_width(PointCloud(curve.points), sampler)
    C = length_constant(curve.dim)
    diam = diameter(curve.points)
    ratio = ell / est.value if est.value > 0 else (0.0 if ell == 0 else math.inf)
    return LengthBoundReport(
        length=ell,
        mean_width=est.value,
        standard_error=est.standard_error,
        diameter=diam,
        C_n=C,
        ratio=ratio,
        holds=bool(ell <= C * est.value + 3 * est.standard_error),
        holds_diameter=bool(ell <= C * diam),
    )


@dataclass(frozen=True)
class WidthMonotonicityReport:
    profile: np.ndarray
    decrements: np.ndarray
    required: np.ndarray
    standard_errors: np.ndarray
    epsilon: float
    holds: bool
    worst_index: int


def verify_width_monotonicity(curve, sampler, atol=None):
    """Per-step tail-width decrease against ``epsilon * step``.

    For consecutive samples ``p_k, p_{k+1}`` of a self-contracted curve the
    tail hull widths satisfy ``W_k - W_{k+1} >= epsilon |p_k - p_{k+1}|``; the
    check allows three Monte-Carlo standard errors of the paired difference
    plus ``atol``, which defaults to a few ulps of the coordinate scale since
    width changes below that cannot be resolved in floating point.
    """
    n = curve.dim
    eps = 1.0 if n == 1 else bound_constants(n).epsilon
    profile, W = tail_width_profile(curve, sampler, return_samples=True)
    if len(profile) < 2:
        empty = np.zeros(0)
        return WidthMonotonicityReport(profile, empty, empty, empty, eps, True, -1)
    diff = W[:-1] - W[1:]
    dec = diff.mean(axis=1)
    se = diff.std(axis=1, ddof=1) / math.sqrt(W.shape[1])
    steps = np.linalg.norm(np.diff(curve.points, axis=0), axis=1)
    req = eps * steps
    if atol is None:
        atol = 16 * np.finfo(float).eps * max(1.0, float(np.abs(curve.points).max()))
    slack = dec - (req - 3 * se - atol)
    worst = int(np.argmin(slack))
    return WidthMonotonicityReport(profile, dec, req, se, eps, bool(slack[worst] >= 0), worst)
