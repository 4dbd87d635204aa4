"""
Proximal point algorithm for convex functions bounded below.

Each step solves ``min_x f(x) + |x - x_i|^2 / (2 t_i)`` with ``t_i in (0, 1]``.
Catalog functions carry exact proximal maps; other functions fall back to
bisection (1-D), gradient descent on the strongly convex subproblem (when a
gradient and its Lipschitz constant are declared) or Nelder-Mead (n <= 3).

Residuals are reported as ``t * dist((x - x+)/t, subdiff f(x+))`` when the
function can measure distances to its subdifferential, and as the fixed-point
gap of the inner solver otherwise.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

import math

import numpy as np
from scipy import optimize

from .curves import DEFAULT_TOLERANCE, DiscreteCurve, PredicateVerdict, _verdict, is_self_contracted
from .errors import InputError, SolverError
from .spherelemmas import length_constant

DEFAULT_PROX_TOL = 1e-10


# --------------------------------------------------------------------------
# convex functions

@dataclass(frozen=True)
class ConvexFunction:
    """Value and subgradient oracles of a convex function on R^n.

    ``subgradient(x)`` returns some element of the subdifferential.
    ``subdiff_dist(x, v)`` (optional) returns the distance from ``v`` to the
    whole subdifferential at ``x``. ``prox(x, t)`` (optional) is the exact
    proximal map. ``infimum`` is ``inf f`` when known.
    """
    dim: int
    value: Callable
    subgradient: Callable
    prox: Optional[Callable] = None
    gradient: Optional[Callable] = None
    lipschitz: Optional[float] = None
    subdiff_dist: Optional[Callable] = None
    infimum: Optional[float] = None
    minimizer: Optional[np.ndarray] = None
    tag: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return float(self.value(np.asarray(x, dtype=float)))

    def min_norm_subgradient(self, x):
        """Norm of the least-norm subgradient, when measurable."""
        if self.subdiff_dist is None:
            return float(np.linalg.norm(self.subgradient(np.asarray(x, dtype=float))))
        return float(self.subdiff_dist(np.asarray(x, dtype=float), np.zeros(self.dim)))

    def without_prox(self):
        """Same function with the closed-form proximal map removed."""
        return ConvexFunction(self.dim, self.value, self.subgradient, None, self.gradient,
                              self.lipschitz, self.subdiff_dist, self.infimum, self.minimizer,
                              "custom", dict(self.params))


def quadratic(A, b=None, c=0.0):
    """``f(x) = x'Ax/2 + b'x + c`` with ``A`` symmetric positive semidefinite."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, atol=1e-12):
        raise InputError("A must be a symmetric square matrix")
    eig = np.linalg.eigvalsh(A)
    scale = max(1.0, float(np.abs(eig).max()))
    if eig.min() < -1e-12 * scale:
        raise InputError("A must be positive semidefinite")
    b = np.zeros(n) if b is None else np.asarray(b, dtype=float).ravel()
    if b.size != n:
        raise InputError("b has the wrong dimension")
    c = float(c)
    xstar = np.linalg.lstsq(A, -b, rcond=None)[0]
    if np.linalg.norm(A @ xstar + b) > 1e-9 * (1 + np.linalg.norm(b)):
        raise InputError("quadratic is not bounded below (b outside the range of A)")

    def value(x):
        return 0.5 * x @ A @ x + b @ x + c

    def grad(x):
        return A @ x + b

    def prox(x, t):
        return np.linalg.solve(np.eye(n) + t * A, x - t * b)

    def dist(x, v):
        return float(np.linalg.norm(v - grad(x)))

    return ConvexFunction(n, value, grad, prox, grad, float(max(eig.max(), 0.0)), dist,
                          float(value(xstar)), xstar, "quadratic", {"A": A, "b": b, "c": c})


def paper_piecewise():
    """1-D ``f(x) = x^2`` on ``|x| <= 1/2`` and ``|x| - 1/4`` outside (C^1, convex)."""

    def value(x):
        a = abs(float(np.ravel(x)[0]))
        return a * a if a <= 0.5 else a - 0.25

    def deriv(s):
        return 2 * s if abs(s) <= 0.5 else math.copysign(1.0, s)

    def grad(x):
        return np.array([deriv(float(np.ravel(x)[0]))])

    def prox(x, t):
        x = float(np.ravel(x)[0])
        # s + t f'(s) = x; both branches meet at |x| = 1/2 + t, where the
        # quadratic branch is taken
        if abs(x) <= 0.5 + t:
            return np.array([x / (1 + 2 * t)])
        return np.array([x - math.copysign(t, x)])

    def dist(x, v):
        return float(abs(np.ravel(v)[0] - deriv(float(np.ravel(x)[0]))))

    return ConvexFunction(1, value, grad, prox, grad, 2.0, dist, 0.0, np.zeros(1),
                          "paper-example", {})


def norm_scaled(lam, dim):
    """``f(x) = lam * |x|_2``."""
    lam = float(lam)
    if not lam >= 0:
        raise InputError("lambda must be >= 0")

    def value(x):
        return lam * float(np.linalg.norm(x))

    def subgrad(x):
        r = np.linalg.norm(x)
        return lam * x / r if r > 0 else np.zeros(dim)

    def prox(x, t):
        r = np.linalg.norm(x)
        if r <= t * lam:
            return np.zeros(dim)
        return (1 - t * lam / r) * x

    def dist(x, v):
        r = np.linalg.norm(x)
        if r > 0:
            return float(np.linalg.norm(v - lam * x / r))
        return max(0.0, float(np.linalg.norm(v)) - lam)

    return ConvexFunction(dim, value, subgrad, prox, None, None, dist, 0.0, np.zeros(dim),
                          "norm", {"lambda": lam})


def _affine_min_norm(Q):
    # least-norm point of the affine hull of the rows of Q, with weights
    k = Q.shape[0]
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = Q @ Q.T
    K[:k, k] = K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    lam = np.linalg.lstsq(K, rhs, rcond=None)[0][:k]
    return lam, lam @ Q


def min_norm_in_hull(Q):
    """Least-norm point of ``conv(rows of Q)`` by active-set enumeration."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    k, n = Q.shape
    best = None
    for size in range(1, min(k, n + 1) + 1):
        for S in combinations(range(k), size):
            lam, p = _affine_min_norm(Q[list(S)])
            if np.all(lam >= -1e-12) and abs(lam.sum() - 1) < 1e-9:
                r = float(np.linalg.norm(p))
                if best is None or r < best[0]:
                    best = (r, p)
    return best[1]


def max_affine(a, b):
    """``f(x) = max_i <a_i, x> + b_i``, bounded below iff 0 is in conv(a_i)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    k, n = a.shape
    if b.size != k:
        raise InputError("need one offset per affine piece")
    if k > 16:
        raise InputError("max-affine functions are limited to 16 pieces")
    if np.linalg.norm(min_norm_in_hull(a)) > 1e-12:
        raise InputError("max-affine function is not bounded below (0 not in conv a_i)")
    lp = optimize.linprog(np.r_[np.zeros(n), 1.0], A_ub=np.c_[a, -np.ones(k)], b_ub=-b,
                          bounds=[(None, None)] * (n + 1), method="highs")
    inf_val = float(lp.fun)
    scale = 1.0 + float(np.abs(a).max()) + float(np.abs(b).max())

    def pieces(x):
        return a @ x + b

    def value(x):
        return float(pieces(x).max())

    def subgrad(x):
        return a[int(np.argmax(pieces(x)))].copy()

    def active(x):
        v = pieces(x)
        return np.flatnonzero(v >= v.max() - 1e-9 * scale * (1 + np.abs(x).max()))

    def dist(x, v):
        return float(np.linalg.norm(min_norm_in_hull(a[active(x)] - v)))

    def prox(y, t):
        c = a @ y + b
        best = None
        for size in range(1, min(k, n + 1) + 1):
            for S in combinations(range(k), size):
                S = list(S)
                m = len(S)
                # t G lam + mu 1 = c_S, 1'lam = 1
                K = np.zeros((m + 1, m + 1))
                K[:m, :m] = t * a[S] @ a[S].T
                K[:m, m] = K[m, :m] = 1.0
                sol = np.linalg.lstsq(K, np.r_[c[S], 1.0], rcond=None)[0]
                lam = sol[:m]
                if np.any(lam < -1e-12) or abs(lam.sum() - 1) > 1e-9:
                    continue
                x = y - t * lam @ a[S]
                obj = value(x) + (x - y) @ (x - y) / (2 * t)
                kkt = dist(x, (y - x) / t) * t
                key = (kkt > 1e-9 * scale, obj)
                if best is None or key < best[0]:
                    best = (key, x)
        return best[1]

    return ConvexFunction(n, value, subgrad, prox, None, None, dist, inf_val, None,
                          "maxaffine", {"a": a, "b": b})


def custom(dim, value, subgradient, *, gradient=None, lipschitz=None, prox=None,
           subdiff_dist=None, infimum=None):
    return ConvexFunction(dim, value, subgradient, prox, gradient, lipschitz, subdiff_dist,
                          infimum, None, "custom", {})


# --------------------------------------------------------------------------
# proximal maps

def _prox_1d_bisection(f, x, t, tol, max_iter=400):
    x0 = float(x[0])

    def h(s):
        return s - x0 + t * float(np.ravel(f.subgradient(np.array([s])))[0])

    width = t * (abs(float(np.ravel(f.subgradient(x))[0])) + 1.0)
    lo, hi = x0 - width, x0 + width
    for _ in range(200):
        if h(lo) <= 0:
            break
        lo -= 2 * (hi - lo)
    for _ in range(200):
        if h(hi) >= 0:
            break
        hi += 2 * (hi - lo)
    if h(lo) > 0 or h(hi) < 0:
        raise SolverError("could not bracket the proximal point")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if h(mid) < 0:
            lo = mid
        else:
            hi = mid
    return np.array([0.5 * (lo + hi)]), hi - lo


def _prox_gradient_descent(f, x, t, tol, max_iter=200_000):
    eta = 1.0 / (f.lipschitz + 1.0 / t)
    z = x.copy()
    for _ in range(max_iter):
        step = eta * (f.gradient(z) + (z - x) / t)
        z = z - step
        gap = float(np.linalg.norm(step))
        if gap <= tol:
            return z, gap
    raise SolverError("proximal gradient descent did not converge", gap)


def _prox_nelder_mead(f, x, t, tol):
    def phi(z):
        return f(z) + (z - x) @ (z - x) / (2 * t)

    opts = {"xatol": tol / 10, "fatol": 1e-16, "maxiter": 20_000, "maxfev": 40_000}
    z = optimize.minimize(phi, x, method="Nelder-Mead", options=opts).x
    z2 = optimize.minimize(phi, z, method="Nelder-Mead", options=opts).x
    return z2, float(np.linalg.norm(z2 - z))


def _prox(f, x, t, tol=DEFAULT_PROX_TOL):
    """Proximal point of ``f`` at ``x`` with parameter ``t > 0`` and its residual."""
    x = np.asarray(x, dtype=float).ravel()
    if f.prox is not None:
        z = np.asarray(f.prox(x, t), dtype=float).ravel()
        res = 0.0 if f.subdiff_dist is None else t * f.subdiff_dist(z, (x - z) / t)
        # exact maps are only as exact as floating point: judge relative to scale
        scale = 1.0 + float(np.abs(x).max())
        if res > max(tol, 1e-12 * scale):
            raise SolverError(f"exact proximal map has residual {res:.3g}", res)
        return z, res
    if f.dim == 1:
        z, res = _prox_1d_bisection(f, x, t, tol)
    elif f.gradient is not None and f.lipschitz is not None:
        z, res = _prox_gradient_descent(f, x, t, tol)
    elif f.dim <= 3:
        z, res = _prox_nelder_mead(f, x, t, tol)
    else:
        raise SolverError("no proximal solver for a nonsmooth function without exact prox in n > 3")
    if res > tol:
        raise SolverError(f"proximal subproblem residual {res:.3g} exceeds {tol:.3g}", res)
    return z, res


def prox_step(f, x, t, tol=DEFAULT_PROX_TOL):
    """One proximal step ``argmin_z f(z) + |z - x|^2 / (2t)``, ``t in (0, 1]``."""
    if not 0 < t <= 1:
        raise InputError(f"step size must lie in (0, 1], got {t!r}")
    if not tol > 0:
        raise InputError("tol must be > 0")
    x = np.asarray(x, dtype=float).ravel()
    if x.size != f.dim:
        raise InputError(f"dimension mismatch: f is {f.dim}-D, x is {x.size}-D")
    return _prox(f, x, t, tol)[0]


# --------------------------------------------------------------------------
# schedules and traces

@dataclass(frozen=True)
class ProxSchedule:
    """Step sizes ``t_i``; all must lie in (0, 1].

    kinds: ``constant`` (t_i = value), ``geometric`` (t_i = first * value**i,
    ``first`` defaulting to ``value``), ``harmonic`` (t_i = 1/(i+1)) and
    ``explicit`` (t_i = steps[i]).
    """
    kind: str
    value: float = 1.0
    first: Optional[float] = None
    steps: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "geometric", "harmonic", "explicit"):
            raise InputError(f"unknown schedule kind {self.kind!r}")
        if self.kind in ("constant", "geometric") and not 0 < self.value <= 1:
            raise InputError(f"schedule parameter must lie in (0, 1], got {self.value!r}")
        if self.kind == "geometric" and self.first is not None and not 0 < self.first <= 1:
            raise InputError(f"first step must lie in (0, 1], got {self.first!r}")
        if self.kind == "explicit":
            object.__setattr__(self, "steps", tuple(float(s) for s in self.steps))
            bad = [s for s in self.steps if not 0 < s <= 1]
            if bad:
                raise InputError(f"step sizes must lie in (0, 1], got {bad[0]!r}")

    @classmethod
    def constant(cls, t):
        return cls("constant", t)

    @classmethod
    def geometric(cls, ratio, first=None):
        return cls("geometric", ratio, first)

    @classmethod
    def harmonic(cls):
        return cls("harmonic")

    @classmethod
    def explicit(cls, steps):
        return cls("explicit", steps=tuple(steps))

    def __getitem__(self, i):
        if self.kind == "constant":
            return float(self.value)
        if self.kind == "geometric":
            first = self.value if self.first is None else self.first
            return float(first * self.value ** i)
        if self.kind == "harmonic":
            return 1.0 / (i + 1)
        if i >= len(self.steps):
            raise InputError(f"explicit schedule has only {len(self.steps)} steps")
        return self.steps[i]


@dataclass(frozen=True)
class ProxTrace:
    iterates: np.ndarray
    values: np.ndarray
    steps: np.ndarray
    residuals: np.ndarray
    terminated_by: str

    @property
    def dim(self):
        return self.iterates.shape[1]

    def __len__(self):
        return len(self.iterates)


def run_prox(f, x0, schedule, max_iter=100, stop_step=0.0, tol=DEFAULT_PROX_TOL):
    """Run the proximal algorithm from ``x0``.

    Stops after ``max_iter`` steps, when a step returns the same point
    (``fixpoint``) or when a step is shorter than ``stop_step``
    (``step_below_tol``).
    """
    if max_iter < 1:
        raise InputError("max_iter must be >= 1")
    x = np.asarray(x0, dtype=float).ravel()
    if x.size != f.dim:
        raise InputError(f"dimension mismatch: f is {f.dim}-D, x0 is {x.size}-D")
    xs, vals, ts, res = [x], [f(x)], [], []
    reason = "max_iter"
    for i in range(max_iter):
        t = schedule[i]
        if not 0 < t <= 1:
            raise InputError(f"step size must lie in (0, 1], got {t!r}")
        z, r = _prox(f, x, t, tol)
        xs.append(z)
        vals.append(f(z))
        ts.append(t)
        res.append(r)
        step = float(np.linalg.norm(z - x))
        x = z
        if step == 0.0:
            reason = "fixpoint"
            break
        if step < stop_step:
            reason = "step_below_tol"
            break
    return ProxTrace(np.array(xs), np.array(vals), np.array(ts), np.array(res), reason)


def trace_to_curve(trace):
    """Polyline through the iterates, consecutive duplicates removed."""
    return DiscreteCurve(trace.iterates).collapsed()[0]


# --------------------------------------------------------------------------
# verification

def verify_value_decrease(trace, tol=DEFAULT_TOLERANCE.abs_tol):
    """``f(x_i) - f(x_{i+1}) >= |x_{i+1} - x_i|^2 / (2 t_i) - tol``.

    This forces a strict decrease whenever the predicted drop exceeds ``tol``;
    smaller drops are below what the stored values can resolve.
    """
    steps = np.linalg.norm(np.diff(trace.iterates, axis=0), axis=1)
    drop = trace.values[:-1] - trace.values[1:]
    slack = drop - steps ** 2 / (2 * trace.steps)
    bad = np.flatnonzero(slack < -tol)
    margin = float(slack.min()) if slack.size else float("inf")
    if bad.size:
        i = int(bad[0])
        return _verdict(False, (i, i + 1), max(-slack[i], tol), margin,
                        f"value does not decrease enough from x{i} to x{i + 1}")
    return _verdict(True, None, 0.0, margin)


def verify_optimality_residual(trace, f, tol=1e-8):
    """``(x_i - x_{i+1}) / t_i`` lies within ``tol`` of the subdifferential at ``x_{i+1}``.

    Stored iterates carry rounding error of a few ulps, which the division by
    ``t_i`` magnifies; the allowance is ``tol + 4 eps max(1, |x_i|, |x_{i+1}|) / t_i``.
    """
    if f.subdiff_dist is None:
        raise InputError("function cannot measure subdifferential distances")
    X = trace.iterates
    d = np.array([f.subdiff_dist(X[i + 1], (X[i] - X[i + 1]) / trace.steps[i])
                  for i in range(len(X) - 1)])
    scale = np.maximum(1.0, np.maximum(np.abs(X[:-1]).max(axis=1), np.abs(X[1:]).max(axis=1)))
    allow = tol + 4 * np.finfo(float).eps * scale / trace.steps
    slack = allow - d
    margin = float(slack.min()) if slack.size else float("inf")
    if slack.size and margin < 0:
        i = int(np.flatnonzero(slack < 0)[0])
        return _verdict(False, (i, i + 1), d[i], margin,
                        f"optimality residual {d[i]:.3g} at step {i}")
    return _verdict(True, None, 0.0, margin)


def verify_monotone_distances(points, tol=DEFAULT_TOLERANCE.abs_tol):
    """``|x_{i2} - x_{i3}| <= |x_{i1} - x_{i3}|`` for every ``i1 < i2 <= i3``.

    Accepts a trace, a curve or a point array. Each ``i2`` is compared with
    the closest earlier point to ``x_{i3}``, which covers all triples.
    """
    if isinstance(points, ProxTrace):
        points = points.iterates
    elif isinstance(points, DiscreteCurve):
        points = points.points
    X = np.atleast_2d(np.asarray(points, dtype=float))
    margin = float("inf")
    for i3 in range(1, len(X)):
        d = np.linalg.norm(X[:i3 + 1] - X[i3], axis=1)
        closest_before = np.minimum.accumulate(d)[:-1]
        slack = closest_before - d[1:]
        margin = min(margin, float(slack.min()))
        bad = np.flatnonzero(slack < -tol)
        if bad.size:
            i2 = int(bad[0]) + 1
            i1 = int(np.argmin(d[:i2]))
            return _verdict(False, (i1, i2, i3), -slack[bad[0]], margin,
                            f"x{i2} is farther from x{i3} than x{i1}")
    return _verdict(True, None, 0.0, margin)


def verify_projection_property(trace, f, seed=0, samples=64, tol=DEFAULT_TOLERANCE.abs_tol,
                               max_attempts=None):
    """Sampled check that ``x_{i+1}`` is the nearest point of ``[f <= f(x_{i+1})]`` to ``x_i``.

    Candidates ``y`` are drawn uniformly from a ball around ``x_{i+1}`` and
    kept when ``f(y) <= f(x_{i+1})``. Steps where no sublevel point was found
    are listed in the verdict message rather than failing it.
    """
    rng = np.random.default_rng(seed)
    X = trace.iterates
    n = X.shape[1]
    max_attempts = max_attempts or 50 * samples
    margin = float("inf")
    starved = []
    for i in range(len(X) - 1):
        xi, xn = X[i], X[i + 1]
        step = float(np.linalg.norm(xn - xi))
        level = f(xn)
        radius = max(2.0 * step, 1e-3)
        found = 0
        attempts = 0
        while found < samples and attempts < max_attempts:
            batch = min(4 * samples, max_attempts - attempts)
            G = rng.standard_normal((batch, n))
            G /= np.linalg.norm(G, axis=1)[:, None]
            Y = xn + radius * G * rng.random(batch)[:, None] ** (1.0 / n)
            attempts += batch
            inside = np.array([f(y) <= level for y in Y])
            Y = Y[inside][: samples - found]
            found += len(Y)
            if not len(Y):
                continue
            slack = np.linalg.norm(Y - xi, axis=1) + tol - step
            margin = min(margin, float(slack.min()))
            if slack.min() < 0:
                j = int(np.argmin(slack))
                return _verdict(False, (i, i + 1, j), -slack[j], margin,
                                f"a sublevel point is closer to x{i} than x{i + 1}")
        if found == 0:
            starved.append(i)
    msg = f"no sublevel samples found for steps {starved}" if starved else ""
    return _verdict(True, None, 0.0, margin, msg)


@dataclass(frozen=True)
class ConvergenceReport:
    total_step_sum: float
    radius: float
    bound: float
    ratio: float
    holds: bool
    within_ball: bool
    inconclusive: bool
    note: str = ""


def verify_convergence_bound(trace, n=None, tol=DEFAULT_TOLERANCE.abs_tol):
    """Step-sum bound ``sum |x_i - x_{i+1}| <= 2 C_n |x_0 - x_inf|``.

    ``x_inf`` is approximated by the final iterate. Also checks
    ``|x_i - x_inf| <= |x_0 - x_inf|`` for every ``i``.
    """
    X = trace.iterates if isinstance(trace, ProxTrace) else np.atleast_2d(trace)
    if len(X) < 2:
        raise InputError("need at least two iterates")
    n = X.shape[1] if n is None else n
    total = float(np.linalg.norm(np.diff(X, axis=0), axis=1).sum())
    R = float(np.linalg.norm(X[0] - X[-1]))
    within = bool(np.all(np.linalg.norm(X - X[-1], axis=1) <= R + tol))
    C = length_constant(n)
    bound = 2 * C * R
    note = "limit approximated by the last iterate"
    if R == 0.0:
        return ConvergenceReport(total, R, bound, math.inf if total > 0 else 1.0,
                                 total == 0.0, within, total > 0, note)
    return ConvergenceReport(total, R, bound, total / R, bool(total <= bound + tol),
                             within, False, note)


def verify_trace(trace, f, seed=0, samples=32):
    """Run every trace-level check; returns ``{name: verdict-or-report}``."""
    curve = DiscreteCurve(trace.iterates)
    out = {
        "self_contracted": is_self_contracted(curve),
        "monotone_distances": verify_monotone_distances(trace),
        "value_decrease": verify_value_decrease(trace),
        "projection": verify_projection_property(trace, f, seed=seed, samples=samples),
    }
    if f.subdiff_dist is not None and f.prox is not None:
        out["optimality"] = verify_optimality_residual(trace, f)
    if len(trace) >= 2:
        out["convergence"] = verify_convergence_bound(trace)
    return out


def _holds(result):
    if isinstance(result, PredicateVerdict):
        return result.holds
    return result.holds and result.within_ball
