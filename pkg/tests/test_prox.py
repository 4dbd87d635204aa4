import numpy as np
import pytest
from scipy import optimize

from selfcontract import instances
from selfcontract import prox as P
from selfcontract.curves import DiscreteCurve
from selfcontract.errors import InputError, SolverError


def brute_prox(f, x, t):
    """Derivative-free minimization of the proximal objective from several starts."""
    x = np.asarray(x, dtype=float)
    phi = lambda z: f(z) + (z - x) @ (z - x) / (2 * t)
    best = None
    for start in (x, x + 0.3, x - 0.3):
        r = optimize.minimize(phi, start, method="Nelder-Mead",
                              options={"xatol": 1e-11, "fatol": 1e-15, "maxiter": 40_000})
        if best is None or r.fun < best.fun:
            best = r
    return best.x


# ---------------------------------------------------------------- catalog

def test_quadratic_closed_form_iterates():
    # f = x^2 with t = 1/2 halves the point each step
    f = P.quadratic([[2.0]])
    tr = P.run_prox(f, [1.0], P.ProxSchedule.constant(0.5), max_iter=10)
    assert np.allclose(tr.iterates[:, 0], 2.0 ** -np.arange(11), rtol=0, atol=1e-15)


def test_quadratic_validation():
    with pytest.raises(InputError):
        P.quadratic([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(InputError):
        P.quadratic([[-1.0]])
    with pytest.raises(InputError):
        P.quadratic([[0.0]], [1.0])   # linear, unbounded below


def test_quadratic_minimizer_and_infimum():
    f = P.quadratic([[2.0, 0.0], [0.0, 4.0]], [2.0, -4.0], 1.0)
    assert np.allclose(f.minimizer, [-1.0, 1.0])
    assert f.infimum == pytest.approx(f(f.minimizer))


@pytest.mark.parametrize("x, t, expected", [
    (2.0, 0.25, 1.75),        # outside: shift by t
    (-2.0, 0.5, -1.5),
    (0.3, 0.5, 0.15),         # inside: x / (1 + 2t)
    (0.75, 0.25, 0.5),        # kink boundary |x| = 1/2 + t
])
def test_piecewise_regions(x, t, expected):
    assert P.prox_step(P.paper_piecewise(), [x], t)[0] == pytest.approx(expected)


def test_piecewise_min_norm_subgradient():
    f = P.paper_piecewise()
    assert f.min_norm_subgradient([1.0]) == pytest.approx(1.0)
    assert f.min_norm_subgradient([0.0]) == 0.0
    assert f.min_norm_subgradient([0.25]) == pytest.approx(0.5)


def test_norm_soft_threshold():
    f = P.norm_scaled(1.0, 2)
    z = P.prox_step(f, [3.0, 4.0], 0.5)
    assert np.allclose(z, np.array([3.0, 4.0]) * (1 - 0.5 / 5))
    assert np.allclose(P.prox_step(f, [0.1, 0.1], 0.5), 0.0)


def test_max_affine_abs_value_is_soft_threshold():
    f = P.max_affine([[1.0], [-1.0]], [0.0, 0.0])
    assert P.prox_step(f, [2.0], 0.5)[0] == pytest.approx(1.5)
    assert P.prox_step(f, [0.2], 0.5)[0] == pytest.approx(0.0, abs=1e-15)
    assert f.infimum == pytest.approx(0.0, abs=1e-12)


def test_max_affine_2d_matches_brute_force():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((5, 2))
    a -= a.mean(axis=0)   # keep 0 in the hull so f is bounded below
    f = P.max_affine(a, rng.standard_normal(5))
    for _ in range(20):
        x, t = 3 * rng.standard_normal(2), rng.uniform(0.05, 1)
        z = P.prox_step(f, x, t)
        zb = brute_prox(f, x, t)
        phi = lambda w: f(w) + (w - x) @ (w - x) / (2 * t)
        assert phi(z) <= phi(zb) + 1e-9
        assert np.linalg.norm(z - zb) < 1e-4


def test_min_norm_in_hull():
    Q = np.array([[1.0, 1.0], [1.0, -1.0]])
    assert np.allclose(P.min_norm_in_hull(Q), [1.0, 0.0])
    assert np.allclose(P.min_norm_in_hull(np.array([[2.0, 0.0], [-1.0, 0.0]])), 0.0)


# ---------------------------------------------------------------- fallback solvers

ONE_D = [P.quadratic([[2.5]], [-1.0], 0.3), P.paper_piecewise(), P.norm_scaled(0.7, 1),
         P.max_affine([[1.0], [-2.0], [0.5]], [0.0, 1.0, 0.2])]


@pytest.mark.parametrize("f", ONE_D, ids=["quadratic", "piecewise", "norm", "maxaffine"])
def test_bisection_fallback_matches_exact(f):
    rng = np.random.default_rng(0)
    g = f.without_prox()
    assert g.prox is None
    for _ in range(50):
        x, t = rng.uniform(-4, 4), rng.uniform(1e-3, 1)
        assert P.prox_step(g, [x], t, tol=1e-12)[0] == pytest.approx(P.prox_step(f, [x], t)[0], abs=1e-9)


def test_gradient_descent_fallback_matches_exact():
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    f = P.quadratic(A, [1.0, -1.0])
    g = P.custom(2, f.value, f.subgradient, gradient=f.gradient, lipschitz=f.lipschitz)
    x = np.array([2.0, -3.0])
    z, res = P._prox(g, x, 0.7)
    assert res <= P.DEFAULT_PROX_TOL
    assert np.allclose(z, P.prox_step(f, x, 0.7), atol=1e-8)


def test_nelder_mead_fallback_matches_exact():
    f = P.norm_scaled(0.8, 2)
    g = P.custom(2, f.value, f.subgradient)
    x = np.array([1.5, -2.0])
    assert np.allclose(P.prox_step(g, x, 0.6, tol=1e-7), P.prox_step(f, x, 0.6), atol=1e-6)


def test_no_solver_for_nonsmooth_high_dimension():
    f = P.norm_scaled(1.0, 4)
    g = P.custom(4, f.value, f.subgradient)
    with pytest.raises(SolverError):
        P.prox_step(g, np.ones(4), 0.5)


# ---------------------------------------------------------------- schedules

def test_schedules():
    assert [P.ProxSchedule.geometric(0.5)[i] for i in range(3)] == [0.5, 0.25, 0.125]
    assert P.ProxSchedule.geometric(0.5, first=1.0)[2] == 0.25
    assert P.ProxSchedule.harmonic()[3] == 0.25
    assert P.ProxSchedule.constant(0.3)[100] == 0.3
    assert P.ProxSchedule.explicit([0.1, 0.2])[1] == 0.2


@pytest.mark.parametrize("make", [
    lambda: P.ProxSchedule.constant(1.5),
    lambda: P.ProxSchedule.constant(0.0),
    lambda: P.ProxSchedule.geometric(0.5, first=2.0),
    lambda: P.ProxSchedule.explicit([0.5, 1.01]),
    lambda: P.ProxSchedule("linear"),
])
def test_schedule_rejects_steps_outside_unit_interval(make):
    with pytest.raises(InputError):
        make()


def test_prox_step_rejects_bad_t():
    with pytest.raises(InputError):
        P.prox_step(P.paper_piecewise(), [1.0], 1.5)


def test_explicit_schedule_runs_out():
    with pytest.raises(InputError):
        P.run_prox(P.paper_piecewise(), [2.0], P.ProxSchedule.explicit([0.5]), max_iter=3)


# ---------------------------------------------------------------- traces

def test_worked_example_trace():
    f = P.paper_piecewise()
    tr = P.run_prox(f, [2.0], P.ProxSchedule.geometric(0.5), max_iter=60)
    # x_{i+1} = x_i - t_i while outside the quadratic region
    assert tr.iterates[1, 0] == 1.5 and tr.iterates[2, 0] == 1.25
    assert tr.iterates[-1, 0] == pytest.approx(1.0, abs=1e-6)
    assert f.min_norm_subgradient(tr.iterates[-1]) == pytest.approx(1.0)
    checks = P.verify_trace(tr, f)
    assert all(P._holds(v) for v in checks.values())


def test_run_prox_stop_rules():
    f = P.quadratic([[1.0]])
    tr = P.run_prox(f, [1.0], P.ProxSchedule.constant(1.0), max_iter=500, stop_step=1e-6)
    assert tr.terminated_by == "step_below_tol"
    tr = P.run_prox(P.norm_scaled(1.0, 1), [0.5], P.ProxSchedule.constant(1.0), max_iter=10)
    assert tr.terminated_by == "fixpoint" and len(tr) == 3


def test_verifiers_pass_on_random_traces():
    for seed in range(10):
        f, tr = instances.prox_polyline(2 + seed % 2, 25, seed)
        checks = P.verify_trace(tr, f, seed=seed)
        assert all(P._holds(v) for v in checks.values()), checks


def test_verifiers_catch_a_bad_trace():
    f = P.quadratic(np.eye(2))
    X = np.array([[2.0, 0.0], [1.0, 0.0], [1.8, 0.0]])
    tr = P.ProxTrace(X, np.array([f(x) for x in X]), np.array([0.5, 0.5]), np.zeros(2), "max_iter")
    assert not P.verify_value_decrease(tr).holds
    md = P.verify_monotone_distances(tr)
    assert not md.holds and md.witness == (0, 1, 2)
    assert not P.verify_optimality_residual(tr, f).holds
    assert not P.verify_projection_property(tr, f, seed=0).holds


def test_monotone_distances_matches_brute_force():
    rng = np.random.default_rng(8)
    for _ in range(30):
        X = rng.standard_normal((12, 2)).cumsum(axis=0) * rng.choice([0.05, 1.0])
        brute = all(np.linalg.norm(X[j] - X[k]) <= np.linalg.norm(X[i] - X[k]) + 1e-9
                    for k in range(12) for j in range(k + 1) for i in range(j))
        assert P.verify_monotone_distances(X).holds == brute


def test_convergence_bound_report():
    f, tr = instances.prox_polyline(3, 30, 5)
    rep = P.verify_convergence_bound(tr)
    assert rep.holds and rep.within_ball and not rep.inconclusive
    assert 1.0 <= rep.ratio <= 2 * rep.bound / rep.radius
    assert "last iterate" in rep.note


def test_convergence_bound_degenerate_and_violated():
    rep = P.verify_convergence_bound(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]))
    assert rep.inconclusive and not rep.holds
    # leaving the ball around the last point
    rep = P.verify_convergence_bound(np.array([[1.0], [3.0], [0.0]]), n=1)
    assert not rep.within_ball


def test_optimality_residual_rounding_allowance():
    # rounding to exactly 1.0 at t = 2^-53 still passes
    f = P.paper_piecewise()
    tr = P.run_prox(f, [2.0], P.ProxSchedule.geometric(0.5), max_iter=60)
    assert P.verify_optimality_residual(tr, f).holds


def test_trace_to_curve_drops_repeats():
    tr = P.run_prox(P.norm_scaled(1.0, 1), [0.5], P.ProxSchedule.constant(1.0), max_iter=5)
    assert len(P.trace_to_curve(tr)) == 2
    assert isinstance(P.trace_to_curve(tr), DiscreteCurve)
