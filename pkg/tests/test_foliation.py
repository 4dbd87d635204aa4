import numpy as np
import pytest

from selfcontract import curves, foliation as F, prox
from selfcontract.curves import DiscreteCurve
from selfcontract.errors import InputError, PreconditionError


def test_radial_projection_onto_disks():
    f = prox.quadratic(2 * np.eye(2))          # |x|^2
    orbit = F.sublevel_projection_orbit(f, [2.0, 0.0], [1.0, 0.25])
    assert np.allclose(orbit.curve.points, [[2, 0], [1, 0], [0.5, 0]], atol=1e-10)
    assert np.allclose(orbit.levels, [4.0, 1.0, 0.25])


def test_level_equal_to_start_stays_put():
    f = prox.quadratic(2 * np.eye(2))
    assert np.array_equal(F.project_to_sublevel(f, [2.0, 0.0], 4.0), [2.0, 0.0])
    orbit = F.sublevel_projection_orbit(f, [2.0, 0.0], [4.0, 1.0])
    assert len(orbit.curve) == 2


def test_projection_is_nearest_point():
    # compare with constrained minimization of |y - x| over [f <= r]
    from scipy import optimize
    f = prox.quadratic(np.diag([1.0, 9.0]))
    x, r = np.array([2.0, 1.5]), 0.3
    p = F.project_to_sublevel(f, x, r)
    cons = {"type": "ineq", "fun": lambda y: r - f(y)}
    ref = optimize.minimize(lambda y: (y - x) @ (y - x), np.zeros(2), constraints=[cons],
                            method="SLSQP", options={"ftol": 1e-14}).x
    assert np.allclose(p, ref, atol=1e-6)
    assert f(p) == pytest.approx(r, abs=1e-12)


def test_level_below_infimum_rejected():
    f = prox.quadratic(np.eye(2), c=1.0)
    with pytest.raises(InputError):
        F.project_to_sublevel(f, [3.0, 0.0], 0.5)


def test_levels_must_decrease():
    f = prox.quadratic(np.eye(2))
    with pytest.raises(InputError):
        F.sublevel_projection_orbit(f, [1.0, 1.0], [0.5, 0.6])
    with pytest.raises(InputError):
        F.sublevel_projection_orbit(f, [1.0, 1.0], [2.0])


def test_anisotropic_orbit_is_strictly_self_contracted():
    f = prox.quadratic(np.diag([1.0, 6.0]), [0.3, -0.2])
    x0 = np.array([3.0, 2.0])
    levels = np.linspace(f(x0) * 0.9, f.infimum + 0.01, 10)
    orbit = F.sublevel_projection_orbit(f, x0, levels)
    v = curves.is_self_contracted(orbit.curve)
    assert v.holds and v.margin > 0
    assert F.decreasing_level_check(orbit, f).holds


def test_orbit_of_max_affine():
    f = prox.max_affine([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], np.zeros(4))
    orbit = F.sublevel_projection_orbit(f, [3.0, 1.0], [2.0, 1.0, 0.5])
    assert curves.is_self_contracted(orbit.curve).holds
    assert F.decreasing_level_check(orbit, f).holds


def test_decreasing_level_check_cases():
    f = prox.quadratic(np.eye(1))
    single = F.FoliationOrbit(DiscreteCurve([[1.0]]), np.array([0.5]))
    assert F.decreasing_level_check(single, f).holds
    wrong = F.FoliationOrbit(DiscreteCurve([[1.0], [0.5]]), np.array([0.5, 0.2]))
    assert not F.decreasing_level_check(wrong, f).holds
    # a prox trace read as an orbit
    tr = prox.run_prox(f, [2.0], prox.ProxSchedule.constant(0.5), max_iter=8)
    assert F.decreasing_level_check(F.FoliationOrbit(DiscreteCurve(tr.iterates), tr.values), f).holds


def test_gradient_flow_matches_exponential():
    f = prox.quadratic(np.eye(2))
    x0 = np.array([1.0, -2.0])
    c = F.gradient_flow_curve(f, x0, 1e-3, 1.0)
    exact = x0[None, :] * np.exp(-c.params)[:, None]
    assert np.abs(c.points - exact).max() < 1e-8
    assert c.params[-1] == 1.0


def test_gradient_flow_fourth_order():
    f = prox.quadratic(np.eye(1))
    errs = []
    for h in (0.1, 0.05):
        c = F.gradient_flow_curve(f, [1.0], h, 2.0)
        errs.append(np.abs(c.points[:, 0] - np.exp(-c.params)).max())
    assert errs[0] / errs[1] >= 8


def test_gradient_flow_edge_cases():
    f = prox.quadratic(np.eye(2))
    c = F.gradient_flow_curve(f, [1.0, 1.0], 0.3, 1.0)
    assert c.params[-1] == pytest.approx(1.0) and len(c) == 5
    assert len(F.gradient_flow_curve(f, [1.0, 1.0], 0.1, 0.0)) == 1
    with pytest.raises(InputError):
        F.gradient_flow_curve(prox.custom(1, np.abs, np.sign), [1.0], 0.1, 1.0)
    with pytest.raises(InputError):
        F.gradient_flow_curve(f, [1.0, 1.0], 0.0, 1.0)


def test_flow_curve_is_strongly_self_contracted():
    f = prox.quadratic(np.diag([1.0, 4.0]))
    c = curves.arc_length_reparam(F.gradient_flow_curve(f, [1.0, 1.0], 1e-2, 4.0), 1e-2)
    assert curves.secant_cone_check(c).holds


def test_approximation_of_straight_segment():
    t = np.linspace(0, 1, 101)
    c = DiscreteCurve(np.c_[t, 2 * t])
    for delta in (0.05, 0.5, 5.0):
        res = F.polygonal_approximation(c, delta)
        assert len(res.polyline) == 2
        assert res.hausdorff_achieved < 1e-12
        assert list(res.vertex_source_indices) == [0, 100]


def test_approximation_guarantees_on_flow_curve():
    f = prox.quadratic(np.diag([1.0, 4.0]))
    c = curves.arc_length_reparam(F.gradient_flow_curve(f, [1.0, 1.0], 1e-2, 5.0), 5e-3)
    L = curves.length(c)
    for delta in (0.05, 0.2, 2 * L):
        res = F.polygonal_approximation(c, delta)
        assert F.approximation_holds(res)
        idx = res.vertex_source_indices
        assert np.all(np.diff(idx) > 0) and idx[0] == 0 and idx[-1] == len(c) - 1
        assert np.array_equal(res.polyline.points, c.points[idx])
        # retained vertices satisfy the strict normal-cone rule
        Z = res.polyline.points
        for k in range(1, len(Z)):
            v = Z[k - 1] - Z[k]
            later = Z[k + 1:] - Z[k]
            if len(later):
                cos = later @ v / (np.linalg.norm(later, axis=1) * np.linalg.norm(v))
                assert cos.max() <= -1e-6


def test_approximation_rejects_non_strong_curve():
    c = DiscreteCurve([[0, 0], [1, 0], [1, 1], [0, 1]])
    with pytest.raises(PreconditionError):
        F.polygonal_approximation(c, 0.5)
    with pytest.raises(InputError):
        F.polygonal_approximation(DiscreteCurve([[0, 0], [1, 0]]), 0)


def test_approximation_window_too_small():
    c = DiscreteCurve([[0, 0], [1, 0], [2, 0]])
    with pytest.raises(PreconditionError):
        F.polygonal_approximation(c, 0.5)
