"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run on its own with ``pytest tests/test_acceptance.py -v``; the summary
lines appear at the end of the pytest report.
"""

import math

import numpy as np
import pytest
from scipy import optimize

from selfcontract import curves, foliation, geomcore, instances, prox, spherelemmas
from selfcontract.curves import DiscreteCurve

SAMPLES = 100_000


def test_c01_noncritical_limit(record):
    f = prox.paper_piecewise()
    trace = prox.run_prox(f, [2.0], prox.ProxSchedule.geometric(0.5), max_iter=60)
    limit = trace.iterates[-1]
    g = float(np.linalg.norm(f.min_norm_subgradient(limit)))
    err = abs(limit[0] - 1.0)
    ok = err <= 1e-6 and abs(g - 1.0) <= 1e-12
    record(1, "noncritical limit", ok, f"|x_final - 1| = {err:.2e}, |subgrad|min = {g:g}")
    assert ok


def test_c02_prox_traces_self_contracted(record, prox_corpus):
    fails = []
    for seed, (_, trace) in enumerate(prox_corpus):
        sc = curves.is_self_contracted(DiscreteCurve(trace.iterates))
        md = prox.verify_monotone_distances(trace)
        if not (sc.holds and md.holds):
            fails.append(seed)
    ok = not fails
    record(2, "prox traces are self-contracted", ok, f"{len(fails)} failures / 100, seeds {fails[:5]}")
    assert ok


def test_c03_length_bound(record, prox_corpus):
    sampler = geomcore.SphereSampler(seed=42, count=SAMPLES)
    fails, worst = [], 0.0
    for seed, (_, trace) in enumerate(prox_corpus):
        rep = spherelemmas.verify_length_bound(DiscreteCurve(trace.iterates), sampler)
        worst = max(worst, rep.ratio)
        if not rep.holds:
            fails.append(seed)
    ok = not fails
    record(3, "length <= C_n W + 3 se", ok,
           f"{len(fails)} failures, max length/W = {worst:.3f} vs C_2 = {spherelemmas.length_constant(2):.3g}")
    assert ok


def _uniform_sphere(rng, k, n):
    G = rng.standard_normal((k, n))
    return G / np.linalg.norm(G, axis=1)[:, None]


def test_c04_saturated_family_size(record):
    rng = np.random.default_rng(2024)
    fails, biggest = [], {}
    for n in (2, 3, 4, 5):
        for _ in range(1000):
            fam = spherelemmas.greedy_saturated_family(_uniform_sphere(rng, 4 * 3 ** n, n))
            biggest[n] = max(biggest.get(n, 0), len(fam))
            if len(fam) > 3 ** n or fam.max_pairwise_dot > 0.5:
                fails.append(n)
    ok = not fails
    record(4, "saturated families have <= 3^n members", ok,
           "largest " + ", ".join(f"n={n}: {k}/{3 ** n}" for n, k in biggest.items()))
    assert ok


def hypothesis_set(rng, n, size=60):
    """Random unit vectors whose pairwise inner products are >= -(1/3)^(n+1).

    Candidates come from a cap slightly wider than a quarter sphere, so some
    pairs fail the hypothesis; those are filtered out greedily.
    """
    floor = -(3.0 ** -(n + 1))
    pole = _uniform_sphere(rng, 1, n)[0]
    kept = []
    while len(kept) < size:
        U = _uniform_sphere(rng, 4 * size, n)
        U = U[U @ pole >= math.cos(0.5 * math.pi * 0.55)]
        for u in U:
            if all(u @ w >= floor for w in kept):
                kept.append(u)
                if len(kept) == size:
                    break
    return np.array(kept)


def test_c05_hemisphere_direction(record):
    rng = np.random.default_rng(7)
    fails, worst = [], {}
    for n in (2, 3, 4):
        lb = 3.0 ** -(2 * n + 1)
        for _ in range(500):
            h = spherelemmas.hemisphere_construction(hypothesis_set(rng, n))
            worst[n] = min(worst.get(n, np.inf), h.min_dot)
            if h.min_dot < lb - 1e-12 or h.v @ h.v > 3.0 ** (2 * n):
                fails.append(n)
    ok = not fails
    record(5, "hemisphere direction", ok,
           "min <zeta,x> " + ", ".join(f"n={n}: {v:.3g} (>= {3.0 ** -(2 * n + 1):.2g})"
                                       for n, v in worst.items()))
    assert ok


def test_c06_reversal_equivalence(record, prox_corpus):
    cases = [DiscreteCurve(t.iterates) for _, t in prox_corpus]
    cases += [instances.random_walk(2 + s % 3, 50, 1000 + s) for s in range(100)]
    mismatch, sc_count = [], 0
    for k, c in enumerate(cases):
        sc = curves.is_self_contracted(c, mode="polygonal").holds
        se = curves.is_self_expanded(curves.reverse(c)).holds
        sc_count += sc
        if sc != se:
            mismatch.append(k)
    ok = not mismatch
    record(6, "SC(curve) == SE(reverse(curve))", ok,
           f"{len(cases)} curves, {sc_count} SC, {len(mismatch)} mismatches")
    assert ok


def test_c07_mean_width_calibration(record):
    rows = []
    for seed in (42, 43):
        s = geomcore.SphereSampler(seed=seed, count=SAMPLES)
        rows.append(("ball R2", geomcore.mean_width(geomcore.Ball(np.zeros(2), 1.0), s).value, 2.0))
        rows.append(("ball R3", geomcore.mean_width(geomcore.Ball(np.zeros(3), 1.0), s).value, 2.0))
        seg = geomcore.PointCloud([[0.0, 0.0], [1.0, 0.0]])
        rows.append(("segment R2", geomcore.mean_width(seg, s).value, 2 / math.pi))
    rel = max(abs(v - exact) / exact for _, v, exact in rows)
    ok = rel <= 0.01
    record(7, "mean width calibration", ok, f"worst relative error {rel:.2e}")
    assert ok


def test_c08_width_monotonicity(record):
    sampler = geomcore.SphereSampler(seed=42, count=SAMPLES)
    fails = []
    for seed in range(20):
        _, trace = instances.prox_polyline(2, 30, 500 + seed)
        curve = trace_to_curve_2d(trace)
        rep = spherelemmas.verify_width_monotonicity(curve, sampler)
        if not (rep.holds and np.all(np.diff(rep.profile) <= 0)):
            fails.append(seed)
    ok = not fails
    record(8, "tail width decreases by >= eps * step", ok, f"{len(fails)} failures / 20")
    assert ok


def trace_to_curve_2d(trace):
    assert trace.dim == 2
    return prox.trace_to_curve(trace)


@pytest.fixture(scope="module")
def flow_curve():
    f = prox.quadratic(np.diag([1.0, 4.0]))
    raw = foliation.gradient_flow_curve(f, [1.0, 1.0], 1e-3, 10.0)
    return curves.arc_length_reparam(raw, 1e-3)


def test_c09_polygonal_approximation(record, flow_curve):
    parts, ok = [], True
    for delta in (0.02, 0.05, 0.1):
        res = foliation.polygonal_approximation(flow_curve, delta)
        sc = curves.is_self_contracted(res.polyline).holds
        good = sc and res.hausdorff_achieved <= delta + 1e-6
        ok &= good
        parts.append(f"delta={delta}: {len(res.polyline)} vertices, d_H={res.hausdorff_achieved:.2e}, SC={sc}")
    record(9, "self-contracted polygonal approximation", ok, "; ".join(parts))
    assert ok


def golden_oracle(f, x, t):
    """Grid scan followed by golden-section refinement of the prox objective."""
    obj = lambda z: f(np.array([z])) + (z - x) ** 2 / (2 * t)
    grid = np.linspace(x - 20.0, x + 20.0, 401)
    vals = np.array([obj(z) for z in grid])
    i = int(np.clip(np.argmin(vals), 1, len(grid) - 2))
    res = optimize.minimize_scalar(obj, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                   method="golden", tol=1e-12)
    return res.x


def one_d_catalog():
    return [
        ("quadratic", prox.quadratic([[2.5]], [-1.0], 0.3)),
        ("paper-example", prox.paper_piecewise()),
        ("norm", prox.norm_scaled(0.7, 1)),
        ("maxaffine", prox.max_affine([[1.0], [-2.0], [0.5]], [0.0, 1.0, 0.2])),
    ]


def test_c10_prox_matches_oracle(record):
    rng = np.random.default_rng(99)
    cat = one_d_catalog()
    worst, where = 0.0, None
    for k in range(1000):
        name, f = cat[k % len(cat)]
        x, t = rng.uniform(-5, 5), rng.uniform(1e-3, 1.0)
        err = abs(prox.prox_step(f, [x], t)[0] - golden_oracle(f, x, t))
        if err > worst:
            worst, where = err, (name, x, t)
    ok = worst <= 1e-6
    record(10, "prox_step matches golden-section oracle", ok, f"max |diff| = {worst:.2e} at {where[0]}")
    assert ok


def test_c11_arc_length_reparam(record, prox_corpus):
    fails, worst_ratio, worst_len = [], 0.0, 0.0
    for seed, (_, trace) in enumerate(prox_corpus):
        c = DiscreteCurve(trace.iterates)
        L = curves.length(c)
        r = curves.arc_length_reparam(c, L / 200)
        P, s = r.points, r.params
        ratio = float((np.linalg.norm(np.diff(P, axis=0), axis=1) / np.diff(s)).max())
        dlen = abs(curves.length(r) - L)
        worst_ratio, worst_len = max(worst_ratio, ratio), max(worst_len, dlen)
        if ratio > 1 + 1e-12 or dlen > 1e-9 or not curves.is_self_contracted(r).holds:
            fails.append(seed)
    ok = not fails
    record(11, "arc-length reparameterization", ok,
           f"{len(fails)} failures, max Lipschitz ratio {worst_ratio:.15g}, max length change {worst_len:.1e}")
    assert ok


def test_c12_prox_convergence_bound(record, prox_corpus):
    fails, worst = [], 0.0
    for seed, (_, trace) in enumerate(prox_corpus):
        rep = prox.verify_convergence_bound(trace)
        worst = max(worst, rep.ratio)
        if not (rep.holds and rep.within_ball):
            fails.append(seed)
    ok = not fails
    record(12, "step sum <= 2 C_n |x0 - x_last|", ok,
           f"{len(fails)} failures, max step-sum ratio {worst:.3f}")
    assert ok
