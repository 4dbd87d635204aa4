"""
Command-line interface: ``selfcontract <command> ...``.

Exit codes: 0 when the checked property holds, 1 when it is violated (a
witness is printed), 2 on malformed input or usage errors.

Function specs::

    quadratic:A=1,0|0,4;b=0,0;c=0     (rows of A separated by '|')
    paper-example
    norm:lambda=0.5;dim=2             (dim defaults to the length of x0)
    maxaffine:a=1|-1;b=0,0            (one gradient row per piece)

Schedule specs::

    constant:T   geometric:R[:FIRST]   harmonic   explicit:T0,T1,...
"""

import argparse
import os
import sys

import numpy as np

from . import curves, foliation, geomcore, instances, io, prox, spherelemmas
from .errors import InputError, PreconditionError, SolverError

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT = 0, 1, 2
SEED_ENV = "SELFCONTRACT_SEED"


# --------------------------------------------------------------------------
# input grammars

def _floats(text, what):
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"bad number list for {what}: {text!r}") from None
    if not vals:
        raise InputError(f"empty number list for {what}")
    return vals


def _matrix(text, what):
    rows = [_floats(r, what) for r in text.split("|")]
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"ragged rows in {what}")
    return np.array(rows)


def _keyvals(body):
    out = {}
    for part in filter(None, (p.strip() for p in body.split(";"))):
        key, sep, val = part.partition("=")
        if not sep:
            raise InputError(f"expected key=value, got {part!r}")
        out[key.strip()] = val.strip()
    return out


def parse_function(spec, dim=None):
    """Build a :class:`~selfcontract.prox.ConvexFunction` from a spec string."""
    name, _, body = spec.strip().partition(":")
    kv = _keyvals(body)

    def unknown(allowed):
        extra = set(kv) - set(allowed)
        if extra:
            raise InputError(f"unknown keys for {name}: {sorted(extra)}")

    if name == "paper-example":
        unknown(())
        return prox.paper_piecewise()
    if name == "quadratic":
        unknown(("A", "b", "c"))
        if "A" not in kv:
            raise InputError("quadratic needs A=...")
        A = _matrix(kv["A"], "A")
        b = np.array(_floats(kv["b"], "b")) if "b" in kv else None
        c = float(_floats(kv["c"], "c")[0]) if "c" in kv else 0.0
        return prox.quadratic(A, b, c)
    if name == "norm":
        unknown(("lambda", "dim"))
        lam = _floats(kv.get("lambda", "1"), "lambda")[0]
        d = int(_floats(kv["dim"], "dim")[0]) if "dim" in kv else dim
        if d is None:
            raise InputError("norm needs dim=... (or an x0 to infer it from)")
        return prox.norm_scaled(lam, d)
    if name == "maxaffine":
        unknown(("a", "b"))
        if "a" not in kv:
            raise InputError("maxaffine needs a=...")
        a = _matrix(kv["a"], "a")
        b = np.array(_floats(kv["b"], "b")) if "b" in kv else np.zeros(len(a))
        return prox.max_affine(a, b)
    raise InputError(f"unknown function {name!r}")


def parse_schedule(spec):
    kind, _, rest = spec.strip().partition(":")
    args = [a for a in rest.split(":") if a] if rest else []
    if kind == "constant" and len(args) == 1:
        return prox.ProxSchedule.constant(_floats(args[0], "constant")[0])
    if kind == "geometric" and len(args) in (1, 2):
        first = _floats(args[1], "first")[0] if len(args) == 2 else None
        return prox.ProxSchedule.geometric(_floats(args[0], "ratio")[0], first)
    if kind == "harmonic" and not args:
        return prox.ProxSchedule.harmonic()
    if kind == "explicit" and len(args) == 1:
        return prox.ProxSchedule.explicit(_floats(args[0], "explicit"))
    raise InputError(f"bad schedule spec {spec!r}")


# --------------------------------------------------------------------------
# helpers

def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_input(path):
    """Curve CSV or trace JSON; returns ``(curve, json_doc_or_None)``."""
    text = _read_text(path)
    if path.endswith(".json") or text.lstrip().startswith("{"):
        doc = io.parse_trace_json(text)
        return curves.DiscreteCurve(doc["points"]), doc
    return io.parse_curve_csv(text), None


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tolerance(args):
    return curves.ToleranceConfig(abs_tol=args.tol, rel_margin=args.margin)


def _sampler(args):
    return geomcore.SphereSampler(seed=args.seed, count=args.samples)


def _point(text, what="x0"):
    return np.array(_floats(text, what))


def _report(pairs):
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        if isinstance(v, float):
            v = f"{v:.10g}"
        print(f"{k:<{width}}  {v}")


def _verdict_line(name, v):
    if v.holds:
        return f"{name}: HOLDS (margin {v.margin:.6g})"
    return f"{name}: VIOLATED witness={v.witness} violation={v.violation:.6g}"


# --------------------------------------------------------------------------
# commands

_CHECKS = {
    "sc": lambda c, tol: curves.is_self_contracted(c, tol),
    "sc-polygonal": lambda c, tol: curves.is_self_contracted(c, tol, mode="polygonal"),
    "se": curves.is_self_expanded,
    "strong": curves.secant_cone_check,
    "halfspace": curves.check_halfspace_property,
}


def cmd_check(args):
    curve, _ = load_input(args.input)
    v = _CHECKS[args.mode](curve, _tolerance(args))
    if v.holds:
        print(f"HOLDS mode={args.mode} points={len(curve)} margin={v.margin:.6g}")
        return EXIT_OK
    print(f"VIOLATED mode={args.mode} witness={v.witness} violation={v.violation:.6g}")
    if v.message:
        print(v.message)
    return EXIT_VIOLATED


def cmd_length(args):
    curve, _ = load_input(args.input)
    _report([("length", curves.length(curve)), ("points", len(curve)),
             ("diameter", geomcore.diameter(curve.points))])
    return EXIT_OK


def cmd_meanwidth(args):
    curve, _ = load_input(args.input)
    est = geomcore.mean_width(geomcore.PointCloud(curve.points), _sampler(args))
    _report([("mean_width", est.value), ("standard_error", est.standard_error),
             ("samples", est.samples), ("seed", args.seed)])
    return EXIT_OK


def cmd_bound(args):
    curve, _ = load_input(args.input)
    try:
        r = spherelemmas.verify_length_bound(curve, _sampler(args), _tolerance(args))
    except PreconditionError as exc:
        print(f"VIOLATED precondition: {exc}")
        return EXIT_VIOLATED
    _report([
        ("length", r.length),
        ("mean_width", r.mean_width),
        ("standard_error", r.standard_error),
        ("diameter", r.diameter),
        ("C_n", r.C_n),
        ("ratio length/W", r.ratio),
        ("bound C_n*W", r.C_n * r.mean_width),
        ("bound C_n*diam", r.C_n * r.diameter),
        ("holds", r.holds),
        ("holds (diameter form)", r.holds_diameter),
    ])
    return EXIT_OK if r.holds else EXIT_VIOLATED


def cmd_prox(args):
    x0 = _point(args.x0)
    f = parse_function(args.function, dim=x0.size)
    sched = parse_schedule(args.schedule)
    trace = prox.run_prox(f, x0, sched, max_iter=args.iters, stop_step=args.stop_step)
    checks = prox.verify_trace(trace, f, seed=args.seed)
    conv = checks.get("convergence")
    limit = trace.iterates[-1]
    g = float(np.linalg.norm(f.min_norm_subgradient(limit)))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.trace_to_json(trace))
    pairs = [
        ("iterations", len(trace) - 1),
        ("terminated_by", trace.terminated_by),
        ("limit estimate", np.array2string(limit, precision=10, separator=", ")),
        ("f(limit)", float(trace.values[-1])),
    ]
    if conv is not None:
        pairs += [("step sum", conv.total_step_sum), ("step-sum ratio", conv.ratio),
                  ("bound 2*C_n", 2 * spherelemmas.length_constant(trace.dim))]
    _report(pairs)
    for name, v in checks.items():
        if isinstance(v, curves.PredicateVerdict):
            print(_verdict_line(name, v))
        else:
            state = "HOLDS" if prox._holds(v) else "VIOLATED"
            print(f"{name}: {state} (step sum {v.total_step_sum:.6g} <= {v.bound:.6g}, "
                  f"within ball {v.within_ball}; {v.note})")
    if g > args.tol:
        print(f"limit noncritical: |subgrad|min = {g:.6g}")
    else:
        print(f"limit critical: |subgrad|min = {g:.3g}")
    return EXIT_OK if all(prox._holds(v) for v in checks.values()) else EXIT_VIOLATED


def cmd_foliate(args):
    x0 = _point(args.x0)
    f = parse_function(args.function, dim=x0.size)
    levels = _floats(args.levels, "levels")
    orbit = foliation.sublevel_projection_orbit(f, x0, levels)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.trace_to_json(points=orbit.curve.points, levels=orbit.levels))
    sc = curves.is_self_contracted(orbit.curve, _tolerance(args))
    dec = foliation.decreasing_level_check(orbit, f, tol=max(args.tol, 1e-9))
    for k, (p, r) in enumerate(zip(orbit.curve.points, orbit.levels)):
        print(f"p{k} = {np.array2string(p, precision=10, separator=', ')}  level {r:.10g}")
    print(_verdict_line("self_contracted", sc))
    print(_verdict_line("decreasing_levels", dec))
    return EXIT_OK if sc.holds and dec.holds else EXIT_VIOLATED


def cmd_approx(args):
    curve, _ = load_input(args.input)
    tol = _tolerance(args)
    try:
        res = foliation.polygonal_approximation(curve, args.delta, tol)
    except PreconditionError as exc:
        print(f"VIOLATED precondition: {exc}")
        return EXIT_VIOLATED
    sc = curves.is_self_contracted(res.polyline, tol)
    header = (f"polygonal approximation delta={res.accuracy!r}\n"
              f"hausdorff={res.hausdorff_achieved!r}\n"
              f"source indices={' '.join(str(int(i)) for i in res.vertex_source_indices)}")
    if args.out:
        io.write_curve_csv(res.polyline, args.out, header)
    _report([("vertices", len(res.polyline)), ("delta", res.accuracy),
             ("hausdorff", res.hausdorff_achieved)])
    print(_verdict_line("self_contracted", sc))
    ok = foliation.approximation_holds(res, tol)
    print("HOLDS" if ok else "VIOLATED")
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_gen(args):
    if args.kind == "prox-polyline":
        _, trace = instances.prox_polyline(args.dim or 2, args.iters, args.seed)
        curve = curves.DiscreteCurve(trace.iterates)
        header = f"prox-polyline dim={args.dim or 2} iters={args.iters} seed={args.seed}"
    elif args.kind == "random-walk":
        curve = instances.random_walk(args.dim or 2, args.steps, args.seed)
        header = f"random-walk dim={args.dim or 2} steps={args.steps} seed={args.seed}"
    else:
        x0 = _point(args.x0)
        f = parse_function(args.function, dim=x0.size)
        curve = foliation.gradient_flow_curve(f, x0, args.h, args.T)
        if args.spacing:
            curve = curves.arc_length_reparam(curve, args.spacing)
        header = f"flow-curve {args.function} x0={args.x0} h={args.h} T={args.T}"
    _emit(args, io.format_curve_csv(curve, header))
    return EXIT_OK


def cmd_plot(args):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not args.out:
        raise InputError("plot needs --out FILE.svg")
    curve, doc = load_input(args.input)
    plt.rcParams["svg.hashsalt"] = "selfcontract"
    fig, ax = plt.subplots(figsize=(6, 5))

    def xy(c):
        P = c.points
        if c.dim == 1:
            return np.arange(len(P)), P[:, 0]
        return P[:, 0], P[:, 1]

    x, y = xy(curve)
    ax.plot(x, y, "-o", ms=3, lw=1, color="tab:blue", label="curve")
    if args.overlay:
        over, _ = load_input(args.overlay)
        if over.dim != curve.dim:
            raise InputError("overlay dimension differs from the input")
        ox, oy = xy(over)
        ax.plot(ox, oy, "-s", ms=4, lw=1.5, color="tab:red", label="overlay")
        ax.legend(loc="best")
    ax.set_xlabel("index" if curve.dim == 1 else "x1")
    ax.set_ylabel("x1" if curve.dim == 1 else "x2")
    if curve.dim >= 2:
        ax.set_aspect("equal", adjustable="datalim")
    if args.annotate_width:
        est = geomcore.mean_width(geomcore.PointCloud(curve.points), _sampler(args))
        ax.set_title(f"hull mean width {est.value:.4g} ± {est.standard_error:.2g}")
    values = None if doc is None else doc.get("values")
    if values:
        inset = ax.inset_axes([0.62, 0.62, 0.35, 0.33])
        inset.plot(np.arange(len(values)), values, "-", lw=1, color="tab:green")
        inset.set_title("f(x_i)", fontsize=7)
        inset.tick_params(labelsize=6)
    fig.savefig(args.out, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(f"wrote {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser

def _samples(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v >= 2 or v != int(v):
        raise argparse.ArgumentTypeError("samples must be an integer >= 2")
    return int(v)


def _nonneg(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42,
                        help=f"RNG seed (default 42; ${SEED_ENV} overrides)")
    common.add_argument("--samples", type=_samples, default=100_000,
                        help="sphere directions for Monte-Carlo widths (default 1e5)")
    common.add_argument("--tol", type=_nonneg, default=1e-9, help="absolute tolerance")
    common.add_argument("--margin", type=_nonneg, default=1e-6,
                        help="relative margin for strict cone tests")
    common.add_argument("--dim", type=int, default=None, help="ambient dimension for generators")
    common.add_argument("--out", default=None, help="output file")

    p = argparse.ArgumentParser(prog="selfcontract",
                                description="Self-contracted curve toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="test a curve predicate")
    s.add_argument("input")
    s.add_argument("--mode", choices=sorted(_CHECKS), default="sc")
    s.set_defaults(run=cmd_check)

    for name, fn, text in (("length", cmd_length, "polygonal length"),
                           ("meanwidth", cmd_meanwidth, "Monte-Carlo mean width of the hull"),
                           ("bound", cmd_bound, "length versus C_n times mean width")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("input")
        s.set_defaults(run=fn)

    s = sub.add_parser("prox", parents=[common], help="run the proximal algorithm")
    s.add_argument("--function", required=True)
    s.add_argument("--x0", required=True)
    s.add_argument("--schedule", default="constant:1")
    s.add_argument("--iters", type=int, default=100)
    s.add_argument("--stop-step", type=_nonneg, default=0.0)
    s.set_defaults(run=cmd_prox)

    s = sub.add_parser("foliate", parents=[common], help="successive sublevel projections")
    s.add_argument("--function", required=True)
    s.add_argument("--x0", required=True)
    s.add_argument("--levels", required=True, help="comma-separated decreasing levels")
    s.set_defaults(run=cmd_foliate)

    s = sub.add_parser("approx", parents=[common], help="self-contracted polygonal approximation")
    s.add_argument("input")
    s.add_argument("--delta", type=float, required=True)
    s.set_defaults(run=cmd_approx)

    s = sub.add_parser("gen", parents=[common], help="generate a test curve")
    s.add_argument("kind", choices=["prox-polyline", "flow-curve", "random-walk"])
    s.add_argument("--iters", type=int, default=30)
    s.add_argument("--steps", type=int, default=50)
    s.add_argument("--function", default="quadratic:A=1,0|0,4")
    s.add_argument("--x0", default="1,1")
    s.add_argument("--h", type=float, default=1e-3)
    s.add_argument("--T", type=float, default=10.0)
    s.add_argument("--spacing", type=float, default=None,
                   help="resample the flow curve at this arc-length spacing")
    s.set_defaults(run=cmd_gen)

    s = sub.add_parser("plot", parents=[common], help="static SVG of a curve or trace")
    s.add_argument("input")
    s.add_argument("--overlay", default=None, help="second curve drawn on top")
    s.add_argument("--annotate-width", action="store_true")
    s.set_defaults(run=cmd_plot)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    env = os.environ.get(SEED_ENV)
    try:
        if env is not None:
            try:
                args.seed = int(env)
            except ValueError:
                raise InputError(f"{SEED_ENV} must be an integer, got {env!r}") from None
        return args.run(args)
    except (InputError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"error: solver failed ({exc}; residual {exc.residual:.3g})", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
