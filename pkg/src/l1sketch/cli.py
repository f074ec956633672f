"""Command-line front end.

Subcommands: ``dist`` (all-pairs distances), ``sample`` (raw draws),
``eval`` (density values for plotting), ``calibrate`` (discretization
constant), ``bench`` (timing table).  The default seed comes from the
``L1SKETCH_SEED`` environment variable when set.

Exit codes: 0 success, 2 parse/validation error, 3 parameter error,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .ci1 import ci1_density, rescale_ci1, sample_ci1_unit
from .cid import DEFAULT_C, ApproxConfig, calibrate_c, rescale_cid, sample_cid_approx_unit
from .densities import eval_density, random_piecewise_linear_family, validate_family
from .errors import EnvelopeDominationError, FamilyFormatError, ParameterError
from .io import build_manifest, load_family, matrix_to_csv, matrix_to_json, sha256_digest
from .pipeline import SketchMode, estimate_all_pairs, run_scheme, sketch_family
from .randstream import RandomStream, required_sample_count

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_PARAMETER = 3
EXIT_INTERNAL = 4


def _default_seed() -> int:
    env = os.environ.get("L1SKETCH_SEED")
    return int(env) if env else 0


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _manifest_line(command: str, parameters: dict, seed: int, digest: str | None = None) -> str:
    import json as _json

    manifest = build_manifest(command, parameters, seed, digest)
    return "# manifest: " + _json.dumps(manifest, sort_keys=True)


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo_s, hi_s, step_s = spec.split(":")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
    except ValueError as exc:
        raise ParameterError(f"bad grid spec {spec!r}, expected lo:hi:step") from exc
    if step <= 0 or hi <= lo:
        raise ParameterError(f"bad grid spec {spec!r}: need lo < hi and step > 0")
    count = int(round((hi - lo) / step)) + 1
    return np.linspace(lo, hi, count)


def cmd_dist(args) -> int:
    with open(args.input, "rb") as handle:
        raw = handle.read()
    family = load_family(args.input)
    validate_family(family)
    start = time.perf_counter()
    dm = run_scheme(
        family,
        epsilon=args.epsilon,
        delta=args.delta,
        method=args.method,
        seed=args.seed,
        threads=args.threads,
        estimator=args.estimator,
        sketch_mode=args.sketch_mode,
        c_constant=args.c_constant,
    )
    elapsed = time.perf_counter() - start
    manifest = build_manifest(
        "dist",
        {
            "method": args.method,
            "epsilon": args.epsilon,
            "delta": args.delta,
            "estimator": args.estimator,
            "sketch_mode": args.sketch_mode,
            "format": args.format,
        },
        seed=args.seed,
        input_digest=sha256_digest(raw),
    )
    text = matrix_to_csv(dm, manifest) if args.format == "csv" else matrix_to_json(dm, manifest)
    _write(text, args.out)
    print(f"dist: method={args.method} m={family.m} wall_time_s={elapsed:.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_sample(args) -> int:
    rng = RandomStream(args.seed)
    lines = [
        _manifest_line(
            "sample",
            {"kind": args.kind, "count": args.count, "a": args.a, "b": args.b,
             "d": args.d if args.kind == "cid" else None,
             "r": args.r if args.kind == "cid" else None},
            args.seed,
        )
    ]
    if args.kind == "ci1":
        lines.append("x0,x1")
        if args.count > 0:
            z = sample_ci1_unit(rng, size=args.count)
            if args.a != 0.0 or args.b != 1.0:
                z = rescale_ci1(z, args.a, args.b)
            for i in range(args.count):
                lines.append(f"{float(z.x0[i])!r},{float(z.x1[i])!r}")
    else:
        cfg = ApproxConfig(
            d=args.d,
            epsilon_integration=args.eps_int,
            c_constant=args.c_constant if args.c_constant is not None else DEFAULT_C,
            r=args.r,
        )
        lines.append(",".join(f"x{k}" for k in range(args.d + 1)))
        if args.count > 0:
            z = sample_cid_approx_unit(cfg, rng, size=args.count)
            if args.a != 0.0 or args.b != 1.0:
                z = rescale_cid(z, args.a, args.b)
            for row in z.components:
                lines.append(",".join(repr(float(v)) for v in row))
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    if args.target == "ci1-density":
        axis = _parse_grid(args.grid)
        lines = [
            _manifest_line("eval", {"target": args.target, "grid": args.grid}, 0),
            "x0,x1,value",
        ]
        for x0 in axis:
            vals = ci1_density(np.full_like(axis, x0), axis)
            for x1, v in zip(axis, vals):
                lines.append(f"{float(x0)!r},{float(x1)!r},{float(v)!r}")
        _write("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    family = load_family(args.input)
    names = {d.name: d for d in family.densities}
    if args.name not in names:
        raise ParameterError(f"density {args.name!r} not in family {sorted(names)}")
    dens = names[args.name]
    if args.points is not None:
        xs = np.array([float(v) for v in args.points.split(",")])
    else:
        xs = _parse_grid(args.grid)
    vals = eval_density(dens, family.breakpoints, xs)
    with open(args.input, "rb") as handle:
        digest = sha256_digest(handle.read())
    header = _manifest_line(
        "eval",
        {"target": args.target, "name": args.name, "grid": args.grid, "points": args.points},
        0,
        digest,
    )
    lines = [header, "x,value"] + [f"{float(x)!r},{float(v)!r}" for x, v in zip(xs, vals)]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    result = calibrate_c(args.d_max, args.eps, args.trials, RandomStream(args.seed))
    manifest = build_manifest(
        "calibrate",
        {"d_max": args.d_max, "eps": args.eps, "trials": args.trials},
        seed=args.seed,
        input_digest=None,
    )
    doc = {
        "c": result.c,
        "per_degree": {str(d): r for d, r in result.per_degree_r.items()},
        "target_eps": result.target_eps,
        "trials": result.trials,
        "safety_factor": result.safety_factor,
        "manifest": manifest,
    }
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _bench_family(m: int, n: int, d: int, rng: RandomStream):
    """Random degree-d family for timing runs.

    For d != 1 the coefficients are plain uniform draws; the resulting
    functions are signed, which the distance machinery accepts, and cost is
    all that matters here.
    """
    if d == 1:
        return random_piecewise_linear_family(m, n, rng)
    from l1sketch import Breakpoints, DensityFamily, PiecewisePolyDensity, PolySegment

    edges = np.concatenate([[0.0], np.sort(rng.random(n - 1)), [1.0]]) if n > 1 else np.array([0.0, 1.0])
    densities = []
    for j in range(m):
        segs = [
            PolySegment(i, i + 1, 2.0 * rng.random(d + 1) - 1.0) for i in range(n)
        ]
        densities.append(PiecewisePolyDensity(f"f{j}", segs, d))
    return DensityFamily(Breakpoints(edges), densities, d)


def _bench_sketch_mode(d: int):
    if d == 0:
        return SketchMode.UNIFORM_FASTPATH, None
    if d == 1:
        return SketchMode.EXACT_CI1, None
    return SketchMode.CID_APPROX, ApproxConfig(d=d, epsilon_integration=0.05)


def cmd_bench(args) -> int:
    lines = [
        _manifest_line(
            "bench",
            {"m": args.m, "n": args.n, "d": args.d, "t": args.t, "methods": args.methods},
            args.seed,
        ),
        "method,m,n,d,t,seconds",
    ]
    for m in args.m:
        for n in args.n:
            for d in args.d:
                rng = RandomStream(args.seed, stream_id=(m * 1000 + n) * 32 + d)
                family = _bench_family(m, n, d, rng)
                mode, cfg = _bench_sketch_mode(d)
                for method in args.methods.split(","):
                    for t in args.t:
                        # widest epsilon the replicate count supports, slightly
                        # inflated so the estimator precondition holds exactly
                        eps = min(0.5, 1.001 * 8.0 * np.sqrt(np.log(m * m / 0.1) / t))
                        start = time.perf_counter()
                        if method == "exact":
                            run_scheme(family, 0.2, 0.1, "exact", args.seed)
                        else:
                            sk = sketch_family(
                                family, t, mode, RandomStream(args.seed), approx_config=cfg
                            )
                            if required_sample_count(eps, 0.1, m) <= t:
                                estimate_all_pairs(sk, eps, 0.1)
                        elapsed = time.perf_counter() - start
                        lines.append(f"{method},{m},{n},{d},{t},{elapsed:.6f}")
                        if method == "exact":
                            break  # exact cost does not depend on t
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="l1sketch", description=__doc__)
    parser.add_argument("--version", action="version", version=f"l1sketch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="all-pairs L1 distance matrix")
    p.add_argument("input", help="family JSON file")
    p.add_argument("--method", choices=["exact", "sketch", "mc"], default="sketch")
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--estimator", choices=["geometric_mean", "median"], default="geometric_mean")
    p.add_argument(
        "--sketch-mode",
        choices=["exact_ci1", "cid_approx", "uniform_fastpath", "uniformize"],
        default=None,
        help="override the automatic degree-based sketch mode",
    )
    p.add_argument("--c-constant", type=float, default=None)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("sample", help="raw integral-vector draws as CSV")
    p.add_argument("kind", choices=["ci1", "cid"])
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--d", type=int, default=2, help="degree (cid only)")
    p.add_argument("--r", type=int, default=None, help="discretization steps (cid only)")
    p.add_argument("--eps-int", type=float, default=0.05, help="derives r when --r is absent")
    p.add_argument("--c-constant", type=float, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", help="density values as CSV (plot-ready)")
    p.add_argument("target", choices=["ci1-density", "density"])
    p.add_argument("--grid", default="-3:3:0.05", help="lo:hi:step")
    p.add_argument("--input", default=None, help="family JSON (density target)")
    p.add_argument("--name", default=None, help="density name (density target)")
    p.add_argument("--points", default=None, help="comma-separated x values")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("calibrate", help="calibrate the discretization constant")
    p.add_argument("--d-max", type=int, default=5)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=400)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("bench", help="wall-time table for exact and sketch methods")
    p.add_argument("--m", type=int, nargs="+", default=[4])
    p.add_argument("--n", type=int, nargs="+", default=[4])
    p.add_argument("--d", type=int, nargs="+", default=[1])
    p.add_argument("--t", type=int, nargs="+", default=[2000, 4000])
    p.add_argument("--methods", default="exact,sketch")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def _normalize_argv(argv):
    """Fuse value-carrying flags with leading-dash values (e.g. --grid -3:3:0.05)."""
    if argv is None:
        argv = sys.argv[1:]
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--grid", "--points", "--a", "--b") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_normalize_argv(argv))
    try:
        return args.func(args)
    except FamilyFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except EnvelopeDominationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
