"""Command-line front end.

Subcommands: presets, describe, density, mahler, affinity, diagnose,
oracle-check, bourgain.  Outputs are CSV/JSON written atomically; exit
status is 0 on success, 1 on usage errors, 2 on computation errors (with a
machine-parsable JSON detail on stderr).
"""

import argparse
import hashlib
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .affinity import affinity_hellinger
from .circlepoly import (
    GridDensity,
    UnitCircleGrid,
    evaluate_on_grid,
    fourier_coefficients,
    partial_product_density,
    sparse_polynomial,
)
from .construction import (
    PRESET_NAMES,
    load_config,
    preset,
    total_measure,
    heights,
    validate,
)
from .diagnostics import (
    ReportConfig,
    atomic_write_text,
    bourgain_gap,
    build_report,
    write_report_json,
)
from .errors import RieszError
from .mahler import kolmogorov_error, mahler_grid_poly, mahler_jensen, szego_error_sequence
from .tower import autocorrelation_profile, occurrence_set


def _add_construction_args(p):
    p.add_argument("--preset", choices=PRESET_NAMES, help="construction family")
    p.add_argument("--config", help="construction config JSON path")
    p.add_argument("--params", default="{}", help="preset params as JSON")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed")
    p.add_argument("--stage-cap", type=int, default=24)


def _construction_from(args):
    if args.config:
        return load_config(args.config)
    if args.preset:
        return preset(args.preset, json.loads(args.params), args.seed, args.stage_cap)
    raise RieszError("one of --preset or --config is required")


def _parse_range(text: str):
    """'a..b' -> range(a, b) (end-exclusive); a bare integer K -> range(0, K)."""
    if ".." in text:
        a, b = text.split("..", 1)
        return range(int(a), int(b))
    return range(0, int(text))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="riesz-one",
        description="rank-one constructions, Riesz-product densities and Mahler diagnostics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=int, default=0, help="worker thread cap (0 = default)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("presets", help="list known construction presets")

    p = sub.add_parser("describe", help="validate a construction; print heights and total measure")
    _add_construction_args(p)
    p.add_argument("--stages", type=int, default=8)
    p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("density", help="partial Riesz product sampled on a circle grid, as CSV")
    _add_construction_args(p)
    p.add_argument("--stages", default="4", help="stage range 'a..b' or a count K")
    p.add_argument("--grid", type=int, default=1 << 12)
    p.add_argument("--offset", choices=("aligned", "half-step"), default="aligned")
    p.add_argument("--out", required=True)

    p = sub.add_parser("mahler", help="Mahler measure of a sparse polynomial, per engine")
    p.add_argument("--poly", required=True, help="comma-separated exponents, e.g. 0,1,3")
    p.add_argument("--engines", default="grid,jensen,szego", help="subset of grid,jensen,szego,kolmogorov")
    p.add_argument("--grid", type=int, default=1 << 16)
    p.add_argument("--szego-n", type=int, default=512)
    p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("affinity", help="affinity/Hellinger of a construction density vs uniform or a second construction")
    _add_construction_args(p)
    p.add_argument("--preset2", choices=PRESET_NAMES, help="optional second construction")
    p.add_argument("--params2", default="{}")
    p.add_argument("--seed2", type=int, default=0)
    p.add_argument("--stages", default="4")
    p.add_argument("--grid", type=int, default=1 << 14)
    p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("diagnose", help="full spectral report as JSON")
    _add_construction_args(p)
    p.add_argument("--stages", type=int, default=6)
    p.add_argument("--grid", type=int, default=1 << 14)
    p.add_argument("--engine", choices=("grid", "jensen"), default="grid")
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle-check", help="tower autocorrelation vs DFT coefficient identity")
    _add_construction_args(p)
    p.add_argument("--stages", type=int, default=4, help="ambient stage M (base stage 0)")
    p.add_argument("--lags", default=None, help="lag range 'a..b' (default 0..h_M)")
    p.add_argument("--grid", type=int, default=0, help="grid size (default: smallest exact power of two)")

    p = sub.add_parser("bourgain", help="L^1 gap study over random sparse exponent sets")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-n", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write CSV here instead of stdout")

    return parser


def _emit(args, payload: dict):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _cmd_presets(args):
    for name in PRESET_NAMES:
        print(name)
    return 0


def _cmd_describe(args):
    c = validate(_construction_from(args))
    K = min(args.stages, c.num_stages)
    table = heights(c, K)
    tm = total_measure(c, K)
    _emit(
        args,
        {
            "name": c.name,
            "stages_available": c.num_stages,
            "heights": [str(h) for h in table.heights],
            "overflow": table.overflow_flag,
            "total_measure": {
                "partials": [float(p) for p in tm.partials],
                "exact": str(tm.partial),
                "verdict": tm.verdict,
            },
        },
    )
    return 0


def _density_cache_path(c, stages, grid):
    """Memoized-density location under $RIESZ_ONE_CACHE, or None if unset."""
    root = os.environ.get("RIESZ_ONE_CACHE")
    if not root:
        return None
    key = json.dumps(
        [c.to_config(), [stages.start, stages.stop], grid.N, grid.offset],
        sort_keys=True,
    )
    digest = hashlib.sha256(key.encode()).hexdigest()[:32]
    folder = Path(root)
    folder.mkdir(parents=True, exist_ok=True)
    return folder / f"density-{digest}.npy"


def _cmd_density(args):
    c = _construction_from(args)
    stages = _parse_range(args.stages)
    grid = UnitCircleGrid(args.grid, args.offset)
    cache_path = _density_cache_path(c, stages, grid)
    if cache_path is not None and cache_path.exists():
        values = np.load(cache_path)
        density = GridDensity(grid, values, tuple(stages), True, 0)
    else:
        density = partial_product_density(c, stages, grid)
        if cache_path is not None:
            np.save(cache_path, density.values)
    buf = io.StringIO()
    import csv as _csv

    w = _csv.writer(buf)
    w.writerow(["theta", "value"])
    for t, v in zip(density.grid.thetas(), density.values):
        w.writerow([repr(float(t)), repr(float(v))])
    atomic_write_text(args.out, buf.getvalue())
    return 0


def _cmd_mahler(args):
    exps = [int(x) for x in args.poly.split(",")]
    p = sparse_polynomial(exps)
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    rows = {}
    for engine in engines:
        if engine == "grid":
            est = mahler_grid_poly(p, args.grid)
            rows[engine] = {"value": est.value, "refinement_gap": est.refinement_gap}
        elif engine == "jensen":
            rows[engine] = {"value": mahler_jensen(p).value}
        elif engine == "szego":
            grid = UnitCircleGrid(max(4 * args.szego_n, 4096), "half-step")
            h = np.abs(evaluate_on_grid(p, grid)) ** 2
            density = GridDensity(grid, h, (), True, p.degree)
            res = szego_error_sequence(density, args.szego_n)
            # E_n estimates M(P^2) = M(P)^2.
            rows[engine] = {"value": float(np.sqrt(res.errors[-1])), "truncated": res.truncated}
        elif engine == "kolmogorov":
            grid = UnitCircleGrid(max(4 * args.szego_n, 4096), "half-step")
            h = np.abs(evaluate_on_grid(p, grid)) ** 2
            density = GridDensity(grid, h, (), True, p.degree)
            value, diverged = kolmogorov_error(density)
            rows[engine] = {"value": float(np.sqrt(value)), "diverged": diverged}
        else:
            raise RieszError(f"unknown engine {engine!r}")
    _emit(args, {"poly": exps, "engines": rows})
    return 0


def _cmd_affinity(args):
    c = _construction_from(args)
    stages = _parse_range(args.stages)
    grid = UnitCircleGrid(args.grid, "aligned")
    f = partial_product_density(c, stages, grid)
    if args.preset2:
        c2 = preset(args.preset2, json.loads(args.params2), args.seed2, args.stage_cap)
        g = partial_product_density(c2, stages, grid)
        other = args.preset2
    else:
        g = GridDensity(grid, np.ones(grid.N), (), True, 0)
        other = "uniform"
    res = affinity_hellinger(f, g)
    _emit(args, {"against": other, "G": res.G, "H": res.H, "exact": f.exact and g.exact})
    return 0


def _cmd_diagnose(args):
    c = _construction_from(args)
    config = ReportConfig(
        grid_N=args.grid,
        stages=args.stages,
        engine=args.engine,
        seed=args.seed,
    )
    report = build_report(c, config)
    write_report_json(report, args.out)
    return 0


def _cmd_oracle_check(args):
    c = _construction_from(args)
    M = args.stages
    S = occurrence_set(c, 0, M)
    h_M = S.ambient_height
    lags = _parse_range(args.lags) if args.lags else range(0, h_M)
    N = args.grid
    if not N:
        N = 2
        while N <= 2 * h_M:
            N *= 2
    grid = UnitCircleGrid(N, "aligned")
    density = partial_product_density(c, range(0, M), grid)
    coeffs = fourier_coefficients(density, lags)
    auto = autocorrelation_profile(S, max(lags) + 1)[list(lags)]
    dev = float(np.max(np.abs(coeffs - auto))) if len(coeffs) else 0.0
    print(f"max abs deviation over {len(coeffs)} lags: {dev:.3e}")
    return 0 if dev <= 1e-9 else 2


def _cmd_bourgain(args):
    rng = np.random.Generator(np.random.Philox(key=np.uint64(args.seed)))
    lines = ["n,l1,gap"]
    min_gap = float("inf")
    for _ in range(args.count):
        n = int(rng.integers(2, args.max_n + 1))
        exps = np.sort(rng.choice(8 * args.max_n, size=n, replace=False))
        row = bourgain_gap(exps)
        min_gap = min(min_gap, row["gap"])
        lines.append(f"{row['n']},{row['l1']!r},{row['gap']!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    print(f"minimum gap over {args.count} sets: {min_gap:.6f}", file=sys.stderr)
    return 0


_COMMANDS = {
    "presets": _cmd_presets,
    "describe": _cmd_describe,
    "density": _cmd_density,
    "mahler": _cmd_mahler,
    "affinity": _cmd_affinity,
    "diagnose": _cmd_diagnose,
    "oracle-check": _cmd_oracle_check,
    "bourgain": _cmd_bourgain,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if args.threads and _kernels.USING_NUMBA:
        import numba

        numba.set_num_threads(args.threads)
    try:
        return _COMMANDS[args.command](args)
    except RieszError as exc:
        detail = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(detail), file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        detail = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(detail), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
