"""Singularity diagnostics assembled into a persisted spectral report:
dichotomy partial products, the Klemes-Reinhold cut-count test, Bourgain
L^1 gaps, zero-count checks, atom/AC mass bounds and the power-growth
trend product.

Every verdict is a three-valued trend classification with its thresholds
recorded in the report: the limits of interest are weak-* statements a
finite computation cannot certify.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .affinity import q_sequence
from .circlepoly import (
    DEFAULT_COMBINATORIAL_CAP,
    SparseCirclePolynomial,
    UnitCircleGrid,
    evaluate_on_grid,
    sparse_polynomial,
    stage_polynomial,
)
from .construction import RankOneConstruction, heights, total_measure
from .errors import DegreeTooLarge, TooFewTerms
from .mahler import DEFAULT_DEGREE_CAP, mahler_grid_poly, mahler_jensen, polynomial_roots
from .tower import wiener_atom_mass

CIRCLE_TOL = 1e-8


def _next_pow2(n: int) -> int:
    size = 2
    while size < n:
        size *= 2
    return size


def stage_mahler(
    construction: RankOneConstruction,
    j: int,
    engine: str = "grid",
    grid_N: int = 1 << 12,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    grid_cap: int = 1 << 22,
) -> float:
    """Mahler measure of one stage polynomial by the chosen engine.

    The grid engine sizes its half-step grid to at least twice the degree
    (capped); the jensen engine densifies and falls back to the grid when
    the degree exceeds the root-finding cap.
    """
    p = stage_polynomial(construction, j)
    if engine == "jensen":
        if p.degree <= degree_cap:
            return mahler_jensen(p, degree_cap).value
        engine = "grid"
    N = min(_next_pow2(max(grid_N, 2 * p.degree + 2)), grid_cap)
    return mahler_grid_poly(p, N).value


def stage_l1(construction, j, grid_N=1 << 12, grid_cap=1 << 22) -> float:
    """int |P_j| d lambda on an adequately sized half-step grid."""
    p = stage_polynomial(construction, j)
    N = min(_next_pow2(max(grid_N, 2 * p.degree + 2)), grid_cap)
    grid = UnitCircleGrid(N, "half-step")
    return float(np.mean(np.abs(evaluate_on_grid(p, grid))))


@dataclass(frozen=True)
class DichotomyPartials:
    partials: np.ndarray  # prod_{j<K'} M(P_j) for K' = 1..K
    factors: np.ndarray
    engine: str
    verdict: str


def dichotomy_partial(
    construction: RankOneConstruction,
    K: int,
    engine: str = "grid",
    grid_N: int = 1 << 12,
    floor: float = 1e-3,
    flat_tol: float = 1e-4,
) -> DichotomyPartials:
    """Partial products prod_{j<K'} M(P_j), the finite proxies of the
    dichotomy quantity; strictly decreasing since every factor is < 1.

    Verdict: "singularity-consistent" once the partials sink below the
    floor, "AC-part-consistent" when the per-stage factors approach 1
    (last gap below flat_tol), else "undetermined".
    """
    factors = np.array([stage_mahler(construction, j, engine, grid_N) for j in range(K)])
    partials = np.cumprod(factors)
    if partials[-1] < floor:
        verdict = "singularity-consistent"
    elif 1.0 - factors[-1] < flat_tol:
        verdict = "AC-part-consistent"
    else:
        verdict = "undetermined"
    return DichotomyPartials(partials, factors, engine, verdict)


def klemes_reinhold(
    construction: RankOneConstruction,
    K: int,
    conv_tol: float = 1e-7,
    div_floor: float = 1e-3,
) -> dict:
    """Partial sums of sum 1/m_k^2 (divergence is a cited sufficient
    condition for singularity in the bounded-spacer regime)."""
    ms = np.array([construction.stage(k).m for k in range(K)], dtype=float)
    increments = 1.0 / ms**2
    partial = float(np.sum(increments))
    last = float(increments[-1]) if K else 0.0
    if last < conv_tol:
        verdict = "convergent"
    elif last > div_floor:
        verdict = "divergent"
    else:
        verdict = "undetermined"
    return {"partial_sum": partial, "last_increment": last, "verdict": verdict}


def bourgain_gap(exponents, grid_cap: int = 1 << 22) -> dict:
    """L^1 norm of (1/sqrt(n)) sum z^(l_i) and the gap (1 - l1) n / log n,
    the per-instance lower estimate of the absolute constant in the
    1 - c log(n)/n bound."""
    exps = sorted(int(e) for e in exponents)
    n = len(exps)
    if n < 2:
        raise TooFewTerms(f"need at least 2 exponents, got {n}")
    p = sparse_polynomial(exps)
    N = min(_next_pow2(max(1024, 2 * p.degree + 2)), grid_cap)
    grid = UnitCircleGrid(N, "half-step")
    l1 = float(np.mean(np.abs(evaluate_on_grid(p, grid))))
    return {"n": n, "l1": l1, "gap": (1.0 - l1) * n / math.log(n)}


def zero_count_check(
    construction: RankOneConstruction,
    k: int,
    c: float,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> dict:
    """Count roots of sqrt(m_k) P_k outside the closed unit disk and compare
    against the threshold c * h_{k-1}."""
    if k < 1:
        raise ValueError("zero-count check needs k >= 1")
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0,1), got {c}")
    p = stage_polynomial(construction, k)
    roots = polynomial_roots(p, degree_cap)
    count = int(np.count_nonzero(np.abs(roots) > 1.0 + CIRCLE_TOL))
    h_prev = heights(construction, k).heights[k - 1]
    threshold = c * h_prev
    return {"count": count, "threshold": threshold, "holds": count < threshold}


def nad3_bounds(
    construction: RankOneConstruction,
    K: int,
    M: int,
    L: int,
    grid: UnitCircleGrid,
    tolerance: float = 0.02,
    cap: int = DEFAULT_COMBINATORIAL_CAP,
) -> dict:
    """Lower bound (int Q_K)^2 on the AC mass against the atom-complement
    upper bound 1 - (Wiener mass at z=1); both strictly below 1 for any
    nontrivial construction.

    The atom bound needs a finite-measure construction; for a diverging
    total measure it is skipped (lower bound still reported).
    """
    prof = q_sequence(construction, [K], grid)
    ac_lower = float(prof.q_integrals[0]) ** 2
    tm = total_measure(construction, min(M, construction.num_stages))
    if tm.verdict == "diverging":
        return {
            "ac_mass_lower": ac_lower,
            "atom_upper": None,
            "consistent": None,
            "note": "infinite-measure trend: atom bound skipped",
        }
    atom = wiener_atom_mass(construction, M, L, cap=cap)
    atom_upper = 1.0 - atom
    return {
        "ac_mass_lower": ac_lower,
        "atom_mass": atom,
        "atom_upper": atom_upper,
        "consistent": ac_lower <= atom_upper + tolerance,
    }


def main2_trend(construction: RankOneConstruction, K: int, c_hat: float) -> dict:
    """Trend products prod_{j<K} (1 - c_hat log(m_j)/m_j) and the divergence
    sum sum_{j<K} log(m_j)/m_j.

    The squared product tracks the dichotomy quantity for the squared
    polynomials (M(P^2) = M(P)^2); an unbounded sum drives both toward 0,
    the power-growth regime m_j ~ j^beta (beta <= 1) giving log^2 growth.
    """
    if not 0.0 < c_hat < 1.0:
        raise ValueError(f"c_hat must lie in (0,1), got {c_hat}")
    ms = np.array([construction.stage(j).m for j in range(K)], dtype=float)
    terms = np.log(ms) / ms
    log_factors = np.log1p(-c_hat * terms)
    products = np.exp(np.cumsum(log_factors))
    return {
        "products": products,
        "products_squared": products**2,
        "divergence_sums": np.cumsum(terms),
        "c_hat": c_hat,
    }


@dataclass(frozen=True)
class ReportConfig:
    grid_N: int = 1 << 14
    stages: int = 6
    engine: str = "grid"
    atom_stage: int = 6
    atom_lags: Optional[int] = None  # default h_{atom_stage - 1}
    c_hat: float = 0.1
    combinatorial_cap: int = DEFAULT_COMBINATORIAL_CAP
    degree_cap: int = DEFAULT_DEGREE_CAP
    seed: int = 0
    bourgain_sets: int = 20
    bourgain_max_n: int = 64


def build_report(construction: RankOneConstruction, config: ReportConfig) -> dict:
    """Assemble all diagnostics into one JSON-serializable report.

    Deterministic for identical (construction, config): sections that hit a
    cap or an error are annotated in place instead of aborting the report.
    """
    K = min(config.stages, construction.num_stages)
    report = {"construction": construction.to_config(), "version": __version__}
    grid = UnitCircleGrid(config.grid_N, "half-step")

    def section(name, fn):
        try:
            report[name] = fn()
        except Exception as exc:  # annotated, never fatal
            report[name] = {"error": f"{type(exc).__name__}: {exc}"}

    def _mahler():
        d = dichotomy_partial(construction, K, config.engine, config.grid_N)
        return {
            "engine": d.engine,
            "partials": [float(x) for x in d.partials],
            "factors": [float(x) for x in d.factors],
            "verdict": d.verdict,
        }

    def _total():
        tm = total_measure(construction, K)
        return {
            "partials": [float(p) for p in tm.partials],
            "partial_exact": str(tm.partial),
            "verdict": tm.verdict,
        }

    def _q_profile():
        prof = q_sequence(
            construction, list(range(1, K + 1)), grid, pairs=[(1, K)] if K > 1 else None
        )
        return {
            "K_values": list(prof.K_values),
            "q_integrals": [float(x) for x in prof.q_integrals],
            "mcgehee_bound": prof.mcgehee_bound,
            "inverse_mass_checks": {
                f"{n},{M}": v for (n, M), v in prof.inverse_mass_checks.items()
            },
            "trend": prof.trend,
        }

    def _atom():
        M = min(config.atom_stage, construction.num_stages)
        L = config.atom_lags or heights(construction, M).heights[max(M - 1, 0)]
        return wiener_atom_mass(construction, M, int(L), cap=config.combinatorial_cap)

    def _nad3():
        M = min(config.atom_stage, construction.num_stages)
        L = config.atom_lags or heights(construction, M).heights[max(M - 1, 0)]
        return nad3_bounds(construction, K, M, int(L), grid, cap=config.combinatorial_cap)

    def _bourgain():
        rng = np.random.Generator(np.random.Philox(key=np.uint64(config.seed)))
        rows = []
        for _ in range(config.bourgain_sets):
            n = int(rng.integers(2, config.bourgain_max_n + 1))
            exps = np.sort(rng.choice(4 * config.bourgain_max_n, size=n, replace=False))
            rows.append(bourgain_gap(exps))
        return rows

    def _main2():
        t = main2_trend(construction, K, config.c_hat)
        return {
            "c_hat": t["c_hat"],
            "products": [float(x) for x in t["products"]],
            "products_squared": [float(x) for x in t["products_squared"]],
            "divergence_sums": [float(x) for x in t["divergence_sums"]],
        }

    section("mahler", _mahler)
    section("total_measure", _total)
    section("klemes_reinhold", lambda: klemes_reinhold(construction, K))
    section("q_profile", _q_profile)
    section("atom_mass", _atom)
    section("nad3", _nad3)
    section("bourgain", _bourgain)
    section("main2", _main2)
    verdicts = {
        "dichotomy": report["mahler"].get("verdict", "undetermined")
        if isinstance(report["mahler"], dict)
        else "undetermined",
        "klemes_reinhold": report["klemes_reinhold"].get("verdict", "undetermined"),
        "q_trend": report["q_profile"].get("trend", "undetermined")
        if isinstance(report["q_profile"], dict)
        else "undetermined",
    }
    report["verdicts"] = verdicts
    report["provenance"] = {
        "grid_N": config.grid_N,
        "caps": {
            "combinatorial": config.combinatorial_cap,
            "degree": config.degree_cap,
        },
        "seed": config.seed,
        "version": __version__,
    }
    return report


def write_report_json(report: dict, path) -> None:
    """Serialize deterministically (sorted keys) and write atomically."""
    payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    atomic_write_text(path, payload)


def atomic_write_text(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
