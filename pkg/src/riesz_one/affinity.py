"""Affinity/Hellinger geometry and the inequality battery for partial
Riesz products.

All measures are discretized against the same uniform grid measure, so the
dominating measure in the affinity integral is canonical and the results
are independent of any other choice of reference.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circlepoly import (
    GridDensity,
    UnitCircleGrid,
    _resolve_stages,
    evaluate_on_grid,
    stage_polynomial,
    sumset_exponents,
)
from .construction import RankOneConstruction
from .errors import GridMismatch, WitnessUndefined

INEQ_TOL = 1e-9
Q_FLOOR = 1e-150


@dataclass(frozen=True)
class AffinityResult:
    G: float  # affinity, mean of the geometric-mean density
    H: float  # Hellinger distance sqrt(2(1-G))


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool
    margin: float
    exact: bool  # grid quadrature preconditions held


@dataclass(frozen=True)
class QSequenceProfile:
    K_values: tuple
    q_integrals: np.ndarray  # int prod_{k<K} |P_k| per K
    mcgehee_bound: float  # (int |P_k0|)^(1/2), k0 the first stage
    inverse_mass_checks: dict  # (n, M) -> int (1/Q_n) Q_M^2, or None if skipped
    trend: str  # singularity-consistent | inconsistent | undetermined


def affinity_hellinger(f: GridDensity, g: GridDensity) -> AffinityResult:
    """G = mean sqrt(f g), H = sqrt(2(1-G)); G=1 iff the densities agree."""
    if f.grid != g.grid:
        raise GridMismatch(f"grids differ: {f.grid} vs {g.grid}")
    G = float(np.mean(np.sqrt(np.asarray(f.values) * np.asarray(g.values))))
    H = float(np.sqrt(max(0.0, 2.0 * (1.0 - G))))
    return AffinityResult(G, H)


def _abs_products(construction, ks, grid):
    """|P_k| sampled per stage, plus exactness of the full squared product."""
    polys = [stage_polynomial(construction, k) for k in ks]
    mods = [np.abs(evaluate_on_grid(p, grid)) for p in polys]
    max_exp = sum(p.degree for p in polys)
    try:
        _, distinct = sumset_exponents(construction, ks)
    except Exception:
        distinct = False
    exact = distinct and grid.N > 2 * max_exp
    return mods, exact


def mcgheeps_check(
    construction: RankOneConstruction,
    stages,
    grid: UnitCircleGrid,
    k0: Optional[int] = None,
) -> InequalityCheck:
    """(int prod_{k in stages} |P_k|)^2 <= int |P_k0| for any member stage k0.

    Exact on the grid (up to roundoff) whenever the squared product
    quadrature is exact; otherwise the result is flagged estimate-only.
    """
    ks = _resolve_stages(stages)
    if k0 is None:
        k0 = min(ks)
    if k0 not in ks:
        raise ValueError(f"k0={k0} not among stages {ks}")
    mods, exact = _abs_products(construction, ks, grid)
    Q = np.ones(grid.N)
    for v in mods:
        Q *= v
    lhs = float(np.mean(Q)) ** 2
    rhs = float(np.mean(mods[ks.index(k0)]))
    return InequalityCheck(lhs, rhs, lhs <= rhs + INEQ_TOL, rhs - lhs, exact)


def fractional_mean_check(
    construction: RankOneConstruction,
    K: int,
    k: int,
    grid: UnitCircleGrid,
) -> InequalityCheck:
    """int (prod_{j<K} |P_j|)^(1/k) <= prod_{i<k} (int |P_i|)^(1/(2k)).

    Stages are split into residue classes mod k; per class the McGehee bound
    applies with its smallest stage i, and generalized Hoelder glues the
    classes.  k=1 reduces to mcgheeps_check with k0=0.
    """
    if k < 1 or k > K:
        raise ValueError(f"need 1 <= k <= K, got k={k}, K={K}")
    ks = tuple(range(K))
    mods, exact = _abs_products(construction, ks, grid)
    Q = np.ones(grid.N)
    for v in mods:
        Q *= v
    lhs = float(np.mean(Q ** (1.0 / k)))
    rhs = 1.0
    for i in range(k):
        rhs *= float(np.mean(mods[i])) ** (1.0 / (2.0 * k))
    return InequalityCheck(lhs, rhs, lhs <= rhs + INEQ_TOL, rhs - lhs, exact)


def q_sequence(
    construction: RankOneConstruction,
    K_list,
    grid: UnitCircleGrid,
    pairs=None,
    decay_threshold: float = 0.5,
) -> QSequenceProfile:
    """Partial-product L^1 masses int Q_K (the affinity of the K-stage Riesz
    product with the uniform measure), with the McGehee cap and the
    inverse-mass certificates int (1/Q_n) Q_M^2 for (n, M) pairs.

    The trend is "singularity-consistent" when the masses decrease
    monotonically and the last falls below decay_threshold times the first,
    "inconsistent" when they stay essentially flat, else "undetermined";
    this is a reported trend about partial products, never a claim about
    the weak-* limit.
    """
    K_values = tuple(int(K) for K in K_list)
    K_max = max(K_values) if K_values else 0
    mods, _ = _abs_products(construction, tuple(range(K_max)), grid)
    # Q_K for every prefix once, reused below.
    Q = {0: np.ones(grid.N)}
    for K in range(1, K_max + 1):
        Q[K] = Q[K - 1] * mods[K - 1]
    q_integrals = np.array([float(np.mean(Q[K])) for K in K_values])
    bound = float(np.sqrt(np.mean(mods[0]))) if K_max >= 1 else 1.0
    inverse = {}
    for (n, M) in pairs or ():
        if M < n or M > K_max:
            raise ValueError(f"bad pair (n={n}, M={M})")
        if np.min(Q[n]) < Q_FLOOR:
            inverse[(n, M)] = None
        else:
            inverse[(n, M)] = float(np.mean(Q[M] ** 2 / Q[n]))
    qs = q_integrals
    if len(qs) >= 2:
        decreasing = bool(np.all(np.diff(qs) <= INEQ_TOL))
        if decreasing and qs[-1] < decay_threshold * qs[0]:
            trend = "singularity-consistent"
        elif qs[-1] > 0.99 * qs[0]:
            trend = "inconsistent"
        else:
            trend = "undetermined"
    else:
        trend = "undetermined"
    return QSequenceProfile(K_values, q_integrals, bound, inverse, trend)


def kilmer_saeki_witness(f: np.ndarray, rho: GridDensity, tau: GridDensity) -> float:
    """(int f d rho)(int (1/f) d tau): small values witness near-singularity.

    Scale-invariant in f; undefined when f vanishes somewhere tau charges.
    """
    if rho.grid != tau.grid:
        raise GridMismatch("rho and tau live on different grids")
    f = np.asarray(f, dtype=float)
    tau_v = np.asarray(tau.values, dtype=float)
    if np.any((f <= 0.0) & (tau_v > 0.0)):
        raise WitnessUndefined("f vanishes on the support of tau")
    int_f = float(np.mean(f * np.asarray(rho.values)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(tau_v > 0.0, tau_v / np.where(f > 0, f, 1.0), 0.0)
    int_inv = float(np.mean(ratio))
    return int_f * int_inv
