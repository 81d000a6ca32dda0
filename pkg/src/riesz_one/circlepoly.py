"""Sparse circle polynomials and partial Riesz products on uniform grids.

The stage polynomial of a rank-one construction is
P_k(z) = (1/sqrt(m_k)) * sum_{j<m_k} z^(j h_k + s(k,j)), and the partial
Riesz product is prod_k |P_k|^2.  Exponents get large while term counts stay
small, so evaluation folds exponents mod N (mod 2N on half-step grids) into
a count vector and applies a single length-N inverse DFT, O(m + N log N).
"""

import csv
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .construction import RankOneConstruction, cumulative_spacers, heights
from .errors import (
    CombinatorialCap,
    GridTooCoarseWarning,
    LagOutOfRange,
    OverflowLimit,
)

DEFAULT_COMBINATORIAL_CAP = 1 << 22
INT128_MAX = (1 << 127) - 1


@dataclass(frozen=True)
class SparseCirclePolynomial:
    """A polynomial sum of distinct monomials z^e with a common scale factor."""

    stage: int
    exponents: tuple
    normalization: float

    def __post_init__(self):
        exps = self.exponents
        if len(exps) < 1:
            raise ValueError("need at least one exponent")
        for a, b in zip(exps, exps[1:]):
            if b <= a:
                raise ValueError("exponents must be strictly increasing")
        if exps[0] < 0:
            raise ValueError("exponents must be nonnegative")

    @property
    def m(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return self.exponents[-1]


def sparse_polynomial(exponents: Sequence[int], stage: int = -1) -> SparseCirclePolynomial:
    """General sparse polynomial (1/sqrt(n)) * sum z^e for Bourgain-type runs."""
    exps = tuple(int(e) for e in exponents)
    return SparseCirclePolynomial(stage, exps, 1.0 / np.sqrt(len(exps)))


@dataclass(frozen=True)
class UnitCircleGrid:
    """N evenly spaced points e^(2 pi i (i+delta)/N), delta in {0, 1/2}."""

    N: int
    offset: str = "aligned"  # aligned | half-step

    def __post_init__(self):
        if self.N < 2 or self.N % 2 != 0:
            raise ValueError(f"grid size must be even and >= 2, got {self.N}")
        if self.offset not in ("aligned", "half-step"):
            raise ValueError(f"offset must be 'aligned' or 'half-step', got {self.offset!r}")

    @property
    def delta(self) -> float:
        return 0.0 if self.offset == "aligned" else 0.5

    def thetas(self) -> np.ndarray:
        """Grid angles in turns, [0, 1)."""
        return (np.arange(self.N) + self.delta) / self.N


@dataclass(frozen=True)
class GridDensity:
    grid: UnitCircleGrid
    values: np.ndarray
    stages: tuple  # stage indices included in the product
    exact: bool  # sumset distinct and N > 2 * max total exponent
    max_exponent: int


def stage_polynomial(construction: RankOneConstruction, k: int) -> SparseCirclePolynomial:
    """P_k as the exponent set {j h_k + s(k,j) : j < m_k} with scale 1/sqrt(m_k)."""
    table = heights(construction, k)
    if table.overflow_flag:
        raise OverflowLimit(f"height overflow below stage {k}")
    h_k = table.heights[k]
    s = cumulative_spacers(construction, k)
    exps = tuple(j * h_k + s[j] for j in range(construction.stage(k).m))
    if exps[-1] > INT128_MAX:
        raise OverflowLimit(f"exponent overflow at stage {k}")
    return SparseCirclePolynomial(k, exps, 1.0 / np.sqrt(len(exps)))


def _resolve_stages(stages) -> tuple:
    """Accept a range, a (K0, K) pair, or an explicit iterable of stages."""
    if isinstance(stages, range):
        return tuple(stages)
    return tuple(int(k) for k in stages)


def sumset_exponents(
    construction: RankOneConstruction,
    stages,
    cap: int = DEFAULT_COMBINATORIAL_CAP,
):
    """All total exponents of prod_k P_k, one pick per stage, with
    multiplicity; returns (sorted list, distinct flag)."""
    ks = _resolve_stages(stages)
    total = 1
    polys = []
    for k in ks:
        p = stage_polynomial(construction, k)
        total *= p.m
        if total > cap:
            raise CombinatorialCap(
                f"sumset size {total} exceeds cap {cap} over stages {ks}"
            )
        polys.append(p)
    sums = [0]
    for p in polys:
        sums = [s + e for s in sums for e in p.exponents]
    sums.sort()
    distinct = all(a < b for a, b in zip(sums, sums[1:]))
    return sums, distinct


def evaluate_on_grid(poly: SparseCirclePolynomial, grid: UnitCircleGrid) -> np.ndarray:
    """Values of the polynomial at the grid points, via exponent folding.

    Aligned grids fold mod N; half-step grids fold mod 2N (the half-step
    phase has period 2N in the exponent) and collapse the two halves with
    the quarter-turn twiddle before one inverse DFT.
    """
    N = grid.N
    if grid.offset == "aligned":
        counts = np.zeros(N)
        for e in poly.exponents:
            counts[e % N] += 1.0
        vals = N * np.fft.ifft(counts)
    else:
        counts = np.zeros(2 * N)
        for e in poly.exponents:
            counts[e % (2 * N)] += 1.0
        twiddle = np.exp(1j * np.pi * np.arange(N) / N)
        vals = N * np.fft.ifft((counts[:N] - counts[N:]) * twiddle)
    return poly.normalization * vals


def evaluate_direct(poly: SparseCirclePolynomial, grid: UnitCircleGrid) -> np.ndarray:
    """Reference O(mN) evaluation by direct exponential summation.

    Exponents are reduced mod 2N first (the grid phase has that period), so
    arbitrarily large integer exponents lose no precision.
    """
    th = grid.thetas()
    vals = np.zeros(grid.N, dtype=np.complex128)
    for e in poly.exponents:
        vals += np.exp(2j * np.pi * (e % (2 * grid.N)) * th)
    return poly.normalization * vals


def partial_product_density(
    construction: RankOneConstruction,
    stages,
    grid: UnitCircleGrid,
    cap: int = DEFAULT_COMBINATORIAL_CAP,
) -> GridDensity:
    """prod_k |P_k|^2 sampled on the grid; the empty product is the constant 1.

    The density records whether the grid quadrature is exact: all sumset
    exponents distinct and N > 2 * max total exponent.  When the check fails
    (or the sumset exceeds the cap) the values are still returned, flagged,
    with a GridTooCoarseWarning.
    """
    ks = _resolve_stages(stages)
    values = np.ones(grid.N)
    max_exp = 0
    count = 1
    for k in ks:
        p = stage_polynomial(construction, k)
        values = values * np.abs(evaluate_on_grid(p, grid)) ** 2
        max_exp += p.degree
        count *= p.m
    if ks and count <= cap:
        _, distinct = sumset_exponents(construction, ks, cap)
    else:
        distinct = not ks  # empty product is trivially exact
    exact = distinct and grid.N > 2 * max_exp
    if ks and not exact:
        warnings.warn(
            f"grid N={grid.N} does not resolve the product over stages {ks} "
            f"exactly (max exponent {max_exp}, distinct={distinct})",
            GridTooCoarseWarning,
            stacklevel=2,
        )
    return GridDensity(grid, values, ks, exact, max_exp)


def mean_power(values: np.ndarray, p: float) -> float:
    """(1/N) sum values_i^p for p > 0."""
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return float(np.mean(np.asarray(values) ** p))


def fourier_coefficient(density: GridDensity, n: int) -> float:
    """Coefficient of z^n of the sampled trigonometric polynomial.

    Exact (real, in [0,1] for partial Riesz products) when the density's
    exactness flag holds and |n| < N/2.
    """
    N = density.grid.N
    if abs(n) >= N // 2:
        raise LagOutOfRange(f"lag {n} out of range for N={N}")
    i = np.arange(N)
    phase = np.exp(-2j * np.pi * n * (i + density.grid.delta) / N)
    c = np.dot(density.values, phase) / N
    return float(c.real)


def fourier_coefficients(density: GridDensity, lags: Iterable[int]) -> np.ndarray:
    """Batch version of fourier_coefficient via one FFT."""
    N = density.grid.N
    spec = np.fft.fft(density.values) / N
    out = []
    for n in lags:
        if abs(n) >= N // 2:
            raise LagOutOfRange(f"lag {n} out of range for N={N}")
        c = spec[n % N] * np.exp(-2j * np.pi * n * density.grid.delta / N)
        out.append(c.real)
    return np.array(out)


def density_to_csv(density: GridDensity, path) -> None:
    """Emit `theta,value` rows, theta in turns [0,1), grid order."""
    th = density.grid.thetas()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "value"])
        for t, v in zip(th, density.values):
            w.writerow([repr(float(t)), repr(float(v))])
