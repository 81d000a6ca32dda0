"""Mahler measure engines and prediction-error numerics.

Four independent routes to M(h) = exp(mean log h):

* grid       -- log-quadrature on a half-step grid (zeros at roots of unity
                are dodged by the offset, never clipped);
* jensen     -- |leading| * product of root moduli outside the unit circle,
                roots from the companion matrix of the densified polynomial;
* szego      -- weighted prediction errors E_n via a Levinson recursion on
                the Fourier coefficients of h, E_n decreasing to M(h);
* kolmogorov -- harmonic mean (mean 1/h)^-1, a lower proxy that collapses
                to 0 under refinement when 1/h is not integrable.

Plus the outer-function truncation: Taylor coefficients of phi with
|phi|^2 = h, driving the Nakazi-Takahashi error (sum |alpha_k|^2)^(1/2).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .circlepoly import GridDensity, SparseCirclePolynomial, UnitCircleGrid, evaluate_on_grid
from .errors import (
    DegreeTooLarge,
    LogDiverged,
    NotConvergedWarning,
    RootFindingDiverged,
)

DEFAULT_DEGREE_CAP = 4096
SAMPLE_FLOOR = 1e-300
HARMONIC_CEILING = 1e12
CIRCLE_TOL = 1e-8


@dataclass(frozen=True)
class MahlerEstimate:
    value: float
    engine: str  # grid | jensen | szego | kolmogorov-lower
    refinement_gap: float
    status: str  # exact-class | estimate


@dataclass(frozen=True)
class OuterCoefficients:
    alphas: np.ndarray  # complex, length n+1
    n: int
    source_mean: float


@dataclass(frozen=True)
class SzegoResult:
    errors: np.ndarray  # E_1..E_n
    truncated: bool  # recursion stopped early (numerically degenerate)


@dataclass(frozen=True)
class DeltaNormProfile:
    deltas: np.ndarray
    norms: np.ndarray  # ||f||_delta = (mean f^delta)^(1/delta)
    support_mass: float  # mean f^delta_min, estimates the measure of {f>0}


def mahler_grid(values: np.ndarray, engine: str = "grid") -> MahlerEstimate:
    """exp(mean log values) over half-step grid samples.

    Samples under the 1e-300 floor are excluded (reported via the estimate
    status) rather than clipped; the refinement gap compares against the
    even-index subsample, itself a valid uniform circle grid of size N/2.
    """
    v = np.asarray(values, dtype=float)
    ok = v > SAMPLE_FLOOR
    excluded = int(v.size - np.count_nonzero(ok))
    logs = np.log(v[ok])
    value = float(np.exp(np.mean(logs))) if logs.size else 0.0
    sub = v[::2]
    sub_ok = sub > SAMPLE_FLOOR
    sub_val = float(np.exp(np.mean(np.log(sub[sub_ok])))) if np.any(sub_ok) else 0.0
    gap = abs(value - sub_val)
    status = "exact-class" if excluded == 0 else "estimate"
    return MahlerEstimate(value, engine, gap, status)


def mahler_grid_poly(poly: SparseCirclePolynomial, N: int) -> MahlerEstimate:
    """Grid-engine Mahler measure of |P| on a half-step grid of size N."""
    grid = UnitCircleGrid(N, "half-step")
    return mahler_grid(np.abs(evaluate_on_grid(poly, grid)))


def dense_coefficients(poly: SparseCirclePolynomial) -> np.ndarray:
    """Unit coefficients at the sparse exponents, without the scale factor."""
    c = np.zeros(poly.degree + 1)
    for e in poly.exponents:
        c[e] = 1.0
    return c


def polynomial_roots(poly: SparseCirclePolynomial, degree_cap: int = DEFAULT_DEGREE_CAP) -> np.ndarray:
    if poly.degree > degree_cap:
        raise DegreeTooLarge(
            f"degree {poly.degree} exceeds root-finding cap {degree_cap}"
        )
    if poly.degree == 0:
        return np.array([], dtype=complex)
    roots = np.roots(dense_coefficients(poly)[::-1])
    if not np.all(np.isfinite(roots)):
        raise RootFindingDiverged("companion eigenvalues did not converge")
    return roots


def mahler_jensen(
    poly: SparseCirclePolynomial, degree_cap: int = DEFAULT_DEGREE_CAP
) -> MahlerEstimate:
    """Jensen-formula Mahler measure: normalization * prod_{|alpha|>1} |alpha|.

    Roots within 1e-8 of the unit circle contribute factor 1 (an empty
    outside-product is 1, so the constant polynomial a yields |a|).
    """
    roots = polynomial_roots(poly, degree_cap)
    mods = np.abs(roots)
    outside = mods[mods > 1.0 + CIRCLE_TOL]
    value = poly.normalization * float(np.prod(outside)) if outside.size else poly.normalization
    return MahlerEstimate(float(value), "jensen", 0.0, "exact-class")


def delta_norm_profile(values: np.ndarray, deltas) -> DeltaNormProfile:
    """delta-norms (mean f^delta)^(1/delta) along a decreasing delta sequence.

    The norms are nonincreasing as delta decreases and tend to M(f); the
    smallest-delta power mean also estimates the support mass of f.
    """
    ds = np.asarray(list(deltas), dtype=float)
    if np.any(np.diff(ds) >= 0):
        raise ValueError("deltas must be strictly decreasing")
    v = np.asarray(values, dtype=float)
    # f^delta = exp(delta log f) computed in log space so indicator-type
    # densities underflow gracefully instead of raising.
    with np.errstate(divide="ignore"):
        logv = np.where(v > 0, np.log(np.where(v > 0, v, 1.0)), -np.inf)
    norms = []
    for d in ds:
        powered = np.exp(d * logv)
        powered[~np.isfinite(logv)] = 0.0
        mean = np.mean(powered)
        norms.append(mean ** (1.0 / d) if mean > 0 else 0.0)
    powered = np.exp(ds[-1] * logv)
    powered[~np.isfinite(logv)] = 0.0
    support = float(np.mean(powered))
    return DeltaNormProfile(ds, np.array(norms), support)


def _fourier_coeffs_of_samples(density: GridDensity, n_max: int) -> np.ndarray:
    """Coefficients c_0..c_n_max of the sampled function, offset-corrected."""
    N = density.grid.N
    spec = np.fft.fft(np.asarray(density.values, dtype=complex)) / N
    ks = np.arange(n_max + 1)
    return spec[ks] * np.exp(-2j * np.pi * ks * density.grid.delta / N)


def szego_error_sequence(density: GridDensity, n_max: int) -> SzegoResult:
    """Prediction errors E_1..E_n_max of min over degree-n analytic
    polynomials with zero constant term of the weighted error int |1-P|^2 h.

    Levinson recursion on the Toeplitz moment matrix of h; E_n is
    nonincreasing and decreases to M(h).
    """
    if n_max >= density.grid.N // 2:
        raise ValueError(f"n_max={n_max} must be < N/2 = {density.grid.N // 2}")
    c = _fourier_coeffs_of_samples(density, n_max)
    E, n_stable = _kernels.levinson_errors(np.ascontiguousarray(c, dtype=complex))
    return SzegoResult(np.asarray(E)[1:], n_stable < n_max)


def kolmogorov_error(density: GridDensity):
    """Harmonic-mean lower engine (mean 1/h)^-1.

    Returns (value, diverged): diverged flags mean(1/h) beyond the ceiling
    (the grid-scale analog of a non-integrable log), value then reported as
    the 0-proxy lower bound.
    """
    v = np.asarray(density.values, dtype=float)
    if np.any(v <= SAMPLE_FLOOR):
        return 0.0, True
    inv_mean = float(np.mean(1.0 / v))
    if inv_mean > HARMONIC_CEILING:
        return 0.0, True
    return 1.0 / inv_mean, False


def outer_coefficients(
    density: GridDensity, n: int, decay_tol: float = 1e-6
) -> OuterCoefficients:
    """Taylor coefficients alpha_0..alpha_n of the outer function phi with
    |phi|^2 = h: phi = exp(c_0/2 + sum_{k>=1} c_k z^k) for the Fourier
    coefficients c_k of log h, expanded by the derivative recurrence.

    alpha_0 = exp(c_0/2) = sqrt(M(h)); Parseval drives sum |alpha_k|^2 to
    mean(h) as n grows.
    """
    if n >= density.grid.N // 2:
        raise ValueError(f"n={n} must be < N/2 = {density.grid.N // 2}")
    v = np.asarray(density.values, dtype=float)
    if np.any(v <= SAMPLE_FLOOR):
        raise LogDiverged("density has (near-)zero samples; use a half-step grid")
    logs = np.log(v)
    log_density = GridDensity(density.grid, logs, density.stages, density.exact, density.max_exponent)
    c = _fourier_coeffs_of_samples(log_density, n)
    alphas = np.asarray(
        _kernels.series_exp(complex(c[0].real / 2.0), np.ascontiguousarray(c[1:], dtype=complex))
    )
    total = float(np.sum(np.abs(alphas) ** 2))
    if n > 0 and abs(alphas[-1]) ** 2 > decay_tol * total:
        warnings.warn(
            f"outer expansion tail |alpha_{n}|^2 has not decayed below "
            f"{decay_tol} of the partial Parseval sum",
            NotConvergedWarning,
            stacklevel=2,
        )
    return OuterCoefficients(alphas, n, float(np.mean(v)))


def nakazi_error(density: GridDensity, n: int) -> float:
    """(sum_{k<=n} |alpha_k|^2)^(1/2): nondecreasing in n, sqrt(M(h)) at n=0,
    tending to sqrt(mean h) = 1 for probability densities."""
    oc = outer_coefficients(density, n)
    return float(np.sqrt(np.sum(np.abs(oc.alphas) ** 2)))
