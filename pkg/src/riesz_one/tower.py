"""Exact combinatorial oracle: occurrence sets of a base level inside a
taller tower, their autocorrelations, and Wiener atom-mass estimates.

The stage-K0 base tiles the stage-M tower at the level set
S_{K0,K0} = {0},  S_{K0,M+1} = union_j { j h_M + s(M,j) + t : t in S_{K0,M} },
and |S cap (S+n)| / |S| equals the lag-n Fourier coefficient of the partial
Riesz product prod_{K0<=k<M} |P_k|^2 whenever all sumset exponents are
distinct.  Everything here is integer-exact; no orbit is ever simulated.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .circlepoly import DEFAULT_COMBINATORIAL_CAP
from .construction import RankOneConstruction, cumulative_spacers, heights
from .errors import CombinatorialCap, LagOutOfRange, OverflowLimit

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class OccurrenceSet:
    base_stage: int
    ambient_stage: int
    levels: np.ndarray  # strictly increasing int64
    ambient_height: int

    @property
    def count(self) -> int:
        return int(self.levels.size)


def occurrence_set(
    construction: RankOneConstruction,
    K0: int,
    M: int,
    cap: int = DEFAULT_COMBINATORIAL_CAP,
) -> OccurrenceSet:
    if M < K0:
        raise ValueError(f"need M >= K0, got K0={K0}, M={M}")
    table = heights(construction, M)
    if table.overflow_flag:
        raise OverflowLimit(f"height overflow below stage {M}")
    if table.heights[M] >= _INT64_SAFE:
        raise OverflowLimit(f"tower height h_{M} exceeds the int64-safe range")
    count = 1
    for k in range(K0, M):
        count *= construction.stage(k).m
        if count > cap:
            raise CombinatorialCap(f"occurrence set size {count} exceeds cap {cap}")
    levels = np.zeros(1, dtype=np.int64)
    for k in range(K0, M):
        h_k = table.heights[k]
        s = cumulative_spacers(construction, k)
        offsets = np.array(
            [j * h_k + s[j] for j in range(construction.stage(k).m)], dtype=np.int64
        )
        levels = (offsets[:, None] + levels[None, :]).ravel()
        levels.sort()
    return OccurrenceSet(K0, M, levels, table.heights[M])


def autocorrelation(S: OccurrenceSet, n: int) -> Fraction:
    """|S cap (S+n)| / |S| as an exact rational (even in n)."""
    if abs(n) >= S.ambient_height:
        raise LagOutOfRange(f"lag {n} out of range for tower height {S.ambient_height}")
    shifted = S.levels + np.int64(abs(n))
    count = _kernels.intersect_count(S.levels, shifted)
    return Fraction(count, S.count)


def autocorrelation_profile(S: OccurrenceSet, L: int) -> np.ndarray:
    """Autocorrelations at lags 0..L-1 in one pass, via the integer-exact
    FFT convolution of the level indicator with itself."""
    if L > S.ambient_height:
        raise LagOutOfRange(f"L={L} exceeds tower height {S.ambient_height}")
    h = int(S.levels[-1]) + 1
    size = 1
    while size < h + L:
        size *= 2
    if size > 1 << 26:
        # Sparse tall towers: pairwise merges beat a huge FFT buffer.
        counts = np.array(
            [
                _kernels.intersect_count(S.levels, S.levels + np.int64(n))
                for n in range(L)
            ],
            dtype=np.int64,
        )
        return counts / S.count
    ind = np.zeros(size)
    ind[S.levels] = 1.0
    spec = np.fft.rfft(ind)
    corr = np.fft.irfft(np.abs(spec) ** 2, size)
    counts = np.rint(corr[:L]).astype(np.int64)
    return counts / S.count


def wiener_atom_mass(
    construction: RankOneConstruction,
    M: int,
    L: int,
    K0: int = 0,
    cap: int = DEFAULT_COMBINATORIAL_CAP,
) -> float:
    """Cesaro average (1/L) sum_{n<L} of the unbiased lag correlations: the
    Wiener-type estimate of the spectral mass at z=1 of the stage-K0 base
    vector.

    The raw ratio |S cap (S+n)|/|S| carries the triangular finite-window
    bias (overlaps exiting the top of the stage-M tower are lost), so each
    lag is rescaled by h_M/(h_M - n) before averaging; for the zero-spacer
    tower this recovers exactly 1 at every lag.  One-sided lags suffice
    since the autocorrelation is even in n.
    """
    S = occurrence_set(construction, K0, M, cap)
    h_M = S.ambient_height
    if L < 1 or L > h_M:
        raise LagOutOfRange(f"L={L} out of range for tower height {h_M}")
    raw = autocorrelation_profile(S, L)
    window = 1.0 - np.arange(L) / h_M
    return float(np.mean(raw / window))
