"""Hot inner loops with a numba fast path and a pure-numpy fallback.

Backend selection: set RIESZ_ONE_BACKEND=numpy to force the fallback path
(useful for debugging and for the benchmark script); anything else (or unset)
uses numba when it imports cleanly.

Every kernel exists in both flavors with identical semantics; the public
names (``levinson_errors``, ``series_exp``, ``intersect_count``) point at the
selected backend.  The ``*_numpy`` / ``*_numba`` names stay importable so the
benchmark and the backend-agreement tests can compare them directly.
"""

import os

import numpy as np

_BACKEND_ENV = "RIESZ_ONE_BACKEND"


def _numba_wanted() -> bool:
    return os.environ.get(_BACKEND_ENV, "numba").strip().lower() != "numpy"


# --- pure-numpy implementations -------------------------------------------

def levinson_errors_numpy(c):
    """Prediction errors E_0..E_n of the Hermitian Toeplitz system with
    symbol coefficients c[0..n] (c[0] real positive).

    Returns (E, n_stable): E[i] is the order-i error; the recursion stops
    early (n_stable < n) if a reflection coefficient reaches modulus 1 or an
    error turns nonpositive, and the remaining entries repeat the last
    stable value.
    """
    n = len(c) - 1
    E = np.empty(n + 1)
    E[0] = c[0].real
    a = np.zeros(n, dtype=np.complex128)
    for i in range(1, n + 1):
        acc = c[i]
        if i > 1:
            acc = acc - np.dot(a[: i - 1], c[i - 1 : 0 : -1])
        if E[i - 1] <= 0.0:
            E[i:] = E[i - 1]
            return E, i - 1
        k = acc / E[i - 1]
        if abs(k) >= 1.0:
            E[i:] = E[i - 1]
            return E, i - 1
        if i > 1:
            a[: i - 1] = a[: i - 1] - k * np.conj(a[i - 2 :: -1][: i - 1])
        a[i - 1] = k
        E[i] = E[i - 1] * (1.0 - abs(k) ** 2)
    return E, n


def series_exp_numpy(c0_half, c):
    """Taylor coefficients of exp(c0_half + sum_{k>=1} c[k-1] z^k) to order n.

    c has length n; returns an array of length n+1 with entry 0 equal to
    exp(c0_half).  Uses the derivative recurrence n*phi_n = sum j*c_j*phi_{n-j}.
    """
    n = len(c)
    phi = np.zeros(n + 1, dtype=np.complex128)
    phi[0] = np.exp(c0_half)
    jc = np.arange(1, n + 1) * c
    for i in range(1, n + 1):
        phi[i] = np.dot(jc[:i], phi[i - 1 :: -1][:i]) / i
    return phi


def intersect_count_numpy(a, b):
    """Number of common elements of two strictly increasing int64 arrays."""
    idx = np.searchsorted(a, b)
    idx[idx == len(a)] = 0
    return int(np.count_nonzero(a[idx] == b))


# --- numba fast path -------------------------------------------------------

USING_NUMBA = False
levinson_errors_numba = None
series_exp_numba = None
intersect_count_numba = None

if _numba_wanted():
    try:
        import numba

        @numba.njit(cache=True)
        def _levinson_numba(c):
            n = len(c) - 1
            E = np.empty(n + 1)
            E[0] = c[0].real
            a = np.zeros(n, dtype=np.complex128)
            for i in range(1, n + 1):
                acc = c[i]
                for j in range(1, i):
                    acc -= a[j - 1] * c[i - j]
                if E[i - 1] <= 0.0:
                    for t in range(i, n + 1):
                        E[t] = E[i - 1]
                    return E, i - 1
                k = acc / E[i - 1]
                if abs(k) >= 1.0:
                    for t in range(i, n + 1):
                        E[t] = E[i - 1]
                    return E, i - 1
                half = (i - 1) // 2
                for j in range(half):
                    lo = a[j]
                    hi = a[i - 2 - j]
                    a[j] = lo - k * np.conj(hi)
                    a[i - 2 - j] = hi - k * np.conj(lo)
                if (i - 1) % 2 == 1:
                    a[half] = a[half] - k * np.conj(a[half])
                a[i - 1] = k
                E[i] = E[i - 1] * (1.0 - abs(k) ** 2)
            return E, n

        @numba.njit(cache=True)
        def _series_exp_numba(c0_half, c):
            n = len(c)
            phi = np.zeros(n + 1, dtype=np.complex128)
            phi[0] = np.exp(c0_half)
            for i in range(1, n + 1):
                acc = 0.0 + 0.0j
                for j in range(1, i + 1):
                    acc += j * c[j - 1] * phi[i - j]
                phi[i] = acc / i
            return phi

        @numba.njit(cache=True)
        def _intersect_count_numba(a, b):
            i = 0
            j = 0
            count = 0
            while i < len(a) and j < len(b):
                if a[i] < b[j]:
                    i += 1
                elif a[i] > b[j]:
                    j += 1
                else:
                    count += 1
                    i += 1
                    j += 1
            return count

        levinson_errors_numba = _levinson_numba
        series_exp_numba = _series_exp_numba
        intersect_count_numba = _intersect_count_numba
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USING_NUMBA = False

if USING_NUMBA:
    levinson_errors = levinson_errors_numba
    series_exp = series_exp_numba

    def intersect_count(a, b):
        return int(intersect_count_numba(a, b))
else:
    levinson_errors = levinson_errors_numpy
    series_exp = series_exp_numpy
    intersect_count = intersect_count_numpy
