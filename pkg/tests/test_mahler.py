import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_one import circlepoly as P
from riesz_one import mahler as M
from riesz_one.errors import DegreeTooLarge, LogDiverged

# Root oracle for (1+z+z^3)/sqrt(3): the real root of z^3+z+1 lies inside
# the unit disk, the conjugate pair outside with |pair|^2 = 1/|real root|.
_REAL_ROOT = -0.6823278038280193
_M_CUBIC = (1.0 / abs(_REAL_ROOT)) / np.sqrt(3.0)


def _half_grid(N):
    return P.UnitCircleGrid(N, "half-step")


def _density(poly, N):
    grid = _half_grid(N)
    vals = np.abs(P.evaluate_on_grid(poly, grid)) ** 2
    return P.GridDensity(grid, vals, (), True, poly.degree)


def test_mahler_grid_constant_one():
    est = M.mahler_grid(np.ones(64))
    assert est.value == pytest.approx(1.0)
    assert est.status == "exact-class"


def test_mahler_grid_one_plus_z():
    p = P.sparse_polynomial([0, 1])
    est = M.mahler_grid_poly(p, 1 << 16)
    assert est.value == pytest.approx(1 / np.sqrt(2), abs=1e-5)


def test_mahler_grid_cubic():
    p = P.sparse_polynomial([0, 1, 3])
    est = M.mahler_grid_poly(p, 1 << 16)
    assert est.value == pytest.approx(_M_CUBIC, abs=1e-4)
    assert est.refinement_gap < 1e-4


def test_mahler_grid_floor_exclusion():
    vals = np.ones(16)
    vals[3] = 0.0
    est = M.mahler_grid(vals)
    assert est.status == "estimate"
    assert est.value == pytest.approx(1.0)


def test_mahler_jensen_one_plus_z():
    p = P.sparse_polynomial([0, 1])
    assert M.mahler_jensen(p).value == pytest.approx(1 / np.sqrt(2), abs=1e-12)


def test_mahler_jensen_constant():
    p = P.SparseCirclePolynomial(-1, (0,), 0.7)
    assert M.mahler_jensen(p).value == pytest.approx(0.7)


def test_mahler_jensen_cubic():
    p = P.sparse_polynomial([0, 1, 3])
    assert M.mahler_jensen(p).value == pytest.approx(_M_CUBIC, abs=1e-6)


def test_mahler_jensen_degree_cap():
    p = P.sparse_polynomial([0, 5000])
    with pytest.raises(DegreeTooLarge):
        M.mahler_jensen(p, degree_cap=4096)


@settings(max_examples=30, deadline=None)
@given(
    exps=st.sets(st.integers(min_value=0, max_value=64), min_size=2, max_size=12)
)
def test_engine_agreement_random(exps):
    # grid bias scales with the number of circle zeros (up to 64 here)
    p = P.sparse_polynomial(sorted(exps))
    grid_est = M.mahler_grid_poly(p, 1 << 20)
    jensen_est = M.mahler_jensen(p)
    assert abs(grid_est.value - jensen_est.value) <= 1e-4


def test_multiplicativity_on_grid():
    rng = np.random.default_rng(5)
    f = np.exp(rng.normal(size=512))
    g = np.exp(rng.normal(size=512))
    lhs = M.mahler_grid(f * g).value
    rhs = M.mahler_grid(f).value * M.mahler_grid(g).value
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_delta_norm_constant():
    prof = M.delta_norm_profile(np.ones(32), [0.5, 0.25])
    assert np.allclose(prof.norms, 1.0)
    assert prof.support_mass == pytest.approx(1.0)


def test_delta_norm_indicator_collapse():
    vals = np.zeros(256)
    vals[:128] = 2.0
    prof = M.delta_norm_profile(vals, [1 / 64])
    expected = (2 ** (1 / 64) / 2) ** 64
    assert prof.norms[0] == pytest.approx(expected, rel=1e-9)
    assert prof.norms[0] < 1e-15
    assert prof.support_mass == pytest.approx(0.5 * 2 ** (1 / 64), rel=1e-12)


def test_delta_norm_monotone_toward_mahler():
    p = P.sparse_polynomial([0, 1])
    grid = _half_grid(1 << 14)
    vals = np.abs(P.evaluate_on_grid(p, grid)) ** 2
    deltas = [1 / 2, 1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64]
    prof = M.delta_norm_profile(vals, deltas)
    assert np.all(np.diff(prof.norms) <= 1e-12)
    assert prof.norms[-1] == pytest.approx(0.5, abs=2e-2)


def test_delta_norm_requires_decreasing():
    with pytest.raises(ValueError):
        M.delta_norm_profile(np.ones(8), [0.25, 0.5])


def test_szego_constant_density():
    d = P.GridDensity(_half_grid(256), np.ones(256), (), True, 0)
    res = M.szego_error_sequence(d, 16)
    assert np.allclose(res.errors, 1.0)
    assert not res.truncated


def test_szego_one_plus_z_levinson_step():
    p = P.sparse_polynomial([0, 1])
    d = _density(p, 1 << 12)
    res = M.szego_error_sequence(d, 512)
    assert res.errors[0] == pytest.approx(0.75, abs=1e-10)
    assert np.all(np.diff(res.errors) <= 1e-12)
    assert res.errors[-1] == pytest.approx(0.5, abs=2e-3)


def test_szego_limit_is_mahler():
    p = P.sparse_polynomial([0, 1, 3])
    res = M.szego_error_sequence(_density(p, 1 << 12), 512)
    assert np.sqrt(res.errors[-1]) == pytest.approx(_M_CUBIC, abs=1e-6)


def test_kolmogorov_constant():
    d = P.GridDensity(_half_grid(64), np.ones(64), (), True, 0)
    value, diverged = M.kolmogorov_error(d)
    assert value == pytest.approx(1.0)
    assert not diverged


def test_kolmogorov_divergence_under_refinement():
    # 1/|1+z|^2 is not integrable: harmonic-mean values collapse with N
    p = P.sparse_polynomial([0, 1])
    values = [M.kolmogorov_error(_density(p, N))[0] for N in (1 << 8, 1 << 12, 1 << 16)]
    assert values[0] > values[1] > values[2]


def test_kolmogorov_below_szego():
    # h = |2+z|^2/5: M(h) = 4/5, harmonic mean strictly below
    grid = _half_grid(1 << 12)
    z = np.exp(2j * np.pi * grid.thetas())
    d = P.GridDensity(grid, np.abs(2 + z) ** 2 / 5, (), True, 1)
    value, diverged = M.kolmogorov_error(d)
    assert not diverged
    assert value < 0.8
    res = M.szego_error_sequence(d, 256)
    assert res.errors[-1] == pytest.approx(0.8, abs=1e-6)
    assert value <= res.errors[-1]


def test_outer_constant():
    d = P.GridDensity(_half_grid(128), np.ones(128), (), True, 0)
    oc = M.outer_coefficients(d, 8)
    assert oc.alphas[0] == pytest.approx(1.0)
    assert np.max(np.abs(oc.alphas[1:])) < 1e-12


def test_outer_one_plus_z_factorization():
    p = P.sparse_polynomial([0, 1])
    d = _density(p, 1 << 21)
    oc = M.outer_coefficients(d, 8)
    r = 1 / np.sqrt(2)
    assert oc.alphas[0].real == pytest.approx(r, abs=1e-6)
    assert abs(oc.alphas[0].imag) < 1e-9
    assert oc.alphas[1] == pytest.approx(r, abs=1e-6)
    assert np.max(np.abs(oc.alphas[2:])) < 1e-5


def test_outer_parseval_approaches_mean():
    p = P.sparse_polynomial([0, 1, 3])
    d = _density(p, 1 << 14)
    oc = M.outer_coefficients(d, 64)
    total = float(np.sum(np.abs(oc.alphas) ** 2))
    assert total == pytest.approx(float(np.mean(d.values)), abs=1e-6)
    assert total <= float(np.mean(d.values)) + 1e-9


def test_outer_rejects_zero_samples():
    vals = np.ones(64)
    vals[5] = 0.0
    d = P.GridDensity(_half_grid(64), vals, (), True, 0)
    with pytest.raises(LogDiverged):
        M.outer_coefficients(d, 4)


def test_nakazi_values():
    p = P.sparse_polynomial([0, 1])
    d = _density(p, 1 << 16)
    assert M.nakazi_error(d, 0) == pytest.approx(1 / np.sqrt(2), abs=1e-4)
    assert M.nakazi_error(d, 1) == pytest.approx(1.0, abs=1e-4)
    ones = P.GridDensity(_half_grid(64), np.ones(64), (), True, 0)
    assert M.nakazi_error(ones, 5) == pytest.approx(1.0)


def test_nakazi_nondecreasing():
    p = P.sparse_polynomial([0, 1, 3])
    d = _density(p, 1 << 12)
    vals = [M.nakazi_error(d, n) for n in range(6)]
    assert np.all(np.diff(vals) >= -1e-12)
    assert vals[0] ** 2 == pytest.approx(_M_CUBIC**2, abs=5e-3)
