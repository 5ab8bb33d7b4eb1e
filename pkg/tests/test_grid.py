import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from biorth.errors import InputError, ResolutionError
from biorth.grid import (
    Grid,
    as_coefficients,
    as_frequencies,
    corollary_report,
    dirichlet_audit,
    dirichlet_kernel,
    fourier_maximal,
    lebesgue_constant,
    lebesgue_sweep,
    maximal_data,
    salem_bounds,
    salem_pair,
    salem_vectors,
    trig_system,
)
from biorth.pairs import inequality_functional

# 1/3 + 2 sqrt(3) / pi, the Lebesgue constant of order 1
LEBESGUE_1 = 1.4359911241769


def fejer_lebesgue(m):
    """Closed form ``1/(2m+1) + (2/pi) sum_k tan(pi k/(2m+1)) / k`` (independent oracle)."""
    q = 2 * m + 1
    k = np.arange(1, m + 1)
    return 1.0 / q + 2.0 / np.pi * float(np.sum(np.tan(np.pi * k / q) / k))


def test_grid_basics():
    g = Grid(8)
    assert g.weight == 0.125
    assert g.integral(np.ones(8)) == 1.0
    assert g.norm1(-np.ones(8)) == 1.0
    assert g.norm_inf(np.arange(8)) == 7
    with pytest.raises(InputError):
        Grid(1)


def test_character_periodic_and_unimodular():
    g = Grid(1000)
    big = 10**15 + 7
    assert np.allclose(g.character(big), g.character(big % 1000), atol=1e-12)
    assert np.allclose(np.abs(g.character(123)), 1.0)


@given(n=st.integers(1, 12), N=st.integers(26, 200))
def test_trig_system_orthonormal(n, N):
    h = trig_system(np.arange(-n // 2, n - n // 2), Grid(N))
    assert h.orthonormality_residual() < 1e-12


def test_trig_system_aliasing():
    with pytest.raises(ResolutionError):
        trig_system([1, 2, 5], Grid(10))
    with pytest.raises(InputError):
        as_frequencies([1, 1])


def test_as_coefficients_accepts_pairs():
    a = as_coefficients([[1, 2], 3], 2)
    assert a[0] == 1 + 2j and a[1] == 3
    with pytest.raises(InputError):
        as_coefficients([1, 2], 3)


@given(m=st.integers(0, 40))
def test_dirichlet_kernel_is_character_sum(m):
    g = Grid(256)
    direct = sum(g.character(k) for k in range(-m, m + 1)).real
    assert np.allclose(dirichlet_kernel(m, g), direct, atol=1e-10)


def test_lebesgue_order_one_frozen():
    assert lebesgue_constant(1) == pytest.approx(LEBESGUE_1, rel=1e-8)
    assert fejer_lebesgue(1) == pytest.approx(LEBESGUE_1, rel=1e-13)


@pytest.mark.parametrize("m", [1, 2, 5, 16, 100, 333])
def test_lebesgue_matches_closed_form(m):
    assert lebesgue_constant(m) == pytest.approx(fejer_lebesgue(m), rel=1e-7)


def test_lebesgue_needs_resolution():
    with pytest.raises(ResolutionError):
        lebesgue_constant(10, 100)


def test_lebesgue_sweep_slope():
    rows, slope, intercept = lebesgue_sweep([16, 64, 256, 1024])
    assert [r["m"] for r in rows] == [16, 64, 256, 1024]
    assert slope == pytest.approx(4 / math.pi**2, rel=0.02)


def test_dirichlet_audit_kappa_is_pi():
    audit = dirichlet_audit(20)
    assert audit.peak_excess <= 0
    # attained at x = 1/2 where |D_m| = 1 and the distance to 0 is pi
    assert audit.kappa == pytest.approx(math.pi, rel=1e-12)


@given(n=st.integers(1, 10), seed=st.integers(0, 10**6))
def test_maximal_data_matches_brute_force(n, seed):
    rng = np.random.default_rng(seed)
    h = trig_system(np.arange(1, n + 1), Grid(64))
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    data = maximal_data(a, h)
    partial = np.cumsum(a[:, None] * h.values, axis=0)
    assert np.allclose(data.partial, partial)
    assert np.allclose(data.smax, np.abs(partial).max(axis=0))
    assert np.all(np.abs(partial[data.stop - 1, np.arange(64)]) >= data.smax * (1 - 1e-12))
    assert data.M == pytest.approx(1.0)


@given(
    n=st.integers(2, 12),
    seed=st.integers(0, 10**6),
)
def test_salem_pair_properties(n, seed):
    rng = np.random.default_rng(seed)
    freqs = np.sort(rng.choice(np.arange(-20, 21), size=n, replace=False))
    a = rng.uniform(0.3, 2, n) * np.exp(2j * np.pi * rng.uniform(size=n))
    h = trig_system(freqs, Grid(128))
    data = maximal_data(a, h)
    pair = salem_pair(a, h, data=data)
    assert pair.residual <= 1e-8
    assert min(salem_bounds(a, h, data=data, pair=pair).values()) >= -1e-9
    # partial sums of v are S_k / sqrt(S*), bounded pointwise by sqrt(S*)
    sigma = np.cumsum(pair.V, axis=0)
    assert np.all(np.abs(sigma) <= np.sqrt(data.smax) * (1 + 1e-9) + 1e-12)


def test_salem_vectors_vanish_with_maximal_function():
    h = trig_system([0], Grid(16))
    V, W, data = salem_vectors([1.0], h)
    assert np.allclose(np.abs(V), 1) and np.allclose(np.abs(W), 1)


def test_salem_product_tracks_log():
    ratios = []
    for n in (16, 64):
        h = trig_system(np.arange(1, n + 1), Grid(4096))
        ratios.append(inequality_functional(salem_pair(np.ones(n), h)).product / math.log(n))
    assert ratios[1] < ratios[0] < 1.0


def test_fourier_maximal_matches_direct_partial_sums(rng):
    g = Grid(64)
    degree = 6
    c = rng.standard_normal(2 * degree + 1) + 1j * rng.standard_normal(2 * degree + 1)
    freqs = np.arange(-degree, degree + 1)
    p = c @ trig_system(freqs, g).values
    direct = np.zeros(64)
    for m in range(degree + 1):
        keep = np.abs(freqs) <= m
        direct = np.maximum(direct, np.abs(c[keep] @ trig_system(freqs[keep], g).values))
    assert np.allclose(fourier_maximal(p, degree), direct, atol=1e-12)


def test_fourier_maximal_rejects_higher_degree():
    g = Grid(64)
    p = trig_system([9], g).values[0]
    with pytest.raises(InputError, match="degree"):
        fourier_maximal(p, 4)
    with pytest.raises(ResolutionError):
        fourier_maximal(p, 40)


@pytest.mark.parametrize("kind", ["maxmaxmax", "decreasing", "littlewood"])
def test_corollaries_hold(kind):
    rep = corollary_report(kind, n=8)
    assert rep.holds
    assert rep.c_empirical <= rep.c_required
    assert rep.lhs > 0 and rep.product > 0


def test_corollary_decreasing_validates_sequence():
    with pytest.raises(InputError, match="non-increasing"):
        corollary_report("decreasing", a=[1, 2, 3])
    with pytest.raises(InputError, match="positive"):
        corollary_report("decreasing", a=[1, -1])


def test_corollary_unknown_kind():
    with pytest.raises(InputError):
        corollary_report("nope", n=3)


def test_maximal_lemma_ratio_recorded():
    rep = corollary_report("maximal-lemma", n=32)
    assert rep.c_required is None
    assert 0 < rep.c_empirical < 1
    assert rep.n == 65
