import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from biorth.errors import DegenerateInputError, InputError, InternalConsistencyError
from biorth.grid import Grid, trig_system
from biorth.pairs import matrix_pair
from biorth.proof import (
    bessel_slack,
    chain_check,
    menshov_level,
    phase_witness,
    random_configuration,
    random_unitary,
    stopping_data,
)


def test_stopping_time_is_first_peak():
    g = Grid(8)
    F = trig_system([1, 2, 3], g)
    st_ = stopping_data(F)
    partial = np.cumsum(F.values, axis=0)
    mags = np.abs(partial)
    for x in range(8):
        first = int(np.argmax(mags[:, x] >= mags[:, x].max() * (1 - 1e-12))) + 1
        assert st_.stop[x] == first
    # ladder is non-increasing in k and each column of deltas has a single 1
    assert np.all(np.diff(st_.ladder, axis=0) <= 0)
    assert np.allclose(st_.deltas.sum(axis=0), 1.0)
    assert np.allclose(np.abs(st_.S_at_m), st_.M)


def test_phase_witness_identity(rng):
    S = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    S[3] = 0
    G = phase_witness(S)
    assert np.allclose(np.abs(G), 1)
    assert np.allclose(G * np.conj(S), np.abs(S))


@given(n=st.integers(1, 6), seed=st.integers(0, 10**6))
def test_bessel_slack_non_negative(n, seed):
    rng = np.random.default_rng(seed)
    g = Grid(32)
    F = trig_system(np.arange(n), g)
    pair = matrix_pair(rng.standard_normal((n, n)) + n * np.eye(n))
    P = rng.standard_normal((32, n)) + 1j * rng.standard_normal((32, n))
    assert bessel_slack(P, F, pair.W) >= -1e-9


@pytest.mark.parametrize("seed", range(5))
def test_chain_check_random_configurations(seed):
    cfg = random_configuration(3 + 5 * seed, 1024, seed)
    rep = chain_check(cfg.F, cfg.pair, cfg.G, cfg.stopping)
    assert rep.ok()
    assert rep.min_slack() >= -1e-9
    assert rep.abel_residual <= 1e-12
    assert rep.witness_identity_residual <= 1e-12
    d = rep.as_dict()
    assert d["ok"] is True and d["n"] == 3 + 5 * seed


def test_conclusion_is_the_inequality():
    # ||M||_1 <= sqrt(n) max||w|| max||sigma|| when G is the phase witness
    cfg = random_configuration(10, 1024, 42)
    rep = chain_check(cfg.F, cfg.pair, cfg.G, cfg.stopping)
    assert rep.conclusion_slack >= 0
    assert rep.gsf_slack >= 0


def test_chain_check_detects_broken_stopping_data():
    cfg = random_configuration(6, 256, 3)
    broken = replace(cfg.stopping, deltas=np.roll(cfg.stopping.deltas, 1, axis=0))
    with pytest.raises(InternalConsistencyError, match="summation by parts"):
        chain_check(cfg.F, cfg.pair, cfg.G, broken)


def test_chain_check_validates_input():
    cfg = random_configuration(4, 128, 0)
    with pytest.raises(InputError, match="\\|G\\| <= 1"):
        chain_check(cfg.F, cfg.pair, 2 * cfg.G)
    with pytest.raises(InputError):
        chain_check(cfg.F, cfg.pair, cfg.G[:-1])
    other = random_configuration(5, 128, 0)
    with pytest.raises(InputError):
        chain_check(cfg.F, other.pair, cfg.G)


def test_random_configuration_is_deterministic():
    a = random_configuration(8, 512, 9)
    b = random_configuration(8, 512, 9)
    assert np.array_equal(a.F.values, b.F.values)
    assert np.array_equal(a.pair.V, b.pair.V)


def test_random_unitary(rng):
    U = random_unitary(7, rng)
    assert np.allclose(U @ U.conj().T, np.eye(7), atol=1e-12)


def test_menshov_level_order_statistic():
    F = trig_system(np.arange(1, 9), Grid(1000))
    lvl = menshov_level(F)
    M = np.abs(np.cumsum(F.values, axis=0)).max(axis=0)
    assert lvl.t_star == pytest.approx(np.sort(M)[::-1][249], rel=1e-12)
    assert lvl.measure_at_t_star >= 0.25
    assert lvl.c0_empirical == pytest.approx(lvl.t_star / (math.sqrt(8) * math.log(8)))


def test_menshov_level_needs_two_functions():
    with pytest.raises(DegenerateInputError):
        menshov_level(trig_system([1], Grid(16)))
