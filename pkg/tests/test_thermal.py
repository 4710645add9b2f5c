import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from colexlab import z2
from colexlab.code import Syndrome, steane_code, toric_code
from colexlab.thermal import (
    EXACT_LIMIT,
    MetropolisSampler,
    ThermalModel,
    anneal_init,
    count_critical,
    decay_bound,
    depolarize_overlap,
    depolarize_overlap_exact,
    energy,
    energy_full,
    estimate_p_crit,
    gibbs_exact,
    gibbs_weights,
    sample_nodes,
    sample_syndromes,
)

STEANE = steane_code()
NZ = STEANE.logical_z[0]


def test_energy_examples():
    m = ThermalModel(STEANE, 1.0)
    assert energy(m, Syndrome("Z", [0, 0, 0])) == -6
    assert energy(m, Syndrome("Z", [1, 0, 0])) == -4


def test_energy_uses_dependencies():
    code = toric_code(2, 1, 2)
    m = ThermalModel(code, 1.0)
    g = len(code.basis_of("Z"))
    for i in range(g):
        b = Syndrome("Z", np.eye(g, dtype=np.uint8)[i])
        nodes = code.expand(b)
        # direct eigenvalues on an error with that syndrome
        e = z2.solve(code.checks("Z"), nodes)
        direct = code.full_syndrome("Z", e)
        assert np.array_equal(nodes, direct)
        assert energy(m, b) == energy_full(m, "Z", direct) - float(m.t_x.sum())
    assert energy(m, Syndrome("Z", np.zeros(g, np.uint8))) == -float(code.hx.rows + code.hz.rows)


def test_couplings_validated():
    with pytest.raises(ValueError):
        ThermalModel(STEANE, 1.0, t_z=[1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        ThermalModel(STEANE, -1.0)


def test_gibbs_exact_examples():
    assert gibbs_exact(ThermalModel(STEANE, 20.0), NZ) < 1e-6
    assert gibbs_exact(ThermalModel(STEANE, 0.0), NZ) == pytest.approx(count_critical(STEANE, NZ) / 8)
    assert count_critical(STEANE, NZ) == 7
    grid = [gibbs_exact(ThermalModel(STEANE, b), NZ) for b in np.arange(0, 5.01, 0.5)]
    assert all(b <= a for a, b in zip(grid, grid[1:]))


def test_gibbs_exact_regression_values():
    assert gibbs_exact(ThermalModel(STEANE, 1.0), NZ) == pytest.approx(0.3166745506554539, rel=1e-12)
    assert gibbs_exact(ThermalModel(STEANE, 2.0), NZ) == pytest.approx(0.05299393724622279, rel=1e-12)


def test_exact_limit():
    assert EXACT_LIMIT == 20
    with pytest.raises(ValueError):
        gibbs_exact(ThermalModel(toric_code(2, 1, 5), 1.0), toric_code(2, 1, 5).logical_z[0])


def test_uniform_at_infinite_temperature():
    code = toric_code(2, 1, 3)
    nodes = sample_nodes(ThermalModel(code, 0.0), 4000, burn_in=50, seed=2)
    freq = nodes.mean(axis=0)
    se = math.sqrt(0.25 / 4000) * 3  # sweeps are close to independent at beta = 0
    assert np.all(np.abs(freq - 0.5) < 3 * se)


def test_independent_bits_bernoulli():
    beta = 0.7
    nodes = sample_nodes(ThermalModel(STEANE, beta), 20000, burn_in=100, seed=4)
    q = math.exp(-2 * beta) / (1 + math.exp(-2 * beta))
    se = math.sqrt(q * (1 - q) / 20000)
    # Steane generators are independent, so the bits are i.i.d.
    assert np.all(np.abs(nodes.mean(axis=0) - q) < 5 * se)


def test_syndrome_distribution_matches_exact():
    m = ThermalModel(STEANE, 1.0)
    bits, _, p = gibbs_weights(m, "Z")
    n = 20000
    counts = np.zeros(len(p))
    for s in sample_syndromes(m, n, burn_in=100, seed=9):
        counts[int(sum(int(v) << i for i, v in enumerate(s.bits)))] += 1
    expected = n * p
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < 24.3  # 99.9% quantile with 7 degrees of freedom


def test_sampler_audit_and_detailed_balance():
    m = ThermalModel(toric_code(2, 1, 3), 0.8)
    s = MetropolisSampler(m, "Z", seed=1)
    s.run(500)
    s.audit()
    assert np.array_equal(s.nodes, z2.matmul(s.H, s.e))
    # two chains differing by one flip: acceptance ratio equals exp(-beta dE)
    e = np.zeros(m.code.n, np.uint8)
    nodes = m.code.full_syndrome("Z", e)
    e2 = e.copy()
    e2[0] = 1
    nodes2 = m.code.full_syndrome("Z", e2)
    dE = energy_full(m, "Z", nodes2) - energy_full(m, "Z", nodes)
    fwd, back = min(1, math.exp(-m.beta * dE)), min(1, math.exp(m.beta * dE))
    assert fwd / back == pytest.approx(math.exp(-m.beta * dE))


def test_sampler_reproducible():
    m = ThermalModel(toric_code(2, 1, 3), 1.0)
    a = sample_nodes(m, 300, burn_in=10, seed=3)
    b = sample_nodes(m, 300, burn_in=10, seed=3)
    assert np.array_equal(a, b)


def test_estimate_matches_exact():
    m = ThermalModel(STEANE, 1.0)
    r = estimate_p_crit(m, NZ, 20000, seed=1)
    assert abs(r.estimate - gibbs_exact(m, NZ)) < 3 * r.stderr
    assert r.samples == 20000 and r.seed == 1


@settings(max_examples=10)
@given(st.integers(0, 2**31 - 1), st.integers(1, 3))
def test_estimate_seed_and_thread_reproducible(seed, threads):
    m = ThermalModel(toric_code(2, 1, 3), 1.0)
    a = estimate_p_crit(m, m.code.logical_z[0], 300, burn_in=20, seed=seed, chains=3, threads=1)
    b = estimate_p_crit(m, m.code.logical_z[0], 300, burn_in=20, seed=seed, chains=3, threads=threads)
    assert a == b


def test_decay_bound():
    m = ThermalModel(STEANE, 2.0)
    db = decay_bound(m, NZ, 1.0)
    assert db.middle == pytest.approx(10.1748, abs=1e-4)
    assert db.p_crit == pytest.approx(gibbs_exact(m, NZ))
    assert db.middle <= db.provable
    assert db.provable == pytest.approx(48 * 7 * db.p_crit)
    assert db.outer == pytest.approx(16 * 7 * db.p_crit)
    frozen = decay_bound(ThermalModel(STEANE, 20.0), NZ, 1.0, exact=False, steps=200)
    assert frozen.p_crit == 0 and frozen.middle == 0 and frozen.outer == 0


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 3.0])
def test_decay_middle_below_provable(beta):
    db = decay_bound(ThermalModel(STEANE, beta), NZ, 0.3)
    assert db.middle <= db.provable


def test_depolarize_overlap():
    m = ThermalModel(STEANE, 2.0)
    assert depolarize_overlap(m, NZ, 0.0, 500, seed=1).estimate == 1.0
    assert depolarize_overlap_exact(m, NZ, 0.0) == 1.0
    r = depolarize_overlap(m, NZ, 0.01, 20000, seed=2)
    assert abs(r.estimate - depolarize_overlap_exact(m, NZ, 0.01)) < 3 * r.stderr
    with pytest.raises(ValueError):
        depolarize_overlap(m, NZ, 0.5, 10)


def test_depolarize_overlap_trend():
    m = ThermalModel(STEANE, 2.0)
    exact = [depolarize_overlap_exact(m, NZ, p) for p in (0.0, 0.01, 0.05, 0.1, 0.2, 0.3)]
    assert all(b <= a for a, b in zip(exact, exact[1:]))
    mc = [depolarize_overlap(m, NZ, p, 4000, seed=5).estimate for p in (0.0, 0.05, 0.2)]
    assert mc[0] >= mc[1] >= mc[2]


def test_anneal_frozen_chain():
    r = anneal_init(2, 2, 4, 10.0, sweeps=50, chains=10, burn_in=10)
    assert r.fraction == 1.0 and r.failures == 0


def test_anneal_trend():
    hot = anneal_init(2, 2, 8, 0.1, sweeps=100, chains=20, burn_in=50)
    cold = anneal_init(2, 2, 8, 1.0, sweeps=100, chains=20, burn_in=50)
    assert hot.fraction < cold.fraction


def test_anneal_validation():
    with pytest.raises(ValueError):
        anneal_init(2, 0, 4, 1.0)
