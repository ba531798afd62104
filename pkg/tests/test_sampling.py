import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measurekit import (
    FiniteSpace,
    GeneralizedObservable,
    classical_readout,
    dirac,
    image_observable,
    observable_from_experiment,
    outcome_distribution,
    product_extended,
    state,
    trivial_observable,
)
from measurekit.harness.sampling import (
    SamplingConfig,
    binomial_z,
    compare,
    inverse_cdf,
    monte_carlo_oracle,
    sample_collapsed,
    sample_experiment,
    sample_instrument,
    sample_sequential,
    total_variation,
)
from measurekit.instruments import compose, outcome_marginal, system_marginal
from measurekit.measure_core import uniform

from conftest import labels, random_extended, random_observable, random_state, seeds

THETA = FiniteSpace(("t1", "t2"))
OMEGA = FiniteSpace(("w1", "w2"))
K22 = GeneralizedObservable(OMEGA, THETA, [[0.7, 0.2], [0.3, 0.8]])
MILLION = SamplingConfig(trials=1_000_000, seed=11)


def within(p, counts, n, bound=4.0):
    return all(abs(z) <= bound for z in (binomial_z(pi, c / n, n) for pi, c in zip(p, counts)))


def test_inverse_cdf_edges():
    cdf = np.array([0.25, 0.25, 1.0])
    assert inverse_cdf(cdf, np.array([0.0, 0.2499, 0.25, 0.9999])).tolist() == [0, 0, 2, 2]


def test_zero_weight_points_never_drawn():
    sp = labels("t", 4)
    pi = state(sp, [0.5, 0.0, 0.5, 0.0])
    obs = image_observable(sp, sp, [0, 1, 2, 3])
    counts = sample_experiment(obs, pi, SamplingConfig(trials=50_000, seed=3)).counts
    assert counts[1] == 0 and counts[3] == 0


def test_worked_frequency():
    sample = sample_experiment(K22, uniform(THETA), MILLION)
    n = MILLION.trials
    assert abs(sample.frequencies[0] - 0.45) <= 4 * math.sqrt(0.45 * 0.55 / n)
    assert len(sample.records) == n


def test_trivial_and_identity():
    nu = state(labels("w", 3), [0.2, 0.3, 0.5])
    triv = trivial_observable(labels("t", 4), nu)
    s = sample_experiment(triv, random_state(np.random.default_rng(1), triv.info_space), MILLION)
    assert within(nu.probabilities, s.counts, MILLION.trials)

    pi = state(THETA, [0.35, 0.65])
    s = sample_experiment(image_observable(THETA, THETA, [0, 1]), pi, MILLION)
    assert within(pi.probabilities, s.counts, MILLION.trials)


def test_records_are_consistent():
    obs = image_observable(labels("t", 3), OMEGA, [0, 1, 1])
    s = sample_experiment(obs, uniform(obs.info_space), SamplingConfig(trials=1000, seed=2))
    for rec in s.records:
        assert rec.omega == [0, 1, 1][rec.theta_in]
        assert rec.theta_out is None


def test_worked_instrument_posterior(worked_extended):
    s = sample_instrument(worked_extended, uniform(THETA), MILLION)
    post = s.conditional_posterior(0)
    n1 = int(s.outcome_counts[0])
    assert abs(post[0] - 7 / 9) <= 4 * math.sqrt((7 / 9) * (2 / 9) / n1)


def test_readout_posterior_is_exact():
    sp = labels("t", 3)
    s = sample_instrument(classical_readout(sp), uniform(sp), SamplingConfig(trials=20_000, seed=9))
    for w in range(3):
        assert s.conditional_posterior(w).tolist() == np.eye(3)[w].tolist()
    for rec in s.records:
        assert rec.omega == rec.theta_in == rec.theta_out


def test_non_perturbing_signature(rng):
    m = random_observable(rng, 3, 2, theta=THETA)
    s_obs = random_observable(rng, 2, 2, omega=THETA, theta=THETA)
    y = product_extended(m, s_obs)
    s = sample_instrument(y, dirac(THETA, 1), MILLION)
    for w in range(3):
        n_w = int(s.outcome_counts[w])
        assert within(s_obs.column(1), s.joint_counts[w], n_w)


def test_conditional_posterior_unseen():
    y = classical_readout(THETA)
    s = sample_instrument(y, dirac(THETA, 0), SamplingConfig(trials=100, seed=0))
    assert s.conditional_posterior(1) is None


def test_sequential_matches_composition(rng):
    th = labels("t", 3)
    y1 = random_extended(rng, 2, 3, 3, out=th, inp=th)
    y2 = random_extended(rng, 3, 3, 3, omega=labels("v", 3), out=th, inp=th)
    pi = random_state(rng, th)
    s = sample_sequential([y1, y2], pi, MILLION)
    c = compose(y1, y2)
    joint = outcome_distribution(outcome_marginal(c), pi).probabilities
    assert s.outcome_counts.shape == (2, 3)
    assert within(joint, s.outcome_counts.reshape(-1), MILLION.trials)
    final = outcome_distribution(system_marginal(c), pi).probabilities
    assert within(final, s.final_counts, MILLION.trials)


def test_sequential_validation():
    with pytest.raises(ValueError):
        sample_sequential([], uniform(THETA), MILLION)


def test_worker_invariance(worked_extended):
    cfg1 = SamplingConfig(trials=300_001, seed=5, block_size=1 << 14)
    cfg4 = SamplingConfig(trials=300_001, seed=5, block_size=1 << 14, workers=4)
    a = sample_instrument(worked_extended, uniform(THETA), cfg1)
    b = sample_instrument(worked_extended, uniform(THETA), cfg4)
    assert np.array_equal(a.joint_counts, b.joint_counts)
    assert np.array_equal(a.records.omega, b.records.omega)
    ea = sample_experiment(K22, uniform(THETA), cfg1).counts
    eb = sample_experiment(K22, uniform(THETA), cfg4).counts
    assert np.array_equal(ea, eb)


def test_seed_changes_stream():
    a = sample_experiment(K22, uniform(THETA), SamplingConfig(trials=10_000, seed=1)).counts
    b = sample_experiment(K22, uniform(THETA), SamplingConfig(trials=10_000, seed=2)).counts
    assert not np.array_equal(a, b)


def test_config_validation():
    with pytest.raises(ValueError):
        SamplingConfig(trials=0)
    with pytest.raises(ValueError):
        SamplingConfig(workers=0)


def test_compare_and_z():
    assert binomial_z(0.0, 0.0, 10) == 0.0
    assert binomial_z(0.0, 0.1, 10) == math.inf
    out = compare(["a", "b"], [0.5, 0.5], [5150, 4850], 10_000)
    assert [round(c.z, 6) for c in out] == [3.0, -3.0]
    assert all(c.passed for c in out)
    assert not compare(["a"], [0.5], [5300], 10_000)[0].passed


def test_monte_carlo_oracle_representation():
    obs = random_observable(np.random.default_rng(8), 4, 4)
    cfg = SamplingConfig(trials=200_000, seed=4)
    est = observable_from_experiment(
        monte_carlo_oracle(obs, cfg), affinity_tol=0.02, renormalize=True
    )
    sigma = np.sqrt(obs.kernel * (1 - obs.kernel) / cfg.trials)
    assert np.all(np.abs(est.kernel - obs.kernel) <= 4 * sigma + 1e-15)


def test_two_oracles_same_class():
    obs = random_observable(np.random.default_rng(10), 3, 3)
    a = observable_from_experiment(
        monte_carlo_oracle(obs, SamplingConfig(trials=200_000, seed=1)), affinity_tol=0.02, renormalize=True
    )
    b = observable_from_experiment(
        monte_carlo_oracle(obs, SamplingConfig(trials=200_000, seed=2)), affinity_tol=0.02, renormalize=True
    )
    # different samplers, one underlying kernel
    bound = 8 * np.sqrt(obs.kernel * (1 - obs.kernel) / 200_000)
    assert np.all(np.abs(a.kernel - b.kernel) <= bound + 1e-15)


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(1, 8), st.integers(1, 8))
def test_two_stage_vs_collapsed(seed, n_out, n_in):
    rng = np.random.default_rng(seed)
    obs = random_observable(rng, n_out, n_in)
    pi = random_state(rng, obs.info_space)
    cfg = SamplingConfig(trials=100_000, seed=seed)
    a = sample_experiment(obs, pi, cfg, keep_records=False).frequencies
    b = sample_collapsed(obs, pi, SamplingConfig(trials=100_000, seed=seed + 1)).frequencies
    assert total_variation(a, b) <= 4 * math.sqrt(n_out / cfg.trials)
