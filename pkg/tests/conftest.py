import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from measurekit import (
    ExtendedObservable,
    FiniteSpace,
    GeneralizedObservable,
    InformationState,
)


def labels(prefix, n):
    return FiniteSpace(tuple(f"{prefix}{i}" for i in range(n)))


def random_kernel(rng, n_out, n_in, sparsity=0.0):
    k = rng.random((n_out, n_in))
    if sparsity:
        k[rng.random(k.shape) < sparsity] = 0.0
        k[rng.integers(n_out, size=n_in), np.arange(n_in)] += 0.1
    return k / k.sum(axis=0)


def random_observable(rng, n_out, n_in, omega=None, theta=None):
    omega = omega or labels("w", n_out)
    theta = theta or labels("t", n_in)
    return GeneralizedObservable(omega, theta, random_kernel(rng, n_out, n_in))


def random_state(rng, sp):
    return InformationState(sp, rng.dirichlet(np.ones(sp.size)))


def random_extended(rng, n_omega, n_out, n_in, omega=None, out=None, inp=None):
    omega = omega or labels("w", n_omega)
    out = out or labels("o", n_out)
    inp = inp or labels("t", n_in)
    k = random_kernel(rng, n_omega * n_out, n_in).reshape(n_omega, n_out, n_in)
    return ExtendedObservable(omega, out, inp, k)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
small = st.integers(min_value=1, max_value=6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def worked_extended():
    """2x2x2 instrument: outcome law [[0.7, 0.2], [0.3, 0.8]], system untouched."""
    theta = FiniteSpace(("t1", "t2"))
    omega = FiniteSpace(("w1", "w2"))
    k = np.zeros((2, 2, 2))
    m = np.array([[0.7, 0.2], [0.3, 0.8]])
    for w in range(2):
        for t in range(2):
            k[w, t, t] = m[w, t]
    return ExtendedObservable(omega, theta, theta, k)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SUMMARY", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
