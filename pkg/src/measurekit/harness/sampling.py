"""Seeded Monte Carlo trial sampling.

Trials are split into fixed-size blocks.  Block ``b`` draws its uniforms from
``numpy.random.Philox`` keyed by ``SeedSequence([seed, b])``, and every stage of
a trial maps one uniform to a point by inverse-CDF search over the stored
point order.  Block layout does not depend on the worker count, so merged
counts are identical for any number of workers.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

from ..instruments import ExtendedObservable
from ..measure_core import Event, InformationState, same_space
from ..observables import ExperimentOracle, GeneralizedObservable, outcome_distribution

DEFAULT_BLOCK = 1 << 16


@dataclass(frozen=True)
class SamplingConfig:
    trials: int = 1_000_000
    seed: int = 0
    workers: int = 1
    block_size: int = DEFAULT_BLOCK
    sigma_bound: float = 4.0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.workers < 1 or self.block_size < 1:
            raise ValueError("workers and block_size must be positive")


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def inverse_cdf(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Index of the first cumulative value strictly above ``u``."""
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, cdf.size - 1)


def inverse_cdf_columns(cdfs: np.ndarray, cols: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Per-trial inverse CDF where trial ``i`` uses column ``cols[i]`` of ``cdfs``."""
    idx = np.empty(u.shape, dtype=np.int64)
    for c in np.unique(cols):
        sel = cols == c
        idx[sel] = np.searchsorted(cdfs[:, c], u[sel], side="right")
    return np.minimum(idx, cdfs.shape[0] - 1)


class TrialRecord(NamedTuple):
    trial: int
    theta_in: int
    omega: int
    theta_out: int | None


@dataclass(frozen=True, eq=False)
class TrialRecords:
    """Column-oriented trial log; ``theta_out`` is absent for destructive trials."""

    theta_in: np.ndarray
    omega: np.ndarray
    theta_out: np.ndarray | None = None

    def __len__(self) -> int:
        return self.theta_in.size

    def __iter__(self) -> Iterator[TrialRecord]:
        for i in range(len(self)):
            out = None if self.theta_out is None else int(self.theta_out[i])
            yield TrialRecord(i, int(self.theta_in[i]), int(self.omega[i]), out)


def _blocks(n: int, block_size: int) -> list[tuple[int, int]]:
    return [(b, min(block_size, n - b * block_size)) for b in range(math.ceil(n / block_size))]


def _run_blocks(
    fn: Callable[[int, int], tuple[np.ndarray, ...]], cfg: SamplingConfig
) -> list[tuple[np.ndarray, ...]]:
    blocks = _blocks(cfg.trials, cfg.block_size)
    if cfg.workers == 1:
        return [fn(b, m) for b, m in blocks]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(lambda bm: fn(*bm), blocks))


def _cdf(p: np.ndarray) -> np.ndarray:
    """Cumulative sums down axis 0, pinned to exactly 1 from the last positive entry on."""
    p = np.asarray(p, dtype=float)
    c = np.cumsum(p, axis=0)
    c = c / c[-1]
    # no uniform in [0, 1) may land on a trailing zero-probability point
    last = p.shape[0] - 1 - np.argmax(p[::-1] > 0, axis=0)
    rows = np.arange(p.shape[0]).reshape((-1,) + (1,) * (p.ndim - 1))
    c[rows >= last] = 1.0
    return c


@dataclass(frozen=True, eq=False)
class ExperimentSample:
    counts: np.ndarray
    trials: int
    records: TrialRecords | None

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.trials


def _concat(parts: Sequence[tuple[np.ndarray, ...]], i: int) -> np.ndarray:
    return np.concatenate([p[i] for p in parts])


def sample_experiment(
    obs: GeneralizedObservable,
    st: InformationState,
    cfg: SamplingConfig,
    keep_records: bool = True,
) -> ExperimentSample:
    """Two-stage sampling: ``theta ~ pi``, then ``omega ~ K[:, theta]``."""
    same_space(obs.info_space, st.space, "information space")
    theta_cdf = _cdf(st.probabilities)
    kernel_cdf = _cdf(obs.kernel)

    def run(block: int, m: int) -> tuple[np.ndarray, ...]:
        u = block_rng(cfg.seed, block).random((m, 2))
        theta = inverse_cdf(theta_cdf, u[:, 0])
        omega = inverse_cdf_columns(kernel_cdf, theta, u[:, 1])
        return theta.astype(np.int32), omega.astype(np.int32)

    parts = _run_blocks(run, cfg)
    theta, omega = _concat(parts, 0), _concat(parts, 1)
    counts = np.bincount(omega, minlength=obs.outcome_space.size)
    records = TrialRecords(theta, omega) if keep_records else None
    return ExperimentSample(counts, cfg.trials, records)


def sample_collapsed(
    obs: GeneralizedObservable, st: InformationState, cfg: SamplingConfig
) -> ExperimentSample:
    """Sample outcomes directly from the outcome distribution."""
    cdf = _cdf(outcome_distribution(obs, st).probabilities)

    def run(block: int, m: int) -> tuple[np.ndarray, ...]:
        u = block_rng(cfg.seed, block).random(m)
        return (inverse_cdf(cdf, u).astype(np.int32),)

    omega = _concat(_run_blocks(run, cfg), 0)
    return ExperimentSample(np.bincount(omega, minlength=obs.outcome_space.size), cfg.trials, None)


@dataclass(frozen=True, eq=False)
class InstrumentSample:
    joint_counts: np.ndarray  # (|Omega|, |Theta_out|)
    trials: int
    records: TrialRecords | None

    @property
    def outcome_counts(self) -> np.ndarray:
        return self.joint_counts.sum(axis=1)

    def conditional_posterior(self, omega: int) -> np.ndarray | None:
        """Empirical posterior frequencies given outcome ``omega``; None if never seen."""
        row = self.joint_counts[omega]
        total = row.sum()
        return None if total == 0 else row / total


def sample_instrument(
    y: ExtendedObservable,
    state_in: InformationState,
    cfg: SamplingConfig,
    keep_records: bool = True,
) -> InstrumentSample:
    """Per trial: ``theta_in ~ pi``, then the compound outcome ``(omega, theta_out)``."""
    same_space(y.in_info_space, state_in.space, "input information space")
    n_out = y.out_info_space.size
    theta_cdf = _cdf(state_in.probabilities)
    joint_cdf = _cdf(y.kernel.reshape(-1, y.in_info_space.size))

    def run(block: int, m: int) -> tuple[np.ndarray, ...]:
        u = block_rng(cfg.seed, block).random((m, 2))
        theta = inverse_cdf(theta_cdf, u[:, 0])
        compound = inverse_cdf_columns(joint_cdf, theta, u[:, 1])
        return (
            theta.astype(np.int32),
            (compound // n_out).astype(np.int32),
            (compound % n_out).astype(np.int32),
        )

    parts = _run_blocks(run, cfg)
    theta, omega, out = (_concat(parts, i) for i in range(3))
    joint = np.bincount(omega * n_out + out, minlength=y.outcome_space.size * n_out)
    records = TrialRecords(theta, omega, out) if keep_records else None
    return InstrumentSample(joint.reshape(y.outcome_space.size, n_out), cfg.trials, records)


@dataclass(frozen=True, eq=False)
class SequentialSample:
    outcome_counts: np.ndarray  # shape (|Omega_1|, ..., |Omega_k|)
    final_counts: np.ndarray  # counts over the last posterior space
    trials: int


def sample_sequential(
    ys: Sequence[ExtendedObservable], state_in: InformationState, cfg: SamplingConfig
) -> SequentialSample:
    """Run the experiments one after another, feeding each sampled posterior point on."""
    if not ys:
        raise ValueError("need at least one extended observable")
    same_space(ys[0].in_info_space, state_in.space, "input information space")
    for a, b in zip(ys, ys[1:]):
        same_space(a.out_info_space, b.in_info_space, "intermediate information space")
    theta_cdf = _cdf(state_in.probabilities)
    cdfs = [_cdf(y.kernel.reshape(-1, y.in_info_space.size)) for y in ys]
    shape = tuple(y.outcome_space.size for y in ys)
    n_final = ys[-1].out_info_space.size

    def run(block: int, m: int) -> tuple[np.ndarray, ...]:
        u = block_rng(cfg.seed, block).random((m, len(ys) + 1))
        theta = inverse_cdf(theta_cdf, u[:, 0])
        flat = np.zeros(m, dtype=np.int64)
        for stage, (y, cdf) in enumerate(zip(ys, cdfs)):
            n_out = y.out_info_space.size
            compound = inverse_cdf_columns(cdf, theta, u[:, stage + 1])
            flat = flat * y.outcome_space.size + compound // n_out
            theta = compound % n_out
        return flat, theta

    parts = _run_blocks(run, cfg)
    flat, final = _concat(parts, 0), _concat(parts, 1)
    counts = np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)
    return SequentialSample(counts, np.bincount(final, minlength=n_final), cfg.trials)


@dataclass(frozen=True)
class Comparison:
    label: str
    analytic: float
    empirical: float
    n: int
    z: float
    passed: bool


def binomial_z(analytic: float, empirical: float, n: int) -> float:
    sigma = math.sqrt(max(analytic * (1.0 - analytic), 0.0) / n)
    diff = empirical - analytic
    if sigma == 0.0:
        return 0.0 if abs(diff) < 1e-15 else math.inf
    return diff / sigma


def compare(
    labels: Sequence[str],
    analytic: Sequence[float],
    counts: Sequence[int],
    n: int,
    sigma_bound: float = 4.0,
) -> list[Comparison]:
    """Per-outcome z-scores of empirical frequencies against analytic probabilities."""
    out = []
    for label, p, c in zip(labels, analytic, counts):
        freq = float(c) / n
        z = binomial_z(float(p), freq, n)
        out.append(Comparison(label, float(p), freq, n, z, abs(z) <= sigma_bound))
    return out


def monte_carlo_oracle(obs: GeneralizedObservable, cfg: SamplingConfig) -> ExperimentOracle:
    """Experiment oracle answering with empirical frequencies of sampled trials.

    Every query for the same state reuses one seeded sample, so the answers for
    a state form a probability measure.
    """
    cache: dict[bytes, np.ndarray] = {}
    lock = threading.Lock()

    def probability(event: Event, st: InformationState) -> float:
        key = st.probabilities.tobytes()
        with lock:
            freq = cache.get(key)
            if freq is None:
                freq = sample_experiment(obs, st, cfg, keep_records=False).frequencies
                cache[key] = freq
        same_space(obs.outcome_space, event.space, "outcome space")
        return float(freq[event.mask].sum())

    return ExperimentOracle(obs.outcome_space, obs.info_space, probability)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
