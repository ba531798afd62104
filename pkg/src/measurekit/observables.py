"""Generalized observables as column-stochastic Markov kernels.

A kernel ``K`` has shape ``(|Omega|, |Theta|)``; ``K[w, t]`` is the probability
of the atom ``{w}`` when the system is described by the point ``t``.  The value
on a larger event is always recovered by summing atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import tolerance
from .errors import (
    InvalidKernel,
    InvalidMap,
    NotBijective,
    NotProductSpace,
    OracleNotAffine,
    OracleNotNormalized,
    SpaceMismatch,
)
from .measure_core import (
    Event,
    FiniteSpace,
    InformationState,
    _frozen,
    dirac,
    mix,
    product_space,
    same_space,
)


def check_stochastic(
    kernel: np.ndarray, axis: int = 0, renormalize: bool = False, name: str = "kernel"
) -> np.ndarray:
    """Validate entries in [0, 1] and unit sums along ``axis``.

    Returns a cleaned copy (tiny negatives clamped).  With ``renormalize`` the
    sums are rescaled to one instead of being rejected.
    """
    k = np.array(kernel, dtype=float)
    tol = tolerance.TOL
    if not np.all(np.isfinite(k)):
        raise InvalidKernel(f"{name} has non-finite entries")
    if np.any(k < -tol) or (not renormalize and np.any(k > 1 + tol)):
        raise InvalidKernel(f"{name} has entries outside [0, 1]")
    k = np.clip(k, 0.0, None)
    sums = k.sum(axis=axis, keepdims=True)
    if renormalize:
        if np.any(sums <= 0):
            raise InvalidKernel(f"{name} has a column with zero mass")
        return k / sums
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    if bad.size:
        position = tuple(int(i) for i in bad[0])
        column = position[1] if k.ndim == 2 else position[-1]
        total = float(sums[position])
        raise InvalidKernel(f"{name}: column {column} sums to {total:.12g}, expected 1")
    return np.clip(k, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class GeneralizedObservable:
    """Markov kernel from an information space to an outcome space."""

    outcome_space: FiniteSpace
    info_space: FiniteSpace
    kernel: np.ndarray
    renormalize: bool = False

    def __post_init__(self) -> None:
        k = np.asarray(self.kernel, dtype=float)
        expected = (self.outcome_space.size, self.info_space.size)
        if k.shape != expected:
            raise InvalidKernel(f"kernel shape {k.shape} does not match spaces {expected}")
        k = check_stochastic(k, axis=0, renormalize=self.renormalize)
        object.__setattr__(self, "kernel", _frozen(k))

    def column(self, theta: int) -> np.ndarray:
        return self.kernel[:, self.info_space.check_index(theta)]

    def allclose(self, other: "GeneralizedObservable", atol: float | None = None) -> bool:
        atol = tolerance.TOL if atol is None else atol
        return (
            self.outcome_space == other.outcome_space
            and self.info_space == other.info_space
            and bool(np.allclose(self.kernel, other.kernel, rtol=0, atol=atol))
        )


def value(obs: GeneralizedObservable, event: Event) -> np.ndarray:
    """The function ``theta -> Phi(event; theta)``."""
    same_space(obs.outcome_space, event.space, "outcome space")
    return np.clip(obs.kernel[event.mask].sum(axis=0), 0.0, 1.0)


def outcome_distribution(obs: GeneralizedObservable, st: InformationState) -> InformationState:
    """Outcome probabilities ``p[w] = sum_t K[w, t] pi[t]``."""
    same_space(obs.info_space, st.space, "information space")
    p = obs.kernel @ st.probabilities
    return InformationState(obs.outcome_space, p)


@dataclass(frozen=True)
class ExperimentOracle:
    """Black-box experiment: ``probability(event, state)`` gives the outcome law."""

    outcome_space: FiniteSpace
    info_space: FiniteSpace
    probability: Callable[[Event, InformationState], float]

    def __call__(self, event: Event, st: InformationState) -> float:
        return float(self.probability(event, st))

    def check_probability_measure(self, st: InformationState, atol: float = 1e-9) -> bool:
        atoms = [self(Event.atom(self.outcome_space, w), st) for w in range(self.outcome_space.size)]
        whole = self(Event.full(self.outcome_space), st)
        return (
            min(atoms) >= -atol
            and abs(sum(atoms) - 1.0) <= atol
            and abs(whole - 1.0) <= atol
        )


def kernel_oracle(obs: GeneralizedObservable) -> ExperimentOracle:
    """Oracle backed by an exact kernel."""

    def probability(event: Event, st: InformationState) -> float:
        return float(np.dot(value(obs, event), st.probabilities))

    return ExperimentOracle(obs.outcome_space, obs.info_space, probability)


def observable_from_experiment(
    oracle: ExperimentOracle,
    *,
    n_checks: int = 20,
    affinity_tol: float = 1e-9,
    normalization_tol: float = 1e-9,
    renormalize: bool = False,
    seed: int = 0,
) -> GeneralizedObservable:
    """Build the kernel by probing the oracle with Dirac states.

    ``K[w, t] = oracle({w}, delta_t)``.  The oracle is then checked for affinity
    on ``n_checks`` random two-state mixtures.  Oracles estimated from samples
    need ``renormalize=True`` and an ``affinity_tol`` matched to their noise;
    otherwise column sums must hit 1 within the library tolerance.
    """
    omega, theta = oracle.outcome_space, oracle.info_space
    k = np.empty((omega.size, theta.size))
    atoms = [Event.atom(omega, w) for w in range(omega.size)]
    for t in range(theta.size):
        delta = dirac(theta, t)
        k[:, t] = [oracle(atom, delta) for atom in atoms]
    sums = k.sum(axis=0)
    worst = int(np.argmax(np.abs(sums - 1.0)))
    allowed = normalization_tol if renormalize else tolerance.TOL
    if np.any(k < -allowed) or abs(sums[worst] - 1.0) > allowed:
        raise OracleNotNormalized(
            f"oracle column {worst} sums to {sums[worst]!r} on Dirac state {theta.labels[worst]!r}"
        )
    obs = GeneralizedObservable(omega, theta, np.clip(k, 0.0, None), renormalize=renormalize)

    rng = np.random.default_rng(seed)
    for _ in range(n_checks):
        p1 = InformationState(theta, rng.dirichlet(np.ones(theta.size)))
        p2 = InformationState(theta, rng.dirichlet(np.ones(theta.size)))
        alpha = float(rng.uniform())
        mixed = mix([p1, p2], [alpha, 1.0 - alpha])
        for atom in atoms:
            got = oracle(atom, mixed)
            want = alpha * oracle(atom, p1) + (1.0 - alpha) * oracle(atom, p2)
            if abs(got - want) > affinity_tol:
                raise OracleNotAffine(
                    f"oracle violates affinity on outcome {omega.labels[atom.indices[0]]!r}: "
                    f"|{got!r} - {want!r}| > {affinity_tol}"
                )
    return obs


def image_observable(
    space_in: FiniteSpace,
    space_out: FiniteSpace,
    f: Sequence[int] | Mapping[str, str] | Callable[[int], int],
) -> GeneralizedObservable:
    """Deterministic kernel of a point map ``f: Theta -> Omega``.

    ``f`` may be an index sequence, a label-to-label mapping or a callable on
    indices.
    """
    targets = _resolve_map(space_in, space_out, f)
    k = np.zeros((space_out.size, space_in.size))
    k[targets, np.arange(space_in.size)] = 1.0
    return GeneralizedObservable(space_out, space_in, k)


def _resolve_map(space_in: FiniteSpace, space_out: FiniteSpace, f) -> list[int]:
    if isinstance(f, Mapping):
        try:
            pairs = [f[label] for label in space_in.labels]
        except KeyError as exc:
            raise InvalidMap(f"map is not defined on point {exc.args[0]!r}") from None
        targets = []
        for label in pairs:
            if label not in space_out.labels:
                raise InvalidMap(f"{label!r} is not a point of the target space")
            targets.append(space_out.labels.index(label))
        return targets
    if callable(f):
        raw = [f(i) for i in range(space_in.size)]
    else:
        raw = list(f)
        if len(raw) != space_in.size:
            raise InvalidMap(f"map has {len(raw)} values for {space_in.size} points")
    targets = []
    for t in raw:
        if not isinstance(t, (int, np.integer)) or not 0 <= int(t) < space_out.size:
            raise InvalidMap(f"{t!r} is not a point index of the target space")
        targets.append(int(t))
    return targets


def is_image(obs: GeneralizedObservable) -> tuple[int, ...] | None:
    """Return the point map if every column is a 0/1 indicator, else ``None``."""
    tol = tolerance.TOL
    k = obs.kernel
    top = np.argmax(k, axis=0)
    cols = np.arange(k.shape[1])
    if np.any(k[top, cols] < 1.0 - tol):
        return None
    rest = k.copy()
    rest[top, cols] = 0.0
    if np.any(rest > tol):
        return None
    return tuple(int(w) for w in top)


def trivial_observable(info_space: FiniteSpace, nu: InformationState) -> GeneralizedObservable:
    """Observable whose every column is ``nu``: no information about theta."""
    k = np.repeat(nu.probabilities[:, None], info_space.size, axis=1)
    return GeneralizedObservable(nu.space, info_space, k)


def is_trivial(obs: GeneralizedObservable) -> bool:
    k = obs.kernel
    return bool(np.all(np.abs(k - k[:, :1]) <= tolerance.TOL))


def product(obs1: GeneralizedObservable, obs2: GeneralizedObservable) -> GeneralizedObservable:
    """Joint observable with ``K[(w1, w2), t] = K1[w1, t] K2[w2, t]``."""
    same_space(obs1.info_space, obs2.info_space, "information space")
    k = np.einsum("at,bt->abt", obs1.kernel, obs2.kernel)
    out = product_space(obs1.outcome_space, obs2.outcome_space)
    return GeneralizedObservable(out, obs1.info_space, k.reshape(out.size, -1))


def marginal(obs: GeneralizedObservable, which: int) -> GeneralizedObservable:
    """Marginal on factor ``which`` (1-based) of a product outcome space."""
    factors = obs.outcome_space.factors
    if factors is None:
        raise NotProductSpace("outcome space has no declared factorization")
    if not 1 <= which <= len(factors):
        raise NotProductSpace(f"factor {which} does not exist (have {len(factors)})")
    k = obs.kernel.reshape(*obs.outcome_space.shape, obs.info_space.size)
    drop = tuple(i for i in range(len(factors)) if i != which - 1)
    return GeneralizedObservable(factors[which - 1], obs.info_space, k.sum(axis=drop))


def induce_state(s_obs: GeneralizedObservable, st: InformationState) -> InformationState:
    """State on ``Theta`` induced through a kernel ``Theta' -> Theta``."""
    return outcome_distribution(s_obs, st)


def pull_back(obs: GeneralizedObservable, s_obs: GeneralizedObservable) -> GeneralizedObservable:
    """Compose kernels: ``K'[w, t'] = sum_t K[w, t] S[t, t']``."""
    same_space(obs.info_space, s_obs.outcome_space, "intermediate space")
    return GeneralizedObservable(obs.outcome_space, s_obs.info_space, obs.kernel @ s_obs.kernel)


def push_forward(
    obs: GeneralizedObservable,
    new_info_space: FiniteSpace,
    f: Sequence[int] | Mapping[str, str] | Callable[[int], int],
) -> GeneralizedObservable:
    """Re-express ``obs`` on an isomorphic space via a bijection ``f: Theta' -> Theta``."""
    try:
        targets = _resolve_map(new_info_space, obs.info_space, f)
    except InvalidMap as exc:
        raise NotBijective(str(exc)) from None
    if new_info_space.size != obs.info_space.size or len(set(targets)) != len(targets):
        raise NotBijective("point map is not a bijection")
    return GeneralizedObservable(obs.outcome_space, new_info_space, obs.kernel[:, targets])


def transport_state(
    st: InformationState,
    new_space: FiniteSpace,
    f: Sequence[int] | Mapping[str, str] | Callable[[int], int],
) -> InformationState:
    """State on ``Theta`` with ``pi(F) = pi'(f^-1(F))`` for ``st`` on ``Theta'``."""
    targets = _resolve_map(st.space, new_space, f)
    p = np.zeros(new_space.size)
    np.add.at(p, targets, st.probabilities)
    return InformationState(new_space, p)


def kernels_equal(a: GeneralizedObservable, b: GeneralizedObservable) -> bool:
    if a.outcome_space != b.outcome_space or a.info_space != b.info_space:
        raise SpaceMismatch("observables live on different spaces")
    return bool(np.array_equal(a.kernel, b.kernel))
