"""Mean information states over information sets embedded in a vector space.

Each point of an :class:`EmbeddedSpace` carries a real payload vector and a
linear functional ``l`` that equals one on every payload.  The mean of a state
is the barycenter of the payloads.  An extended observable is *pre-linear* on
a frame when its statistical map (payload-weighted instrument) respects the
convex relations among the input payloads; then outcome probabilities and
posterior means depend on the input state only through its mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import nnls

from . import tolerance
from .errors import (
    BadRelation,
    InvalidEmbedding,
    NotPrelinear,
    SpaceMismatch,
    ZeroProbabilityEvent,
)
from .instruments import ExtendedObservable, instrument_map, posterior_state
from .measure_core import Event, FiniteSpace, InformationState, _frozen, same_space


@dataclass(frozen=True, eq=False)
class EmbeddedSpace:
    """Finite information space whose points are vectors of norm at most ``bound``."""

    base: FiniteSpace
    payloads: np.ndarray
    functional: np.ndarray
    bound: float

    def __post_init__(self) -> None:
        payloads = np.array(self.payloads, dtype=float)
        if payloads.ndim != 2 or payloads.shape[0] != self.base.size:
            raise InvalidEmbedding(
                f"need one payload row per point ({self.base.size}), got shape {payloads.shape}"
            )
        functional = np.array(self.functional, dtype=float).reshape(-1)
        if functional.shape != (payloads.shape[1],):
            raise InvalidEmbedding("functional length does not match payload dimension")
        norms = np.linalg.norm(payloads, axis=1)
        if np.any(norms > self.bound + tolerance.TOL):
            worst = int(np.argmax(norms))
            raise InvalidEmbedding(
                f"payload of {self.base.labels[worst]!r} has norm {norms[worst]!r} > {self.bound}"
            )
        levels = payloads @ functional
        if np.any(np.abs(levels - 1.0) > tolerance.TOL):
            worst = int(np.argmax(np.abs(levels - 1.0)))
            raise InvalidEmbedding(
                f"functional on payload of {self.base.labels[worst]!r} is {levels[worst]!r}, not 1"
            )
        object.__setattr__(self, "payloads", _frozen(payloads))
        object.__setattr__(self, "functional", _frozen(functional))

    @property
    def dim(self) -> int:
        return self.payloads.shape[1]

    def level(self, vector: np.ndarray) -> float:
        return float(np.asarray(vector) @ self.functional)


@dataclass(frozen=True, eq=False)
class MeanState:
    vector: np.ndarray
    provenance: InformationState | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "vector", _frozen(np.array(self.vector, dtype=float)))


@dataclass(frozen=True, eq=False)
class ConvexRelation:
    """Identity ``sum lhs[i] payload_i = sum rhs[j] payload_j`` between two mixtures.

    The usual case "target equals a mixture of other points" has ``lhs`` equal
    to the indicator of the target.
    """

    lhs: np.ndarray
    rhs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "lhs", _frozen(np.array(self.lhs, dtype=float)))
        object.__setattr__(self, "rhs", _frozen(np.array(self.rhs, dtype=float)))


def relation(
    sp: EmbeddedSpace, target: int | str, weights: Mapping[int | str, float] | Sequence[float]
) -> ConvexRelation:
    """Relation stating that point ``target`` is the given mixture of points."""
    base = sp.base
    t = base.index(target) if isinstance(target, str) else base.check_index(target)
    lhs = np.zeros(base.size)
    lhs[t] = 1.0
    return ConvexRelation(lhs, _weight_vector(base, weights))


def mixture_relation(
    sp: EmbeddedSpace,
    left: Mapping[int | str, float] | Sequence[float],
    right: Mapping[int | str, float] | Sequence[float],
) -> ConvexRelation:
    return ConvexRelation(_weight_vector(sp.base, left), _weight_vector(sp.base, right))


def _weight_vector(base: FiniteSpace, weights) -> np.ndarray:
    if isinstance(weights, Mapping):
        w = np.zeros(base.size)
        for key, c in weights.items():
            i = base.index(key) if isinstance(key, str) else base.check_index(key)
            w[i] += float(c)
        return w
    w = np.array(weights, dtype=float).reshape(-1)
    if w.shape != (base.size,):
        raise BadRelation(f"need {base.size} weights, got {w.size}")
    return w


def validate_relation(sp: EmbeddedSpace, rel: ConvexRelation) -> None:
    for side in (rel.lhs, rel.rhs):
        if side.shape != (sp.base.size,):
            raise BadRelation("relation weights do not match the space")
        if np.any(side < -tolerance.RELATION_TOL) or abs(side.sum() - 1.0) > tolerance.RELATION_TOL:
            raise BadRelation(f"relation weights {side.tolist()} are not convex")
    gap = np.abs((rel.lhs - rel.rhs) @ sp.payloads).max()
    if gap > tolerance.RELATION_TOL:
        raise BadRelation(f"payload identity fails by {gap!r}")


def mean_state(sp: EmbeddedSpace, st: InformationState) -> MeanState:
    """Barycenter ``sum_t pi[t] payload(t)``."""
    same_space(sp.base, st.space, "embedded base space")
    return MeanState(st.probabilities @ sp.payloads, provenance=st)


def statistical_map(
    y: ExtendedObservable, event: Event, in_space: EmbeddedSpace, out_space: EmbeddedSpace
) -> np.ndarray:
    """Rows ``v(t_in) = sum_{t_out} payload(t_out) Y(event x {t_out})(t_in)``.

    Returns an array of shape ``(|Theta_in|, dim_out)``.
    """
    same_space(y.in_info_space, in_space.base, "input embedding")
    same_space(y.out_info_space, out_space.base, "output embedding")
    return instrument_map(y, event).T @ out_space.payloads


def posterior_mean(
    y: ExtendedObservable,
    event: Event,
    state_in: InformationState,
    out_space: EmbeddedSpace,
) -> MeanState:
    """Mean of the conditional posterior information state."""
    same_space(y.out_info_space, out_space.base, "output embedding")
    post = posterior_state(y, event, state_in)
    return MeanState(post.probabilities @ out_space.payloads, provenance=post)


def posterior_mean_ratio(
    y: ExtendedObservable,
    event: Event,
    state_in: InformationState,
    in_space: EmbeddedSpace,
    out_space: EmbeddedSpace,
) -> MeanState:
    """Posterior mean as averaged statistical map over the event probability."""
    v = statistical_map(y, event, in_space, out_space)
    numerator = state_in.probabilities @ v
    prob = out_space.level(numerator)
    if prob <= tolerance.ZERO_PROBABILITY:
        raise ZeroProbabilityEvent(f"event {list(event.labels)} has probability {prob!r}")
    return MeanState(numerator / prob)


def prelinearity_defect(
    y: ExtendedObservable,
    in_space: EmbeddedSpace,
    out_space: EmbeddedSpace,
    relations: Sequence[ConvexRelation],
) -> float:
    """Largest violation of the relations by the statistical map over outcome atoms."""
    worst = 0.0
    for rel in relations:
        validate_relation(in_space, rel)
    diff = [rel.lhs - rel.rhs for rel in relations]
    if not diff:
        return worst
    for w in range(y.outcome_space.size):
        v = statistical_map(y, Event.atom(y.outcome_space, w), in_space, out_space)
        for d in diff:
            worst = max(worst, float(np.abs(d @ v).max()))
    return worst


def check_prelinear(
    y: ExtendedObservable,
    in_space: EmbeddedSpace,
    out_space: EmbeddedSpace,
    relations: Sequence[ConvexRelation],
) -> bool:
    """True when the statistical map respects every supplied convex relation.

    Raises :class:`BadRelation` if a relation does not hold among the payloads.
    """
    return prelinearity_defect(y, in_space, out_space, relations) <= tolerance.RELATION_TOL


def decompose_mean(sp: EmbeddedSpace, vector: np.ndarray) -> np.ndarray:
    """Convex weights over the frame that reproduce ``vector``."""
    a = np.vstack([sp.payloads.T, np.ones(sp.base.size)])
    b = np.concatenate([np.asarray(vector, dtype=float), [1.0]])
    c, residual = nnls(a, b)
    if residual > tolerance.RELATION_TOL:
        raise InvalidEmbedding(f"mean is not in the convex hull of the frame (residual {residual!r})")
    return c / c.sum()


def mean_instrument_apply(
    y: ExtendedObservable,
    event: Event,
    eta_in: MeanState,
    in_space: EmbeddedSpace,
    out_space: EmbeddedSpace,
    relations: Sequence[ConvexRelation],
) -> tuple[float, MeanState]:
    """Outcome probability and posterior mean computed from the input mean alone.

    The input mean is written as a convex combination of frame payloads (its
    provenance weights when known, a nonnegative least-squares fit otherwise);
    pre-linearity makes the result independent of that choice.
    """
    if not check_prelinear(y, in_space, out_space, relations):
        raise NotPrelinear("statistical map does not respect the supplied relations")
    if eta_in.vector.shape != (in_space.dim,):
        raise SpaceMismatch("input mean has the wrong dimension")
    prov = eta_in.provenance
    if prov is not None and prov.space == in_space.base:
        coeffs = prov.probabilities
    else:
        coeffs = decompose_mean(in_space, eta_in.vector)
    combined = coeffs @ statistical_map(y, event, in_space, out_space)
    prob = out_space.level(combined)
    if prob <= tolerance.ZERO_PROBABILITY:
        raise ZeroProbabilityEvent(f"event {list(event.labels)} has probability {prob!r}")
    return prob, MeanState(combined / prob)
