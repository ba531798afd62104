"""Non-destructive experiments: extended observables and their instruments.

An extended observable ``Y`` is a kernel from ``Theta_in`` to the compound
outcome space ``Omega x Theta_out``, stored densely as ``Y[w, t_out, t_in]``.
Its instrument maps a measure on ``Theta_in`` to an unnormalized measure on
``Theta_out`` for every outcome event; normalizing that image is conditioning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerance
from .errors import InvalidKernel, ZeroProbabilityEvent
from .measure_core import (
    Event,
    FiniteMeasure,
    FiniteSpace,
    InformationState,
    _frozen,
    normalize,
    product_space,
    same_space,
)
from .observables import GeneralizedObservable, check_stochastic


@dataclass(frozen=True, eq=False)
class ExtendedObservable:
    outcome_space: FiniteSpace
    out_info_space: FiniteSpace
    in_info_space: FiniteSpace
    kernel: np.ndarray
    renormalize: bool = False

    def __post_init__(self) -> None:
        k = np.asarray(self.kernel, dtype=float)
        expected = (self.outcome_space.size, self.out_info_space.size, self.in_info_space.size)
        if k.shape != expected:
            raise InvalidKernel(f"kernel shape {k.shape} does not match spaces {expected}")
        flat = check_stochastic(
            k.reshape(-1, expected[2]), axis=0, renormalize=self.renormalize,
            name="extended kernel",
        )
        object.__setattr__(self, "kernel", _frozen(flat.reshape(expected)))

    def allclose(self, other: "ExtendedObservable", atol: float | None = None) -> bool:
        atol = tolerance.TOL if atol is None else atol
        return (
            self.outcome_space == other.outcome_space
            and self.out_info_space == other.out_info_space
            and self.in_info_space == other.in_info_space
            and bool(np.allclose(self.kernel, other.kernel, rtol=0, atol=atol))
        )

    def as_observable(self) -> GeneralizedObservable:
        """The same kernel viewed as a plain observable on ``Omega x Theta_out``."""
        joint = product_space(self.outcome_space, self.out_info_space)
        return GeneralizedObservable(
            joint, self.in_info_space, self.kernel.reshape(joint.size, -1)
        )


def outcome_marginal(y: ExtendedObservable) -> GeneralizedObservable:
    return GeneralizedObservable(y.outcome_space, y.in_info_space, y.kernel.sum(axis=1))


def system_marginal(y: ExtendedObservable) -> GeneralizedObservable:
    return GeneralizedObservable(y.out_info_space, y.in_info_space, y.kernel.sum(axis=0))


def _restricted(y: ExtendedObservable, event: Event) -> np.ndarray:
    same_space(y.outcome_space, event.space, "outcome space")
    # (t_out, t_in) matrix of Y(event x {t_out}) as a function of t_in
    return y.kernel[event.mask].sum(axis=0)


def instrument_apply(y: ExtendedObservable, event: Event, m: FiniteMeasure) -> FiniteMeasure:
    """Image of ``m`` under the instrument value on ``event``."""
    same_space(y.in_info_space, m.space, "input information space")
    return FiniteMeasure(y.out_info_space, _restricted(y, event) @ m.weights)


def instrument_map(y: ExtendedObservable, event: Event) -> np.ndarray:
    """Matrix of the instrument value on ``event`` acting on weight vectors."""
    return _restricted(y, event)


def event_probability(y: ExtendedObservable, event: Event, state_in: InformationState) -> float:
    same_space(y.in_info_space, state_in.space, "input information space")
    return float(_restricted(y, event).sum(axis=0) @ state_in.probabilities)


def posterior_state(
    y: ExtendedObservable, event: Event, state_in: InformationState
) -> InformationState:
    """Conditional posterior information state given the outcome ``event``."""
    out = instrument_apply(y, event, state_in.as_measure())
    if out.total <= tolerance.ZERO_PROBABILITY:
        raise ZeroProbabilityEvent(
            f"event {list(event.labels)} has probability {out.total!r} under the input state"
        )
    return normalize(out)


def compose(y1: ExtendedObservable, y2: ExtendedObservable) -> ExtendedObservable:
    """Consecutive experiment: ``y1`` first, then ``y2`` on ``y1``'s posterior space.

    ``Y[(w1, w2), t_out, t_in] = sum_t1 Y2[w2, t_out, t1] Y1[w1, t1, t_in]``.
    """
    same_space(y1.out_info_space, y2.in_info_space, "intermediate information space")
    k = np.einsum("bos,asi->aboi", y2.kernel, y1.kernel)
    omega = product_space(y1.outcome_space, y2.outcome_space)
    k = k.reshape(omega.size, y2.out_info_space.size, y1.in_info_space.size)
    return ExtendedObservable(omega, y2.out_info_space, y1.in_info_space, k)


def product_extended(m: GeneralizedObservable, s: GeneralizedObservable) -> ExtendedObservable:
    """Non-perturbing extended observable ``Y[w, o, i] = M[w, i] S[o, i]``."""
    same_space(m.info_space, s.info_space, "information space")
    k = np.einsum("wi,oi->woi", m.kernel, s.kernel)
    return ExtendedObservable(m.outcome_space, s.outcome_space, m.info_space, k)


def is_non_perturbing(y: ExtendedObservable) -> bool:
    """True when every ``Y(. x . ; t_in)`` factorizes into its two marginals."""
    m = y.kernel.sum(axis=1)
    s = y.kernel.sum(axis=0)
    factored = np.einsum("wi,oi->woi", m, s)
    return bool(np.all(np.abs(y.kernel - factored) <= tolerance.TOL))


def identity_readout(sp: FiniteSpace, outcome_label: str = "*") -> ExtendedObservable:
    """Single-outcome instrument that leaves the state untouched."""
    k = np.eye(sp.size)[None, :, :]
    return ExtendedObservable(FiniteSpace((outcome_label,)), sp, sp, k)


def classical_readout(sp: FiniteSpace) -> ExtendedObservable:
    """Errorless readout: outcome equals the point, and the point is kept."""
    n = sp.size
    k = np.zeros((n, n, n))
    k[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    return ExtendedObservable(sp, sp, sp, k)

