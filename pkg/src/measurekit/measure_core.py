"""Finite spaces, events, finite measures and information states.

Every sigma-algebra here is the full power set of a finite label set, so an
event is just a boolean mask over the points of a space.  Information states
are stored as their normalized representative; two measures that differ only
by a positive scale describe the same state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import tolerance
from .errors import (
    BadConvexWeights,
    IndexOutOfRange,
    InvalidMeasure,
    NotProductSpace,
    SpaceMismatch,
    ZeroTotalMeasure,
)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FiniteSpace:
    """Ordered set of distinct point labels.

    ``factors`` is set for product spaces; points of a product are ordered
    row-major over the factors and labelled ``"(l1,l2)"``.
    """

    labels: tuple[str, ...]
    factors: tuple["FiniteSpace", ...] | None = None

    def __post_init__(self) -> None:
        labels = tuple(str(label) for label in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 1:
            raise InvalidMeasure("a space needs at least one point")
        if len(set(labels)) != len(labels):
            raise InvalidMeasure(f"space labels are not distinct: {labels}")
        if self.factors is not None:
            sizes = [f.size for f in self.factors]
            if len(sizes) < 2 or int(np.prod(sizes)) != len(labels):
                raise NotProductSpace("factor sizes do not match the number of points")

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise IndexOutOfRange(f"label {label!r} is not a point of {self.labels}") from None

    def check_index(self, i: int) -> int:
        if not 0 <= int(i) < self.size:
            raise IndexOutOfRange(f"point index {i} outside space of size {self.size}")
        return int(i)

    @property
    def is_product(self) -> bool:
        return self.factors is not None

    @property
    def shape(self) -> tuple[int, ...]:
        if self.factors is None:
            return (self.size,)
        return tuple(f.size for f in self.factors)


def space(labels: Iterable) -> FiniteSpace:
    return FiniteSpace(tuple(labels))


def product_space(*spaces: FiniteSpace) -> FiniteSpace:
    """Product of two or more spaces with row-major point order."""
    if len(spaces) < 2:
        raise NotProductSpace("a product needs at least two factors")
    labels = [""]
    for sp in spaces:
        labels = [f"{a},{b}" if a else b for a in labels for b in sp.labels]
    return FiniteSpace(tuple(f"({label})" for label in labels), tuple(spaces))


def same_space(a: FiniteSpace, b: FiniteSpace, what: str = "space") -> None:
    if a != b:
        raise SpaceMismatch(f"{what} mismatch: {a.labels} vs {b.labels}")


@dataclass(frozen=True, eq=False)
class Event:
    """Subset of a finite space, held as a boolean mask."""

    space: FiniteSpace
    mask: np.ndarray

    def __post_init__(self) -> None:
        mask = np.array(self.mask, dtype=bool).reshape(-1)
        if mask.shape != (self.space.size,):
            raise IndexOutOfRange(
                f"event mask has {mask.size} entries, space has {self.space.size} points"
            )
        object.__setattr__(self, "mask", _frozen(mask))

    @classmethod
    def from_indices(cls, sp: FiniteSpace, indices: Iterable[int]) -> "Event":
        mask = np.zeros(sp.size, dtype=bool)
        for i in indices:
            mask[sp.check_index(i)] = True
        return cls(sp, mask)

    @classmethod
    def from_labels(cls, sp: FiniteSpace, labels: Iterable[str]) -> "Event":
        return cls.from_indices(sp, [sp.index(label) for label in labels])

    @classmethod
    def full(cls, sp: FiniteSpace) -> "Event":
        return cls(sp, np.ones(sp.size, dtype=bool))

    @classmethod
    def empty(cls, sp: FiniteSpace) -> "Event":
        return cls(sp, np.zeros(sp.size, dtype=bool))

    @classmethod
    def atom(cls, sp: FiniteSpace, i: int) -> "Event":
        return cls.from_indices(sp, [i])

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.mask))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.space.labels[i] for i in self.indices)

    def union(self, other: "Event") -> "Event":
        same_space(self.space, other.space, "event space")
        return Event(self.space, self.mask | other.mask)

    def intersection(self, other: "Event") -> "Event":
        same_space(self.space, other.space, "event space")
        return Event(self.space, self.mask & other.mask)

    def complement(self) -> "Event":
        return Event(self.space, ~self.mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Event):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self.mask, other.mask))

    __hash__ = None  # type: ignore[assignment]


def rectangle(sp: FiniteSpace, *parts: Event) -> Event:
    """Cylinder ``B1 x B2 x ...`` inside a declared product space."""
    if sp.factors is None:
        raise NotProductSpace(f"space {sp.labels} has no declared factorization")
    if len(parts) != len(sp.factors):
        raise NotProductSpace("one event per factor is required")
    mask = np.ones((), dtype=bool)
    for factor, part in zip(sp.factors, parts):
        same_space(factor, part.space, "rectangle factor")
        mask = np.logical_and.outer(mask, part.mask)
    return Event(sp, mask.reshape(-1))


def _clean_weights(weights: Sequence[float] | np.ndarray, n: int) -> np.ndarray:
    w = np.array(weights, dtype=float).reshape(-1)
    if w.shape != (n,):
        raise InvalidMeasure(f"expected {n} weights, got {w.size}")
    if not np.all(np.isfinite(w)):
        raise InvalidMeasure("weights must be finite")
    if np.any(w < -tolerance.TOL):
        raise InvalidMeasure(f"negative weight {w.min()!r}")
    return np.clip(w, 0.0, None)


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    """Nonnegative finite measure; ``total`` is cached at construction."""

    space: FiniteSpace
    weights: np.ndarray
    total: float = field(init=False)

    def __post_init__(self) -> None:
        w = _clean_weights(self.weights, self.space.size)
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "total", float(w.sum()))

    def scaled(self, c: float) -> "FiniteMeasure":
        if c < 0:
            raise InvalidMeasure("scale must be nonnegative")
        return FiniteMeasure(self.space, self.weights * c)

    def measure_of(self, event: Event) -> float:
        same_space(self.space, event.space, "event space")
        return float(self.weights[event.mask].sum())


@dataclass(frozen=True, eq=False)
class InformationState:
    """Normalized representative of an equivalence class of measures."""

    space: FiniteSpace
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        p = _clean_weights(self.probabilities, self.space.size)
        if abs(p.sum() - 1.0) > tolerance.TOL:
            raise InvalidMeasure(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "probabilities", _frozen(p))

    def allclose(self, other: "InformationState", atol: float | None = None) -> bool:
        atol = tolerance.TOL if atol is None else atol
        return self.space == other.space and bool(
            np.allclose(self.probabilities, other.probabilities, rtol=0, atol=atol)
        )

    def as_measure(self) -> FiniteMeasure:
        return FiniteMeasure(self.space, self.probabilities)

    def __getitem__(self, i: int) -> float:
        return float(self.probabilities[i])


def state(sp: FiniteSpace, probabilities: Sequence[float]) -> InformationState:
    return InformationState(sp, np.asarray(probabilities, dtype=float))


def normalize(m: FiniteMeasure) -> InformationState:
    """Canonical representative ``weights / total`` of the class of ``m``."""
    if not m.total > 0:
        raise ZeroTotalMeasure("cannot normalize a measure with zero total mass")
    return InformationState(m.space, m.weights / m.total)


def dirac(sp: FiniteSpace, point: int) -> InformationState:
    p = np.zeros(sp.size)
    p[sp.check_index(point)] = 1.0
    return InformationState(sp, p)


def uniform(sp: FiniteSpace) -> InformationState:
    return InformationState(sp, np.full(sp.size, 1.0 / sp.size))


def mix(states: Sequence[InformationState], coefficients: Sequence[float]) -> InformationState:
    """Convex combination of states on one space."""
    if len(states) == 0 or len(states) != len(coefficients):
        raise BadConvexWeights("need one coefficient per state")
    c = np.asarray(coefficients, dtype=float)
    if np.any(c < -tolerance.TOL) or abs(c.sum() - 1.0) > tolerance.TOL:
        raise BadConvexWeights(f"coefficients {c.tolist()} are not convex weights")
    sp = states[0].space
    for s in states[1:]:
        same_space(sp, s.space, "mixture space")
    stacked = np.stack([s.probabilities for s in states])
    p = np.clip(c, 0.0, None) @ stacked
    return InformationState(sp, p / p.sum())


def measure_of(st: InformationState, event: Event) -> float:
    same_space(st.space, event.space, "event space")
    return float(min(1.0, st.probabilities[event.mask].sum()))
