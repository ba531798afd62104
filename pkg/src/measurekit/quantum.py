"""Finite-dimensional quantum systems.

Density matrices are the mean states of pure-state frames, POVMs give outcome
statistics through the Born rule, and Kraus instruments give unnormalized
post-measurement states.  Choi matrices certify complete positivity.

Vectorization is column-stacking throughout: ``vec(A)[j * d_out + i] = A[i, j]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import tolerance
from .errors import (
    DimensionMismatch,
    InvalidQuantumObject,
    MultiKrausUnsupported,
    ZeroProbabilityEvent,
)
from .instruments import ExtendedObservable
from .mean_states import EmbeddedSpace
from .measure_core import Event, FiniteSpace, _frozen, same_space


def _matrix(a, name: str) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise InvalidQuantumObject(f"{name} must be a matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, atol: float | None = None) -> bool:
    atol = tolerance.TOL if atol is None else atol
    return a.shape[0] == a.shape[1] and bool(np.allclose(a, dagger(a), rtol=0, atol=atol))


def min_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``a``."""
    h = (a + dagger(a)) / 2
    return float(np.linalg.eigvalsh(h)[0])


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1, order="F")


def ket(amplitudes: Sequence[complex]) -> np.ndarray:
    v = np.array(amplitudes, dtype=complex)
    return v / np.linalg.norm(v)


def projector(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        rho = _matrix(self.matrix, "density matrix")
        if rho.shape[0] != rho.shape[1]:
            raise InvalidQuantumObject(f"density matrix is not square: {rho.shape}")
        if not is_hermitian(rho):
            raise InvalidQuantumObject("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > tolerance.TOL:
            raise InvalidQuantumObject(f"density matrix has trace {np.trace(rho).real!r}")
        if min_eigenvalue(rho) < -tolerance.EIGEN_TOL:
            raise InvalidQuantumObject("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(rho))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi: Sequence[complex]) -> "DensityMatrix":
        return cls(projector(ket(psi)))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d) / d)

    def allclose(self, other: "DensityMatrix", atol: float | None = None) -> bool:
        atol = tolerance.TOL if atol is None else atol
        return bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=atol))


@dataclass(frozen=True, eq=False)
class POVM:
    outcome_space: FiniteSpace
    effects: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        effects = tuple(_matrix(e, "effect") for e in self.effects)
        if len(effects) != self.outcome_space.size:
            raise InvalidQuantumObject("need one effect per outcome")
        d = effects[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for label, e in zip(self.outcome_space.labels, effects):
            if e.shape != (d, d):
                raise DimensionMismatch(f"effect {label!r} has shape {e.shape}")
            if not is_hermitian(e):
                raise InvalidQuantumObject(f"effect {label!r} is not Hermitian")
            if min_eigenvalue(e) < -tolerance.EIGEN_TOL:
                raise InvalidQuantumObject(f"effect {label!r} is not positive semidefinite")
            total += e
        if not np.allclose(total, np.eye(d), rtol=0, atol=tolerance.TOL):
            raise InvalidQuantumObject("effects do not sum to the identity")
        object.__setattr__(self, "effects", tuple(_frozen(e) for e in effects))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def effect(self, event: Event) -> np.ndarray:
        same_space(self.outcome_space, event.space, "outcome space")
        return sum((self.effects[i] for i in event.indices), np.zeros((self.dim, self.dim), complex))


def computational_povm(d: int = 2) -> POVM:
    return POVM(FiniteSpace(tuple(str(i) for i in range(d))), tuple(projector(np.eye(d)[i]) for i in range(d)))


def born_probability(povm: POVM, rho: DensityMatrix, event: Event) -> float:
    """``tr[rho M(event)]``."""
    if povm.dim != rho.dim:
        raise DimensionMismatch(f"POVM dimension {povm.dim} vs state dimension {rho.dim}")
    p = float(np.trace(rho.matrix @ povm.effect(event)).real)
    return min(1.0, max(0.0, p))


def born_distribution(povm: POVM, rho: DensityMatrix) -> np.ndarray:
    return np.array(
        [born_probability(povm, rho, Event.atom(povm.outcome_space, w)) for w in range(povm.outcome_space.size)]
    )


@dataclass(frozen=True, eq=False)
class KrausInstrument:
    """Operation-valued measure in Kraus form: a list of operators per outcome."""

    outcome_space: FiniteSpace
    kraus: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self) -> None:
        if len(self.kraus) != self.outcome_space.size:
            raise InvalidQuantumObject("need one Kraus list per outcome")
        ops = tuple(tuple(_matrix(a, "Kraus operator") for a in group) for group in self.kraus)
        shapes = {a.shape for group in ops for a in group}
        if len(shapes) != 1:
            raise DimensionMismatch(f"Kraus operators have inconsistent shapes {sorted(shapes)}")
        d_out, d_in = shapes.pop()
        total = sum((dagger(a) @ a for group in ops for a in group), np.zeros((d_in, d_in), complex))
        if not np.allclose(total, np.eye(d_in), rtol=0, atol=tolerance.TOL):
            raise InvalidQuantumObject("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", tuple(tuple(_frozen(a) for a in g) for g in ops))

    @property
    def dims(self) -> tuple[int, int]:
        """``(d_out, d_in)``."""
        return self.kraus[0][0].shape

    def povm(self) -> POVM:
        return POVM(self.outcome_space, tuple(sum(dagger(a) @ a for a in g) for g in self.kraus))

    def operation(self, event: Event, t: np.ndarray) -> np.ndarray:
        """Unnormalized output ``sum_{w in event, j} A T A^dagger``."""
        same_space(self.outcome_space, event.space, "outcome space")
        d_out, d_in = self.dims
        if t.shape != (d_in, d_in):
            raise DimensionMismatch(f"input has shape {t.shape}, instrument expects {(d_in, d_in)}")
        out = np.zeros((d_out, d_out), dtype=complex)
        for w in event.indices:
            for a in self.kraus[w]:
                out += a @ t @ dagger(a)
        return out


def projective_instrument(basis: np.ndarray, labels: Sequence[str] | None = None) -> KrausInstrument:
    """Lüders instrument of the orthonormal basis given by the columns of ``basis``."""
    basis = np.asarray(basis, dtype=complex)
    d = basis.shape[1]
    labels = [str(i) for i in range(d)] if labels is None else list(labels)
    return KrausInstrument(FiniteSpace(tuple(labels)), tuple((projector(basis[:, i]),) for i in range(d)))


def unitary_instrument(u: np.ndarray, label: str = "*") -> KrausInstrument:
    return KrausInstrument(FiniteSpace((label,)), ((np.asarray(u, dtype=complex),),))


def instrument_state_update(
    instr: KrausInstrument, event: Event, rho: DensityMatrix
) -> tuple[float, DensityMatrix]:
    """Event probability and conditional post-measurement state."""
    if instr.dims[1] != rho.dim:
        raise DimensionMismatch(f"instrument input dimension {instr.dims[1]} vs state {rho.dim}")
    t = instr.operation(event, rho.matrix)
    p = float(np.trace(t).real)
    if p <= tolerance.ZERO_PROBABILITY:
        raise ZeroProbabilityEvent(f"event {list(event.labels)} has probability {p!r}")
    out = t / p
    return p, DensityMatrix((out + dagger(out)) / 2)


def choi_matrix(instr: KrausInstrument, outcome: int | str) -> np.ndarray:
    """``sum_j vec(A_j) vec(A_j)^dagger`` for the Kraus operators of one outcome."""
    sp = instr.outcome_space
    w = sp.index(outcome) if isinstance(outcome, str) else sp.check_index(outcome)
    d_out, d_in = instr.dims
    c = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for a in instr.kraus[w]:
        v = vec(a)
        c += np.outer(v, v.conj())
    return c


def choi_from_map(fn: Callable[[np.ndarray], np.ndarray], d_in: int) -> np.ndarray:
    """Choi matrix ``sum_{jk} E_jk (x) fn(E_jk)`` of an arbitrary linear map."""
    blocks = []
    for j in range(d_in):
        for k in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[j, k] = 1.0
            blocks.append(np.kron(e, np.asarray(fn(e), dtype=complex)))
    return sum(blocks)


def choi_from_superoperator(s: np.ndarray, d_in: int, d_out: int | None = None) -> np.ndarray:
    """Choi matrix of the map with ``vec(fn(T)) = s @ vec(T)``."""
    d_out = d_in if d_out is None else d_out
    s = np.asarray(s, dtype=complex)
    if s.shape != (d_out * d_out, d_in * d_in):
        raise DimensionMismatch(f"superoperator shape {s.shape} does not match dimensions")
    return choi_from_map(lambda t: (s @ vec(t)).reshape(d_out, d_out, order="F"), d_in)


def superoperator(fn: Callable[[np.ndarray], np.ndarray], d_in: int) -> np.ndarray:
    cols = []
    for idx in range(d_in * d_in):
        e = np.zeros(d_in * d_in, dtype=complex)
        e[idx] = 1.0
        cols.append(vec(fn(e.reshape(d_in, d_in, order="F"))))
    return np.stack(cols, axis=1)


def is_completely_positive(choi: np.ndarray) -> bool:
    return min_eigenvalue(choi) >= -tolerance.EIGEN_TOL


@dataclass(frozen=True, eq=False)
class PureStateFrame:
    """Finite set of pure states, pairwise distinct up to global phase."""

    vectors: tuple[np.ndarray, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        vecs = tuple(np.array(v, dtype=complex).reshape(-1) for v in self.vectors)
        if not vecs:
            raise InvalidQuantumObject("a frame needs at least one state")
        d = vecs[0].size
        for v in vecs:
            if v.size != d:
                raise DimensionMismatch("frame vectors have different dimensions")
            if abs(np.linalg.norm(v) - 1.0) > tolerance.TOL:
                raise InvalidQuantumObject(f"frame vector has norm {np.linalg.norm(v)!r}")
        for j in range(len(vecs)):
            for k in range(j):
                if abs(np.vdot(vecs[j], vecs[k])) >= 1 - tolerance.TOL:
                    raise InvalidQuantumObject(f"frame vectors {k} and {j} coincide up to phase")
        labels = self.labels or tuple(f"psi{i}" for i in range(len(vecs)))
        if len(labels) != len(vecs):
            raise InvalidQuantumObject("need one label per frame vector")
        object.__setattr__(self, "vectors", tuple(_frozen(v) for v in vecs))
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def dim(self) -> int:
        return self.vectors[0].size

    @property
    def space(self) -> FiniteSpace:
        return FiniteSpace(self.labels)

    def projectors(self) -> list[np.ndarray]:
        return [projector(v) for v in self.vectors]

    def find(self, psi: np.ndarray, atol: float = 1e-10) -> int | None:
        for i, v in enumerate(self.vectors):
            if abs(np.vdot(v, psi)) >= 1 - atol:
                return i
        return None

    def density(self, probabilities: Sequence[float]) -> DensityMatrix:
        p = np.asarray(probabilities, dtype=float)
        rho = sum(pi * proj for pi, proj in zip(p, self.projectors()))
        return DensityMatrix((rho + dagger(rho)) / 2)


def frame(*amplitudes: Sequence[complex], labels: Sequence[str] | None = None) -> PureStateFrame:
    return PureStateFrame(tuple(ket(a) for a in amplitudes), None if labels is None else tuple(labels))


def flatten_operator(a: np.ndarray) -> np.ndarray:
    """Real payload ``(Re a, Im a)`` of length ``2 d^2``."""
    a = np.asarray(a, dtype=complex)
    return np.concatenate([a.real.reshape(-1), a.imag.reshape(-1)])


def unflatten_operator(x: np.ndarray, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[: d * d].reshape(d, d) + 1j * x[d * d :].reshape(d, d)


def trace_covector(d: int) -> np.ndarray:
    return flatten_operator(np.eye(d)).real


def to_embedded_space(fr: PureStateFrame) -> EmbeddedSpace:
    """Frame points embedded as flattened projectors with the trace functional."""
    payloads = np.stack([flatten_operator(p) for p in fr.projectors()])
    return EmbeddedSpace(fr.space, payloads, trace_covector(fr.dim), bound=1.0)


def lueders_extended_observable(
    instr: KrausInstrument, frame_in: PureStateFrame
) -> tuple[ExtendedObservable, PureStateFrame]:
    """Frame restriction of a single-Kraus instrument as an extended observable.

    Each input vector ``psi_k`` under outcome ``w`` goes to the pure state
    ``A_w psi_k / |A_w psi_k|`` with probability ``|A_w psi_k|^2``; the distinct
    posteriors (up to phase) form the output frame.
    """
    d_out, d_in = instr.dims
    if frame_in.dim != d_in:
        raise DimensionMismatch(f"frame dimension {frame_in.dim} vs instrument input {d_in}")
    for label, group in zip(instr.outcome_space.labels, instr.kraus):
        if len(group) != 1:
            raise MultiKrausUnsupported(
                f"outcome {label!r} has {len(group)} Kraus operators; pure posteriors need exactly one"
            )
    out_vectors: list[np.ndarray] = []
    entries: list[tuple[int, int, int, float]] = []
    for w, (a,) in enumerate(instr.kraus):
        for k, psi in enumerate(frame_in.vectors):
            phi = a @ psi
            p = float(np.vdot(phi, phi).real)
            if p <= tolerance.ZERO_PROBABILITY:
                continue
            phi = phi / np.sqrt(p)
            slot = next(
                (i for i, v in enumerate(out_vectors) if abs(np.vdot(v, phi)) >= 1 - 1e-10), None
            )
            if slot is None:
                out_vectors.append(phi)
                slot = len(out_vectors) - 1
            entries.append((w, slot, k, p))
    frame_out = PureStateFrame(tuple(out_vectors), tuple(f"phi{i}" for i in range(len(out_vectors))))
    y = np.zeros((instr.outcome_space.size, len(out_vectors), len(frame_in.vectors)))
    for w, slot, k, p in entries:
        y[w, slot, k] += p
    return ExtendedObservable(instr.outcome_space, frame_out.space, frame_in.space, y), frame_out


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ dagger(g)
    rho = rho / np.trace(rho).real
    return DensityMatrix((rho + dagger(rho)) / 2)


def random_kraus_instrument(
    d_in: int,
    d_out: int,
    n_outcomes: int,
    rng: np.random.Generator,
    ops_per_outcome: int = 2,
) -> KrausInstrument:
    """Random trace-preserving instrument from a random isometry."""
    n = n_outcomes * ops_per_outcome
    g = rng.normal(size=(n * d_out, d_in)) + 1j * rng.normal(size=(n * d_out, d_in))
    q, _ = np.linalg.qr(g)
    blocks = [q[i * d_out : (i + 1) * d_out] for i in range(n)]
    groups = tuple(
        tuple(blocks[w * ops_per_outcome : (w + 1) * ops_per_outcome]) for w in range(n_outcomes)
    )
    return KrausInstrument(FiniteSpace(tuple(str(w) for w in range(n_outcomes))), groups)
