"""JSON encodings of the model objects.

Formats::

    space        ["a", "b"]  or  {"factors": [["a", "b"], ["x", "y"]]}
    measure      {"space": [...], "weights": [...]}
    observable   {"outcome_space": ..., "info_space": ..., "kernel": [[row per outcome]]}
    extended     {"outcome_space": ..., "out_info_space": ..., "in_info_space": ...,
                  "kernel": [[[...]]]}            # indexed [omega][theta_out][theta_in]
    embedded     {"space": [...], "payloads": [[...]], "functional": [...], "bound": C}
    matrix       [[[re, im], ...], ...]           # row-major complex entries
    povm         {"outcomes": [...], "effects": [matrix, ...]}
    instrument   {"outcomes": [...], "kraus": [[matrix, ...] per outcome]}
    frame        {"vectors": [[[re, im], ...], ...], "labels": [...]}
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .instruments import ExtendedObservable
from .mean_states import EmbeddedSpace
from .measure_core import FiniteMeasure, FiniteSpace, InformationState, normalize, product_space
from .observables import GeneralizedObservable
from .quantum import POVM, DensityMatrix, KrausInstrument, PureStateFrame, ket


def space_to_json(sp: FiniteSpace) -> Any:
    if sp.factors is not None:
        return {"factors": [space_to_json(f) for f in sp.factors]}
    return list(sp.labels)


def space_from_json(data: Any) -> FiniteSpace:
    if isinstance(data, dict):
        if "factors" not in data:
            raise KeyError("product space needs 'factors'")
        return product_space(*(space_from_json(f) for f in data["factors"]))
    if not isinstance(data, list):
        raise TypeError(f"a space is a list of labels, got {type(data).__name__}")
    return FiniteSpace(tuple(str(label) for label in data))


def measure_to_json(m: FiniteMeasure | InformationState) -> dict:
    weights = m.weights if isinstance(m, FiniteMeasure) else m.probabilities
    return {"space": space_to_json(m.space), "weights": [float(w) for w in weights]}


def measure_from_json(data: dict) -> FiniteMeasure:
    return FiniteMeasure(space_from_json(data["space"]), np.asarray(data["weights"], dtype=float))


def state_from_json(data: dict) -> InformationState:
    """Reads the measure format and keeps the normalized representative."""
    return normalize(measure_from_json(data))


def observable_to_json(obs: GeneralizedObservable) -> dict:
    return {
        "outcome_space": space_to_json(obs.outcome_space),
        "info_space": space_to_json(obs.info_space),
        "kernel": obs.kernel.tolist(),
    }


def observable_from_json(data: dict) -> GeneralizedObservable:
    return GeneralizedObservable(
        space_from_json(data["outcome_space"]),
        space_from_json(data["info_space"]),
        np.asarray(data["kernel"], dtype=float),
        renormalize=bool(data.get("renormalize", False)),
    )


def extended_to_json(y: ExtendedObservable) -> dict:
    return {
        "outcome_space": space_to_json(y.outcome_space),
        "out_info_space": space_to_json(y.out_info_space),
        "in_info_space": space_to_json(y.in_info_space),
        "kernel": y.kernel.tolist(),
    }


def extended_from_json(data: dict) -> ExtendedObservable:
    return ExtendedObservable(
        space_from_json(data["outcome_space"]),
        space_from_json(data["out_info_space"]),
        space_from_json(data["in_info_space"]),
        np.asarray(data["kernel"], dtype=float),
    )


def embedded_to_json(sp: EmbeddedSpace) -> dict:
    return {
        "space": space_to_json(sp.base),
        "payloads": sp.payloads.tolist(),
        "functional": sp.functional.tolist(),
        "bound": sp.bound,
    }


def embedded_from_json(data: dict) -> EmbeddedSpace:
    return EmbeddedSpace(
        space_from_json(data["space"]),
        np.asarray(data["payloads"], dtype=float),
        np.asarray(data["functional"], dtype=float),
        float(data["bound"]),
    )


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _complex_from_json(entry: Any) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    re, im = entry
    return complex(float(re), float(im))


def matrix_to_json(a: np.ndarray) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(a)]


def matrix_from_json(data: list) -> np.ndarray:
    return np.array([[_complex_from_json(z) for z in row] for row in data], dtype=complex)


def vector_from_json(data: list) -> np.ndarray:
    return np.array([_complex_from_json(z) for z in data], dtype=complex)


def density_to_json(rho: DensityMatrix) -> list:
    return matrix_to_json(rho.matrix)


def density_from_json(data: Any) -> DensityMatrix:
    """A matrix, or ``{"pure": vector}`` for a normalized pure state."""
    if isinstance(data, dict):
        if "pure" in data:
            return DensityMatrix.pure(vector_from_json(data["pure"]))
        return DensityMatrix(matrix_from_json(data["matrix"]))
    return DensityMatrix(matrix_from_json(data))


def povm_to_json(povm: POVM) -> dict:
    return {"outcomes": list(povm.outcome_space.labels), "effects": [matrix_to_json(e) for e in povm.effects]}


def povm_from_json(data: dict) -> POVM:
    return POVM(space_from_json(data["outcomes"]), tuple(matrix_from_json(e) for e in data["effects"]))


def instrument_to_json(instr: KrausInstrument) -> dict:
    return {
        "outcomes": list(instr.outcome_space.labels),
        "kraus": [[matrix_to_json(a) for a in group] for group in instr.kraus],
    }


def instrument_from_json(data: dict) -> KrausInstrument:
    return KrausInstrument(
        space_from_json(data["outcomes"]),
        tuple(tuple(matrix_from_json(a) for a in group) for group in data["kraus"]),
    )


def frame_to_json(fr: PureStateFrame) -> dict:
    return {"vectors": [[complex_to_json(z) for z in v] for v in fr.vectors], "labels": list(fr.labels)}


def frame_from_json(data: dict) -> PureStateFrame:
    vectors = tuple(ket(vector_from_json(v)) for v in data["vectors"])
    labels = data.get("labels")
    return PureStateFrame(vectors, None if labels is None else tuple(str(x) for x in labels))
