"""Built-in example configs for ``measurekit demo``."""

from __future__ import annotations

import copy

CLASSICAL_2X2 = {
    "name": "classical-2x2",
    "seed": 20240611,
    "trials": 1_000_000,
    "spaces": {"Theta": ["t1", "t2"], "Omega": ["w1", "w2"]},
    "states": {"pi": {"space": "Theta", "weights": [0.5, 0.5]}},
    "observables": {
        "K": {"outcome_space": "Omega", "info_space": "Theta", "kernel": [[0.7, 0.2], [0.3, 0.8]]}
    },
    "extended": {
        # outcome law K, system left in place
        "Y": {
            "outcome_space": "Omega",
            "out_info_space": "Theta",
            "in_info_space": "Theta",
            "kernel": [[[0.7, 0.0], [0.0, 0.2]], [[0.3, 0.0], [0.0, 0.8]]],
        }
    },
    "pipeline": [
        {"op": "distribution", "id": "outcomes", "observable": "K", "state": "pi",
         "expect": {"probabilities": [0.45, 0.55]}},
        {"op": "check", "id": "affinity", "check": "affinity", "observable": "K"},
        {"op": "check", "id": "representation", "check": "representation", "observable": "K"},
        {"op": "instrument", "id": "instrument-w1", "extended": "Y", "state": "pi", "event": ["w1"],
         "expect": {"probability": 0.45, "measure": [0.35, 0.10], "posterior": [7 / 9, 2 / 9]}},
        {"op": "condition", "id": "posterior-w1", "extended": "Y", "state": "pi", "event": ["w1"],
         "as": "post_w1"},
        {"op": "check", "id": "instrument_total", "check": "instrument_total", "extended": "Y", "state": "pi"},
        {"op": "sample", "id": "sample-K", "observable": "K", "state": "pi"},
        {"op": "sample", "id": "sample-Y", "extended": "Y", "state": "pi"},
    ],
}

LUEDERS_QUBIT = {
    "name": "lueders-qubit",
    "seed": 7,
    "trials": 1_000_000,
    "povms": {
        "Z": {
            "outcomes": ["0", "1"],
            "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
        }
    },
    "densities": {"plus": {"pure": [1, 1]}},
    "instruments": {
        "L": {
            "outcomes": ["0", "1"],
            "kraus": [[[[1, 0], [0, 0]]], [[[0, 0], [0, 1]]]],
        }
    },
    "frames": {"F": {"vectors": [[1, 0], [0, 1], [1, 1]], "labels": ["zero", "one", "plus"]}},
    "states": {
        "on_plus": {"space": ["zero", "one", "plus"], "weights": [0, 0, 1]},
        "mixed": {"space": ["zero", "one", "plus"], "weights": [0.25, 0.25, 0.5]},
    },
    "pipeline": [
        {"op": "born", "id": "born-plus", "povm": "Z", "density": "plus",
         "expect": {"probabilities": [0.5, 0.5]}},
        {"op": "state_update", "id": "update-0", "instrument": "L", "density": "plus", "event": ["0"],
         "expect": {"probability": 0.5, "state": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}},
        {"op": "check", "id": "choi", "check": "choi_positive", "instrument": "L"},
        {"op": "check", "id": "trace-preserving", "check": "trace_preserving", "instrument": "L",
         "samples": 100},
        {"op": "lueders", "id": "frame-instrument", "instrument": "L", "frame": "F", "as": "Yq"},
        {"op": "condition", "id": "posterior-plus-0", "extended": "Yq", "state": "on_plus",
         "event": ["0"], "expect": {"probability": 0.5, "posterior": [1.0, 0.0]}},
        {"op": "posterior_mean", "id": "mean-mixed-0", "extended": "Yq", "state": "mixed",
         "event": ["0"], "embedding": "Yq.out"},
        {"op": "sample", "id": "sample-Yq", "extended": "Yq", "state": "mixed",
         "born_povm": "Z", "frame": "F"},
    ],
}

CONSECUTIVE = {
    "name": "consecutive",
    "seed": 99,
    "trials": 1_000_000,
    "spaces": {"Theta": ["t1", "t2"], "Omega1": ["w1", "w2"], "Omega2": ["a", "b"]},
    "states": {"pi": {"space": "Theta", "weights": [0.3, 0.7]}},
    "extended": {
        "Y1": {
            "outcome_space": "Omega1",
            "out_info_space": "Theta",
            "in_info_space": "Theta",
            "kernel": [[[0.7, 0.0], [0.0, 0.2]], [[0.3, 0.0], [0.0, 0.8]]],
        },
        # noisy readout that resets the system to the reported value
        "Y2": {
            "outcome_space": "Omega2",
            "out_info_space": "Theta",
            "in_info_space": "Theta",
            "kernel": [[[0.9, 0.1], [0.0, 0.0]], [[0.0, 0.0], [0.1, 0.9]]],
        },
    },
    "pipeline": [
        {"op": "compose", "id": "compose", "first": "Y1", "second": "Y2", "as": "Y12"},
        {"op": "instrument", "id": "rect-w1-a", "extended": "Y12", "state": "pi",
         "event": {"rect": [["w1"], ["a"]]}},
        {"op": "marginals", "id": "marginals", "extended": "Y12"},
        {"op": "check", "id": "instrument_total", "check": "instrument_total", "extended": "Y12", "state": "pi"},
        {"op": "check", "id": "perturbing", "check": "non_perturbing", "extended": "Y12",
         "expected": False},
        {"op": "sample", "id": "sequential", "sequence": ["Y1", "Y2"], "state": "pi"},
    ],
}

DEMOS = {
    "classical-2x2": CLASSICAL_2X2,
    "lueders-qubit": LUEDERS_QUBIT,
    "consecutive": CONSECUTIVE,
}


def demo_config(name: str) -> dict:
    if name not in DEMOS:
        raise KeyError(f"unknown demo {name!r}; choose from {sorted(DEMOS)}")
    return copy.deepcopy(DEMOS[name])
