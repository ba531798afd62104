"""Projective qubit measurement seen three ways: Kraus update, frame instrument, mean state.

    python scripts/lueders_qubit.py --trials 200000
"""

import argparse

import numpy as np

from measurekit import Event, mean_instrument_apply, mean_state, posterior_state, state
from measurekit.harness import SamplingConfig, sample_instrument
from measurekit.mean_states import mixture_relation
from measurekit.quantum import (
    frame,
    instrument_state_update,
    lueders_extended_observable,
    projective_instrument,
    to_embedded_space,
    unflatten_operator,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    instr = projective_instrument(np.eye(2))
    octa = frame(
        [1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j],
        labels=["z+", "z-", "x+", "x-", "y+", "y-"],
    )
    y, out = lueders_extended_observable(instr, octa)
    emb_in, emb_out = to_embedded_space(octa), to_embedded_space(out)
    rels = [
        mixture_relation(emb_in, {"z+": 0.5, "z-": 0.5}, {"x+": 0.5, "x-": 0.5}),
        mixture_relation(emb_in, {"z+": 0.5, "z-": 0.5}, {"y+": 0.5, "y-": 0.5}),
    ]
    pi = state(octa.space, [0.1, 0.0, 0.6, 0.0, 0.3, 0.0])
    rho = octa.density(pi.probabilities)
    ev = Event.atom(instr.outcome_space, 0)

    p, rho_out = instrument_state_update(instr, ev, rho)
    via_frame = out.density(posterior_state(y, ev, pi).probabilities).matrix
    prob, eta = mean_instrument_apply(y, ev, mean_state(emb_in, pi), emb_in, emb_out, rels)
    np.set_printoptions(precision=4, suppress=True)
    print("input density\n", rho.matrix)
    print(f"Kraus route: p = {p:.6f}\n", rho_out.matrix)
    print("frame route posterior\n", via_frame)
    print(f"mean route: p = {prob:.6f}\n", unflatten_operator(eta.vector, 2))

    sample = sample_instrument(y, pi, SamplingConfig(trials=args.trials, seed=args.seed))
    print(f"sampled outcome frequencies {sample.outcome_counts / args.trials}")


if __name__ == "__main__":
    main()
