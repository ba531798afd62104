"""Acceptance gate: ten criteria, each run at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v`` for the pytest view, or
``python tests/test_acceptance.py`` for one PASS/FAIL line per criterion.
Both print the summary lines.
"""

import itertools
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import labels, random_extended, random_observable, random_state  # noqa: E402

from measurekit import (  # noqa: E402
    EmbeddedSpace,
    Event,
    ExtendedObservable,
    MeanState,
    check_prelinear,
    classical_readout,
    compose,
    dirac,
    image_observable,
    instrument_apply,
    is_image,
    is_non_perturbing,
    is_trivial,
    marginal,
    mean_instrument_apply,
    mean_state,
    mix,
    observable_from_experiment,
    outcome_distribution,
    outcome_marginal,
    posterior_mean,
    posterior_state,
    product,
    product_extended,
    pull_back,
    relation,
    trivial_observable,
)
from measurekit.errors import ZeroProbabilityEvent  # noqa: E402
from measurekit.harness import SamplingConfig, monte_carlo_oracle, parse_config, run_config  # noqa: E402
from measurekit.harness.cli import main  # noqa: E402
from measurekit.harness.demos import demo_config  # noqa: E402
from measurekit.instruments import event_probability  # noqa: E402
from measurekit.mean_states import mixture_relation, posterior_mean_ratio  # noqa: E402
from measurekit.measure_core import state  # noqa: E402
from measurekit.observables import kernel_oracle  # noqa: E402
from measurekit.quantum import (  # noqa: E402
    DensityMatrix,
    born_distribution,
    choi_from_map,
    choi_matrix,
    computational_povm,
    frame,
    instrument_state_update,
    lueders_extended_observable,
    min_eigenvalue,
    projective_instrument,
    random_kraus_instrument,
    to_embedded_space,
    unflatten_operator,
)

SUMMARY: list[str] = []


class Outcome:
    """Collects named sub-results for one criterion."""

    def __init__(self, key: str, title: str):
        self.key, self.title = key, title
        self.failures: list[str] = []
        self.notes: list[str] = []
        self.start = time.perf_counter()

    def require(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def finish(self, time_limit: float | None = None) -> None:
        elapsed = time.perf_counter() - self.start
        if time_limit is not None:
            self.require(elapsed <= time_limit, f"runtime {elapsed:.1f}s > {time_limit:.0f}s")
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.notes + self.failures)
        line = f"[{status}] {self.key} {self.title} ({elapsed:.2f}s) {detail}".rstrip()
        SUMMARY.append(line)
        print(line)
        assert not self.failures, line


def brute_compose(k1, k2):
    n1, n_mid, n_in = k1.shape
    n2, n_out, _ = k2.shape
    out = np.zeros((n1 * n2, n_out, n_in))
    for a, b, o, i in itertools.product(range(n1), range(n2), range(n_out), range(n_in)):
        total = 0.0
        for s in range(n_mid):
            total += k2[b, o, s] * k1[a, s, i]
        out[a * n2 + b, o, i] = total
    return out


def brute_factorizes(kernel, tol=1e-12):
    n_omega, n_out, n_in = kernel.shape
    m = kernel.sum(axis=1)
    s = kernel.sum(axis=0)
    return all(
        abs(kernel[w, o, i] - m[w, i] * s[o, i]) <= tol
        for w, o, i in itertools.product(range(n_omega), range(n_out), range(n_in))
    )


def test_c01_affinity():
    out = Outcome("C1", "affinity of outcome distributions")
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        obs = random_observable(rng, int(rng.integers(1, 51)), int(rng.integers(1, 51)))
        p1, p2 = random_state(rng, obs.info_space), random_state(rng, obs.info_space)
        a = float(rng.uniform())
        lhs = outcome_distribution(obs, mix([p1, p2], [a, 1 - a])).probabilities
        d1 = outcome_distribution(obs, p1).probabilities
        d2 = outcome_distribution(obs, p2).probabilities
        rhs = a * d1 + (1 - a) * d2
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    out.note(f"max residual {worst:.2e} over 1000 instances")
    out.require(worst <= 1e-12, "residual above 1e-12")
    out.finish(time_limit=5.0)


def test_c02_representation():
    out = Outcome("C2", "representation round trip")
    rng = np.random.default_rng(202)
    for _ in range(50):
        obs = random_observable(rng, int(rng.integers(1, 10)), int(rng.integers(1, 10)))
        rebuilt = observable_from_experiment(kernel_oracle(obs))
        out.require(np.array_equal(rebuilt.kernel, obs.kernel), "kernel oracle not reproduced exactly")

    obs = random_observable(np.random.default_rng(7), 4, 4)
    cfg = SamplingConfig(trials=1_000_000, seed=2024)
    est = observable_from_experiment(
        monte_carlo_oracle(obs, cfg), n_checks=5, affinity_tol=0.01, renormalize=True
    )
    sigma = np.sqrt(obs.kernel * (1 - obs.kernel) / cfg.trials)
    z = np.abs(est.kernel - obs.kernel) / sigma
    out.note(f"Monte Carlo 4x4 max |z| {z.max():.2f}")
    out.require(bool(np.all(z <= 4.0)), "Monte Carlo entry outside 4 sigma")
    out.finish(time_limit=60.0)


def test_c03_image_trivial_calculus():
    out = Outcome("C3", "image and trivial calculus")
    rng = np.random.default_rng(303)
    for _ in range(100):
        n_in, n_out = int(rng.integers(1, 12)), int(rng.integers(1, 12))
        f = tuple(int(x) for x in rng.integers(n_out, size=n_in))
        obs = image_observable(labels("t", n_in), labels("w", n_out), f)
        out.require(is_image(obs) == f, "image round trip")

    for make_trivial in [True, False] * 25:
        theta = labels("t", int(rng.integers(2, 8)))
        n_out = int(rng.integers(2, 8))
        if make_trivial:
            obs = trivial_observable(theta, random_state(rng, labels("w", n_out)))
        else:
            obs = random_observable(rng, n_out, theta.size, theta=theta)
        dists = [outcome_distribution(obs, random_state(rng, theta)).probabilities for _ in range(50)]
        invariant = max(float(np.abs(d - dists[0]).max()) for d in dists) <= 1e-12
        out.require(is_trivial(obs) == invariant == make_trivial, "trivial classification")

    for _ in range(100):
        n_src, n_mid, n_out = (int(x) for x in rng.integers(1, 10, size=3))
        phi = [int(x) for x in rng.integers(n_mid, size=n_src)]
        psi = [int(x) for x in rng.integers(n_out, size=n_mid)]
        src, mid, tgt = labels("s", n_src), labels("m", n_mid), labels("o", n_out)
        pulled = pull_back(image_observable(mid, tgt, psi), image_observable(src, mid, phi))
        expected = image_observable(src, tgt, [psi[phi[i]] for i in range(n_src)])
        out.require(np.array_equal(pulled.kernel, expected.kernel), "pull_back does not compose maps")
    out.finish()


def test_c04_product_marginal():
    out = Outcome("C4", "product and marginal identities")
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(100):
        a, b, n = (int(x) for x in rng.integers(1, 21, size=3))
        theta = labels("t", n)
        o1 = random_observable(rng, a, n, theta=theta)
        o2 = random_observable(rng, b, n, omega=labels("v", b), theta=theta)
        joint = product(o1, o2)
        worst = max(
            worst,
            float(np.abs(marginal(joint, 1).kernel - o1.kernel).max()),
            float(np.abs(marginal(joint, 2).kernel - o2.kernel).max()),
        )
    out.note(f"max residual {worst:.2e}")
    out.require(worst <= 1e-12, "marginal differs from factor")
    out.finish()


def test_c05_instruments():
    out = Outcome("C5", "instrument consistency")
    rng = np.random.default_rng(505)
    worst_total, worst_norm = 0.0, 0.0
    for _ in range(500):
        n_omega, n_out, n_in = (int(x) for x in rng.integers(1, 11, size=3))
        y = random_extended(rng, n_omega, n_out, n_in)
        pi = random_state(rng, y.in_info_space)
        ev = Event(y.outcome_space, rng.random(n_omega) < 0.5)
        mu = float(outcome_distribution(outcome_marginal(y), pi).probabilities[ev.mask].sum())
        measure = instrument_apply(y, ev, pi.as_measure())
        worst_total = max(worst_total, abs(mu - measure.total))
        if measure.total > 1e-12:
            post = posterior_state(y, ev, pi)
            worst_norm = max(worst_norm, abs(post.probabilities.sum() - 1.0))
    out.note(f"probability residual {worst_total:.2e}, posterior norm residual {worst_norm:.2e}")
    out.require(worst_total <= 1e-12 and worst_norm <= 1e-12, "residual above 1e-12")

    y = random_extended(rng, 3, 2, 2)
    try:
        posterior_state(y, Event.empty(y.outcome_space), random_state(rng, y.in_info_space))
        out.require(False, "no error for an empty event")
    except ZeroProbabilityEvent:
        pass
    readout = classical_readout(labels("t", 2))
    try:
        posterior_state(readout, Event.atom(readout.outcome_space, 1), dirac(readout.in_info_space, 0))
        out.require(False, "no error for a null atom")
    except ZeroProbabilityEvent:
        pass
    out.finish()


def test_c06_composition():
    out = Outcome("C6", "consecutive composition")
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(100):
        n1, n2, n_in, n_mid, n_out = (int(x) for x in rng.integers(1, 9, size=5))
        mid = labels("m", n_mid)
        y1 = random_extended(rng, n1, n_mid, n_in, out=mid)
        y2 = random_extended(rng, n2, n_out, n_mid, omega=labels("v", n2), inp=mid)
        diff = compose(y1, y2).kernel - brute_compose(y1.kernel, y2.kernel)
        worst = max(worst, float(np.abs(diff).max()))
    out.note(f"brute-force residual {worst:.2e}")
    out.require(worst <= 1e-12, "compose differs from four-index sum")

    cfg = demo_config("consecutive")
    cfg["pipeline"] = [s for s in cfg["pipeline"] if s["op"] == "sample"]
    report = run_config(parse_config(cfg), trials=1_000_000)
    zs = [abs(c["z"]) for c in report.comparisons]
    out.note(f"demo sequential sampling max |z| {max(zs):.2f} over {len(zs)} quantities")
    out.require(report.passed and max(zs) <= 4.0, "sequential sampling outside 4 sigma")
    out.finish()


def test_c07_non_perturbing():
    out = Outcome("C7", "non-perturbing signature")
    rng = np.random.default_rng(707)
    worst = 0.0
    correct = 0
    for _ in range(50):
        n_omega, n_out, n_in = (int(x) for x in rng.integers(1, 7, size=3))
        m = random_observable(rng, n_omega, n_in)
        s = random_observable(rng, n_out, n_in, omega=labels("o", n_out), theta=m.info_space)
        y = product_extended(m, s)
        correct += is_non_perturbing(y) and brute_factorizes(y.kernel)
        for a in range(n_in):
            prior = dirac(m.info_space, a)
            full = posterior_state(y, Event.full(y.outcome_space), prior).probabilities
            for mask in itertools.product([False, True], repeat=n_omega):
                ev = Event(y.outcome_space, np.array(mask))
                if event_probability(y, ev, prior) <= 1e-15:
                    continue
                worst = max(worst, float(np.abs(posterior_state(y, ev, prior).probabilities - full).max()))
    for _ in range(50):
        n_omega, n_out, n_in = (int(x) for x in rng.integers(2, 7, size=3))
        y = random_extended(rng, n_omega, n_out, n_in)
        correct += (not is_non_perturbing(y)) and (not brute_factorizes(y.kernel))
    out.note(f"{correct}/100 classified, Dirac posterior spread {worst:.2e}")
    out.require(correct == 100, "misclassified instance")
    out.require(worst <= 1e-12, "posterior depends on the event")
    out.finish()


def test_c08_mean_states():
    out = Outcome("C8", "mean-state suite")
    rng = np.random.default_rng(808)
    worst = 0.0
    for _ in range(200):
        n_omega, n_out, n_in = (int(x) for x in rng.integers(1, 7, size=3))
        y = random_extended(rng, n_omega, n_out, n_in)
        dim = int(rng.integers(1, 5))
        payloads = np.hstack([np.ones((n_out, 1)), rng.uniform(-1, 1, size=(n_out, dim))])
        functional = np.eye(dim + 1)[0]
        bound = float(np.linalg.norm(payloads, axis=1).max())
        emb_out = EmbeddedSpace(y.out_info_space, payloads, functional, bound)
        emb_in = EmbeddedSpace(y.in_info_space, np.eye(n_in), np.ones(n_in), 1.0)
        pi = random_state(rng, y.in_info_space)
        ev = Event(y.outcome_space, rng.random(n_omega) < 0.6)
        if event_probability(y, ev, pi) <= 1e-9:
            continue
        a = posterior_mean(y, ev, pi, emb_out).vector
        b = posterior_mean_ratio(y, ev, pi, emb_in, emb_out).vector
        worst = max(worst, float(np.abs(a - b).max()))
    out.note(f"two-route residual {worst:.2e}")
    out.require(worst <= 1e-12, "posterior mean routes disagree")

    # pre-linear instances over a frame with a midpoint
    triple = labels("t", 3)
    emb_in = EmbeddedSpace(triple, [[1, 0], [0, 1], [0.5, 0.5]], [1, 1], 1.0)
    rels = [relation(emb_in, 2, [0.5, 0.5, 0.0])]
    worst_aff = 0.0
    for _ in range(100):
        n_omega = int(rng.integers(1, 5))
        base = random_extended(rng, n_omega, 2, 2)
        k = np.dstack([base.kernel, 0.5 * (base.kernel[..., :1] + base.kernel[..., 1:])])
        y = ExtendedObservable(base.outcome_space, base.out_info_space, triple, k)
        emb_out = EmbeddedSpace(y.out_info_space, np.eye(2), np.ones(2), 1.0)
        out.require(check_prelinear(y, emb_in, emb_out, rels), "constructed instance not pre-linear")
        ev = Event(y.outcome_space, rng.random(n_omega) < 0.6)
        e1, e2 = MeanState(rng.dirichlet([1, 1])), MeanState(rng.dirichlet([1, 1]))
        alpha = float(rng.uniform())
        mixed = MeanState(alpha * e1.vector + (1 - alpha) * e2.vector)

        def prob(eta):
            try:
                return mean_instrument_apply(y, ev, eta, emb_in, emb_out, rels)[0]
            except ZeroProbabilityEvent:
                return 0.0

        worst_aff = max(worst_aff, abs(prob(mixed) - alpha * prob(e1) - (1 - alpha) * prob(e2)))
    out.note(f"mean-instrument affinity residual {worst_aff:.2e}")
    out.require(worst_aff <= 1e-9, "affinity above 1e-9")

    # witness: equal means, different posterior means
    y = random_extended(np.random.default_rng(1), 2, 2, 3, inp=triple)
    emb_out = EmbeddedSpace(y.out_info_space, np.eye(2), np.ones(2), 1.0)
    pa, pb = state(triple, [0.5, 0.5, 0.0]), state(triple, [0.0, 0.0, 1.0])
    same_mean = np.allclose(mean_state(emb_in, pa).vector, mean_state(emb_in, pb).vector, atol=1e-15)
    ev = Event.atom(y.outcome_space, 0)
    gap = posterior_mean(y, ev, pa, emb_out).vector - posterior_mean(y, ev, pb, emb_out).vector
    gap = float(np.abs(gap).max())
    out.note(f"witness gap {gap:.3f}")
    out.require(same_mean and not check_prelinear(y, emb_in, emb_out, rels) and gap > 1e-6, "no witness")
    out.finish()


def test_c09_quantum():
    out = Outcome("C9", "quantum suite")
    z = computational_povm()
    plus = DensityMatrix.pure([1, 1])
    res = max(
        float(np.abs(born_distribution(z, plus) - [0.5, 0.5]).max()),
        float(np.abs(born_distribution(z, DensityMatrix.pure([1, 0])) - [1.0, 0.0]).max()),
    )
    out.require(res <= 1e-12, "Born values")
    lueders = projective_instrument(np.eye(2))
    p, rho = instrument_state_update(lueders, Event.atom(lueders.outcome_space, 0), plus)
    upd = max(abs(p - 0.5), float(np.abs(rho.matrix - np.diag([1, 0])).max()))
    out.require(upd <= 1e-12, "Lueders update")
    out.note(f"Born residual {res:.1e}, update residual {upd:.1e}")

    rng = np.random.default_rng(909)
    worst_eig = math.inf
    for _ in range(100):
        d_in, d_out, n_w, ops = (int(x) for x in rng.integers(1, 5, size=4))
        instr = random_kraus_instrument(d_in, d_out, n_w, rng, ops_per_outcome=ops)
        worst_eig = min(worst_eig, min(min_eigenvalue(choi_matrix(instr, w)) for w in range(n_w)))
    witness = min_eigenvalue(choi_from_map(lambda t: t.T, 2))
    out.note(f"min Choi eigenvalue {worst_eig:.1e}, transpose witness {witness:.6f}")
    out.require(worst_eig >= -1e-10, "Choi matrix not PSD")
    out.require(abs(witness + 1.0) <= 1e-6, "transpose witness")

    octa = frame(
        [1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j],
        labels=["z+", "z-", "x+", "x-", "y+", "y-"],
    )
    emb_in = to_embedded_space(octa)
    rels = [
        mixture_relation(emb_in, {"z+": 0.5, "z-": 0.5}, {"x+": 0.5, "x-": 0.5}),
        mixture_relation(emb_in, {"z+": 0.5, "z-": 0.5}, {"y+": 0.5, "y-": 0.5}),
    ]
    worst_cross = 0.0
    for _ in range(50):
        n_w = int(rng.integers(1, 4))
        instr = random_kraus_instrument(2, 2, n_w, rng, ops_per_outcome=1)
        y, fr_out = lueders_extended_observable(instr, octa)
        emb_out = to_embedded_space(fr_out)
        pi = random_state(rng, y.in_info_space)
        ev = Event(instr.outcome_space, rng.random(n_w) < 0.7)
        rho_in = octa.density(pi.probabilities)
        if np.trace(instr.operation(ev, rho_in.matrix)).real <= 1e-6:
            continue
        p_q, rho_out = instrument_state_update(instr, ev, rho_in)
        via_y = fr_out.density(posterior_state(y, ev, pi).probabilities).matrix
        prob, eta = mean_instrument_apply(y, ev, mean_state(emb_in, pi), emb_in, emb_out, rels)
        worst_cross = max(
            worst_cross,
            float(np.abs(via_y - rho_out.matrix).max()),
            abs(prob - p_q),
            float(np.abs(unflatten_operator(eta.vector, 2) - rho_out.matrix).max()),
        )
    out.note(f"cross-formalism residual {worst_cross:.1e}")
    out.require(worst_cross <= 1e-10, "formalisms disagree")
    out.finish(time_limit=30.0)


def test_c10_determinism(tmp_path):
    out = Outcome("C10", "harness determinism")
    path = tmp_path / "consecutive.json"
    path.write_text(json.dumps(demo_config("consecutive")))
    blobs = []
    for workers in ("1", "1", "4"):
        target = tmp_path / f"report-{len(blobs)}.json"
        code = main(["run", str(path), "--workers", workers, "--out", str(target)])
        out.require(code == 0, f"run exited {code}")
        blobs.append(target.read_bytes())
    out.note(f"{len(blobs[0])} bytes per report")
    out.require(blobs[0] == blobs[1], "two runs differ")
    out.require(blobs[0] == blobs[2], "workers 1 and 4 differ")
    out.finish()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
