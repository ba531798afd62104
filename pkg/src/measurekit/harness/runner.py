"""File-driven experiment pipelines and their reports.

A config declares named objects (spaces, states, observables, extended
observables, quantum objects) in the :mod:`measurekit.io` formats plus an
ordered ``pipeline`` of steps and an optional ``queries`` list using the same
step vocabulary.  Anywhere a space is expected, a string names an entry of the
``spaces`` table.

Step ops: ``distribution``, ``instrument``, ``condition``, ``compose``,
``marginals``, ``posterior_mean``, ``born``, ``state_update``, ``lueders``,
``check`` and ``sample``.  A step may carry ``"expect": {field: value}`` and
``"tol"``; each expectation becomes a check in the report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .. import io, tolerance
from ..errors import MeasureKitError
from ..instruments import (
    ExtendedObservable,
    compose,
    event_probability,
    instrument_apply,
    is_non_perturbing,
    outcome_marginal,
    posterior_state,
    system_marginal,
)
from ..mean_states import EmbeddedSpace, posterior_mean
from ..measure_core import Event, FiniteSpace, InformationState, measure_of, mix, rectangle
from ..observables import (
    GeneralizedObservable,
    kernel_oracle,
    observable_from_experiment,
    outcome_distribution,
)
from ..quantum import (
    POVM,
    DensityMatrix,
    KrausInstrument,
    PureStateFrame,
    born_distribution,
    born_probability,
    choi_matrix,
    instrument_state_update,
    lueders_extended_observable,
    min_eigenvalue,
    random_density,
    to_embedded_space,
)
from .sampling import (
    SamplingConfig,
    compare,
    sample_collapsed,
    sample_experiment,
    sample_instrument,
    sample_sequential,
    total_variation,
)


class ConfigParseError(MeasureKitError):
    exit_code = 2


class ValidationError(MeasureKitError):
    exit_code = 3


class CheckFailure(MeasureKitError):
    exit_code = 1


SPACE_KEYS = ("space", "outcome_space", "info_space", "out_info_space", "in_info_space", "outcomes")

DECLARATIONS: dict[str, Callable[[Any], Any]] = {
    "states": io.state_from_json,
    "observables": io.observable_from_json,
    "extended": io.extended_from_json,
    "embedded": io.embedded_from_json,
    "povms": io.povm_from_json,
    "densities": io.density_from_json,
    "instruments": io.instrument_from_json,
    "frames": io.frame_from_json,
}

KIND_NAMES = {
    "states": "state",
    "observables": "observable",
    "extended": "extended observable",
    "embedded": "embedded space",
    "povms": "POVM",
    "densities": "density matrix",
    "instruments": "instrument",
    "frames": "frame",
}


@dataclass
class ExperimentConfig:
    name: str
    seed: int
    trials: int
    sigma_bound: float
    spaces: dict[str, FiniteSpace]
    objects: dict[str, dict[str, Any]]
    pipeline: list[dict]
    queries: list[dict]


def _resolve_spaces(data: Any, spaces: dict[str, Any]) -> Any:
    if isinstance(data, dict):
        out = {}
        for key, val in data.items():
            if key in SPACE_KEYS and isinstance(val, str):
                if val not in spaces:
                    raise ValidationError(f"unknown space {val!r}")
                out[key] = spaces[val]
            else:
                out[key] = _resolve_spaces(val, spaces) if key == "factors" else val
        return out
    return data


def parse_config(data: Any) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigParseError("config must be a JSON object")
    for key in ("pipeline", "queries"):
        if not isinstance(data.get(key, []), list):
            raise ConfigParseError(f"{key!r} must be a list of steps")
    for key in ("spaces", *DECLARATIONS):
        if not isinstance(data.get(key, {}), dict):
            raise ConfigParseError(f"{key!r} must be an object mapping names to declarations")
    raw_spaces = data.get("spaces", {})
    spaces: dict[str, FiniteSpace] = {}
    for name, value in raw_spaces.items():
        try:
            spaces[name] = io.space_from_json(value)
        except (KeyError, TypeError) as exc:
            raise ConfigParseError(f"space {name!r}: {exc}") from None
        except MeasureKitError as exc:
            raise ValidationError(f"space {name!r}: {exc}") from None
    objects: dict[str, dict[str, Any]] = {}
    for kind, reader in DECLARATIONS.items():
        objects[kind] = {}
        for name, value in data.get(kind, {}).items():
            label = f"{KIND_NAMES[kind]} {name!r}"
            try:
                objects[kind][name] = reader(_resolve_spaces(value, raw_spaces))
            except (KeyError, TypeError, IndexError) as exc:
                raise ConfigParseError(f"{label}: malformed declaration ({exc})") from None
            except (MeasureKitError, ValueError) as exc:
                raise ValidationError(f"{label}: {exc}") from None
    steps = list(data.get("pipeline", [])) + list(data.get("queries", []))
    for i, step in enumerate(steps):
        if not isinstance(step, dict) or "op" not in step:
            raise ConfigParseError(f"step {i} must be an object with an 'op'")
        if step["op"] not in STEP_OPS:
            raise ConfigParseError(f"step {i}: unknown op {step['op']!r}")
    try:
        seed = int(data.get("seed", 0))
        trials = int(data.get("trials", 1_000_000))
        sigma = float(data.get("sigma_bound", 4.0))
    except (TypeError, ValueError) as exc:
        raise ConfigParseError(f"bad run parameter: {exc}") from None
    return ExperimentConfig(
        name=str(data.get("name", "experiment")),
        seed=seed,
        trials=trials,
        sigma_bound=sigma,
        spaces=spaces,
        objects=objects,
        pipeline=list(data.get("pipeline", [])),
        queries=list(data.get("queries", [])),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(data)


REFERENCE_FIELDS = {
    "observable": "observables",
    "state": "states",
    "extended": "extended",
    "first": "extended",
    "second": "extended",
    "povm": "povms",
    "born_povm": "povms",
    "density": "densities",
    "instrument": "instruments",
    "frame": "frames",
}

DEFINES = {
    "condition": "states",
    "compose": "extended",
    "lueders": "extended",
    "state_update": "densities",
}


def validate_references(cfg: ExperimentConfig) -> None:
    """Check that every name a step uses is declared or defined by an earlier step."""
    known = {kind: set(table) for kind, table in cfg.objects.items()}
    for index, step in enumerate(cfg.pipeline + cfg.queries):
        ident = step.get("id", f"{step['op']}-{index}")
        for key, kind in REFERENCE_FIELDS.items():
            if key in step and step[key] not in known[kind]:
                raise ValidationError(f"step {ident!r}: unknown {KIND_NAMES[kind]} {step[key]!r}")
        for name in step.get("sequence", []):
            if name not in known["extended"]:
                raise ValidationError(f"step {ident!r}: unknown extended observable {name!r}")
        if "embedding" in step and step["embedding"] not in known["embedded"] | known["frames"]:
            raise ValidationError(f"step {ident!r}: unknown embedding {step['embedding']!r}")
        op = step["op"]
        if op == "compose":
            known["extended"].add(str(step.get("as", f"{step.get('first')}*{step.get('second')}")))
        elif op == "lueders":
            name = str(step.get("as", f"{step.get('instrument')}@{step.get('frame')}"))
            known["extended"].add(name)
            known["frames"].add(f"{name}.out")
        elif op == "marginals" and step.get("as"):
            known["observables"] |= {f"{step['as']}.outcome", f"{step['as']}.system"}
        elif op in DEFINES and "as" in step:
            known[DEFINES[op]].add(str(step["as"]))


@dataclass
class Report:
    name: str
    seed: int
    trials: int
    results: list[dict] = field(default_factory=list)
    checks: list[dict] = field(default_factory=list)
    comparisons: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks) and all(c["passed"] for c in self.comparisons)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "trials": self.trials,
            "status": "pass" if self.passed else "fail",
            "results": self.results,
            "checks": self.checks,
            "comparisons": self.comparisons,
        }

    def to_json(self) -> str:
        return json.dumps(_plain(self.to_dict()), indent=2) + "\n"

    def to_table(self) -> str:
        lines = [f"experiment: {self.name}  seed={self.seed}  trials={self.trials}"]
        lines.append(f"status: {'PASS' if self.passed else 'FAIL'}")
        if self.results:
            lines += ["", "results"]
            rows = [(r["id"], r["op"], _summary(r)) for r in self.results]
            lines += _align(("id", "op", "value"), rows)
        if self.checks:
            lines += ["", "checks"]
            rows = [
                (c["name"], "pass" if c["passed"] else "FAIL", _fmt(c["residual"]), _fmt(c["tolerance"]))
                for c in self.checks
            ]
            lines += _align(("check", "status", "residual", "tolerance"), rows)
        if self.comparisons:
            lines += ["", "sampling comparisons"]
            rows = [
                (
                    c["label"], _fmt(c["analytic"]), _fmt(c["empirical"]), str(c["n"]),
                    _fmt(c["z"]), "pass" if c["passed"] else "FAIL",
                )
                for c in self.comparisons
            ]
            lines += _align(("quantity", "analytic", "empirical", "n", "z", "status"), rows)
        return "\n".join(lines) + "\n"


def _fmt(x: Any) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _summary(result: dict) -> str:
    skip = {"id", "op", "step"}
    parts = []
    for key, val in result.items():
        if key in skip:
            continue
        text = json.dumps(_plain(val))
        parts.append(f"{key}={text if len(text) <= 60 else text[:57] + '...'}")
    return "  ".join(parts)


def _align(header: tuple[str, ...], rows: list[tuple[str, ...]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return [fmt.format(*header), fmt.format(*("-" * w for w in widths))] + [fmt.format(*r) for r in rows]


def _plain(x: Any) -> Any:
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


class _Run:
    def __init__(self, cfg: ExperimentConfig, trials: int, workers: int):
        self.cfg = cfg
        self.trials = trials
        self.workers = workers
        self.objects = {kind: dict(table) for kind, table in cfg.objects.items()}
        self.report = Report(cfg.name, cfg.seed, trials)

    def get(self, kind: str, name: Any) -> Any:
        table = self.objects[kind]
        if not isinstance(name, str) or name not in table:
            raise ValidationError(f"step references unknown {KIND_NAMES[kind]} {name!r}")
        return table[name]

    def embedding(self, name: str) -> EmbeddedSpace:
        if name in self.objects["embedded"]:
            return self.objects["embedded"][name]
        return to_embedded_space(self.get("frames", name))

    def event(self, sp: FiniteSpace, desc: Any) -> Event:
        if desc is None or desc == "all":
            return Event.full(sp)
        if isinstance(desc, dict) and "rect" in desc:
            if sp.factors is None or len(desc["rect"]) != len(sp.factors):
                raise ValidationError("rectangle event needs one label list per factor")
            parts = [Event.from_labels(f, labels) for f, labels in zip(sp.factors, desc["rect"])]
            return rectangle(sp, *parts)
        if isinstance(desc, list):
            return Event.from_labels(sp, [str(x) for x in desc])
        raise ValidationError(f"cannot read event {desc!r}")

    def sampling(self, step: dict, index: int) -> SamplingConfig:
        seed = step.get("seed")
        if seed is None:
            seed = int(np.random.SeedSequence([self.cfg.seed, index]).generate_state(1)[0])
        return SamplingConfig(
            trials=int(step.get("trials", self.trials)),
            seed=int(seed),
            workers=self.workers,
        )

    def check(self, name: str, residual: float, tol: float, passed: bool | None = None) -> None:
        ok = bool(residual <= tol) if passed is None else bool(passed)
        self.report.checks.append(
            {"name": name, "passed": ok, "residual": float(residual), "tolerance": float(tol)}
        )

    def compare(self, prefix: str, labels, analytic, counts, n: int, sigma: float) -> None:
        for c in compare([f"{prefix}:{lab}" for lab in labels], analytic, counts, n, sigma):
            self.report.comparisons.append(
                {
                    "label": c.label,
                    "analytic": c.analytic,
                    "empirical": c.empirical,
                    "n": c.n,
                    "z": c.z,
                    "passed": c.passed,
                }
            )


def run_config(
    config: ExperimentConfig | str | Path,
    *,
    seed: int | None = None,
    trials: int | None = None,
    workers: int = 1,
) -> Report:
    """Execute every step in order and collect results, checks and comparisons."""
    cfg = load_config(config) if isinstance(config, (str, Path)) else config
    validate_references(cfg)
    if seed is not None:
        cfg = ExperimentConfig(**{**cfg.__dict__, "seed": int(seed)})
    run = _Run(cfg, cfg.trials if trials is None else int(trials), workers)
    for index, step in enumerate(cfg.pipeline + cfg.queries):
        op = step["op"]
        ident = str(step.get("id", f"{op}-{index}"))
        try:
            result = STEP_OPS[op](run, step, index)
        except ValidationError:
            raise
        except KeyError as exc:
            raise ValidationError(f"step {ident!r} is missing field {exc.args[0]!r}") from None
        except (MeasureKitError, ValueError) as exc:
            run.report.results.append({"id": ident, "op": op, "error": f"{type(exc).__name__}: {exc}"})
            run.check(f"{ident}:completed", math.inf, 0.0, passed=False)
            continue
        result = {"id": ident, "op": op, **result}
        run.report.results.append(_plain(result))
        for key, want in step.get("expect", {}).items():
            if key not in result:
                raise ValidationError(f"step {ident!r} has no result field {key!r} to check")
            got = _as_array(result[key])
            want_arr = _as_array(want)
            tol = float(step.get("tol", tolerance.TOL))
            if got.shape != want_arr.shape:
                run.check(f"{ident}:{key}", math.inf, tol, passed=False)
            else:
                run.check(f"{ident}:{key}", float(np.abs(got - want_arr).max(initial=0.0)), tol)
    return run.report


def _as_array(x: Any) -> np.ndarray:
    return np.asarray(_plain(x), dtype=float)


# ---------------------------------------------------------------------------
# step implementations


def _step_distribution(run: _Run, step: dict, index: int) -> dict:
    obs: GeneralizedObservable = run.get("observables", step["observable"])
    st: InformationState = run.get("states", step["state"])
    dist = outcome_distribution(obs, st)
    return {"outcomes": list(obs.outcome_space.labels), "probabilities": dist.probabilities}


def _step_instrument(run: _Run, step: dict, index: int) -> dict:
    y: ExtendedObservable = run.get("extended", step["extended"])
    st: InformationState = run.get("states", step["state"])
    event = run.event(y.outcome_space, step.get("event"))
    measure = instrument_apply(y, event, st.as_measure())
    result = {
        "event": list(event.labels),
        "probability": measure.total,
        "measure": measure.weights,
    }
    if measure.total > tolerance.ZERO_PROBABILITY:
        result["posterior"] = posterior_state(y, event, st).probabilities
    return result


def _step_condition(run: _Run, step: dict, index: int) -> dict:
    y: ExtendedObservable = run.get("extended", step["extended"])
    st: InformationState = run.get("states", step["state"])
    event = run.event(y.outcome_space, step.get("event"))
    post = posterior_state(y, event, st)
    if "as" in step:
        run.objects["states"][str(step["as"])] = post
    return {
        "event": list(event.labels),
        "probability": event_probability(y, event, st),
        "posterior": post.probabilities,
    }


def _step_compose(run: _Run, step: dict, index: int) -> dict:
    y1 = run.get("extended", step["first"])
    y2 = run.get("extended", step["second"])
    y = compose(y1, y2)
    name = str(step.get("as", f"{step['first']}*{step['second']}"))
    run.objects["extended"][name] = y
    return {"name": name, "outcomes": list(y.outcome_space.labels), "kernel": y.kernel}


def _step_marginals(run: _Run, step: dict, index: int) -> dict:
    y = run.get("extended", step["extended"])
    m, s = outcome_marginal(y), system_marginal(y)
    for suffix, obs in (("outcome", m), ("system", s)):
        if step.get("as"):
            run.objects["observables"][f"{step['as']}.{suffix}"] = obs
    return {"outcome_marginal": m.kernel, "system_marginal": s.kernel, "non_perturbing": is_non_perturbing(y)}


def _step_posterior_mean(run: _Run, step: dict, index: int) -> dict:
    y = run.get("extended", step["extended"])
    st = run.get("states", step["state"])
    out_space = run.embedding(step["embedding"])
    event = run.event(y.outcome_space, step.get("event"))
    return {"mean": posterior_mean(y, event, st, out_space).vector}


def _step_born(run: _Run, step: dict, index: int) -> dict:
    povm: POVM = run.get("povms", step["povm"])
    rho: DensityMatrix = run.get("densities", step["density"])
    result: dict = {"outcomes": list(povm.outcome_space.labels), "probabilities": born_distribution(povm, rho)}
    if "event" in step:
        result["probability"] = born_probability(povm, rho, run.event(povm.outcome_space, step["event"]))
    return result


def _step_state_update(run: _Run, step: dict, index: int) -> dict:
    instr: KrausInstrument = run.get("instruments", step["instrument"])
    rho: DensityMatrix = run.get("densities", step["density"])
    event = run.event(instr.outcome_space, step.get("event"))
    p, out = instrument_state_update(instr, event, rho)
    if "as" in step:
        run.objects["densities"][str(step["as"])] = out
    return {"event": list(event.labels), "probability": p, "state": io.density_to_json(out)}


def _step_lueders(run: _Run, step: dict, index: int) -> dict:
    instr: KrausInstrument = run.get("instruments", step["instrument"])
    fr: PureStateFrame = run.get("frames", step["frame"])
    y, fr_out = lueders_extended_observable(instr, fr)
    name = str(step.get("as", f"{step['instrument']}@{step['frame']}"))
    run.objects["extended"][name] = y
    run.objects["frames"][f"{name}.out"] = fr_out
    return {"name": name, "frame_out": io.frame_to_json(fr_out), "kernel": y.kernel}


def _step_check(run: _Run, step: dict, index: int) -> dict:
    kind = step.get("check")
    ident = str(step.get("id", f"check-{index}"))
    rng = np.random.default_rng(np.random.SeedSequence([run.cfg.seed, index]))
    n = int(step.get("samples", 50))
    if kind == "affinity":
        obs = run.get("observables", step["observable"])
        residual = 0.0
        for _ in range(n):
            p1, p2 = (InformationState(obs.info_space, rng.dirichlet(np.ones(obs.info_space.size))) for _ in "ab")
            a = float(rng.uniform())
            lhs = outcome_distribution(obs, mix([p1, p2], [a, 1 - a])).probabilities
            rhs = a * outcome_distribution(obs, p1).probabilities + (1 - a) * outcome_distribution(obs, p2).probabilities
            residual = max(residual, float(np.abs(lhs - rhs).max()))
        run.check(ident, residual, float(step.get("tol", tolerance.TOL)))
        return {"check": kind, "residual": residual}
    if kind == "representation":
        obs = run.get("observables", step["observable"])
        rebuilt = observable_from_experiment(kernel_oracle(obs))
        residual = float(np.abs(rebuilt.kernel - obs.kernel).max())
        run.check(ident, residual, float(step.get("tol", tolerance.TOL)))
        return {"check": kind, "residual": residual}
    if kind == "instrument_total":
        y = run.get("extended", step["extended"])
        st = run.get("states", step["state"])
        m = outcome_marginal(y)
        dist = outcome_distribution(m, st)
        residual = 0.0
        events = [Event.atom(y.outcome_space, w) for w in range(y.outcome_space.size)]
        for ev in events + [Event.full(y.outcome_space)]:
            lhs = measure_of(dist, ev)
            rhs = instrument_apply(y, ev, st.as_measure()).total
            residual = max(residual, abs(lhs - rhs))
        run.check(ident, residual, float(step.get("tol", tolerance.TOL)))
        return {"check": kind, "residual": residual}
    if kind == "non_perturbing":
        y = run.get("extended", step["extended"])
        got = is_non_perturbing(y)
        want = bool(step.get("expected", True))
        run.check(ident, 0.0 if got == want else 1.0, 0.0)
        return {"check": kind, "non_perturbing": got}
    if kind == "choi_positive":
        instr = run.get("instruments", step["instrument"])
        low = min(min_eigenvalue(choi_matrix(instr, w)) for w in range(instr.outcome_space.size))
        run.check(ident, max(0.0, -low), tolerance.EIGEN_TOL)
        return {"check": kind, "min_eigenvalue": low}
    if kind == "trace_preserving":
        instr = run.get("instruments", step["instrument"])
        full = Event.full(instr.outcome_space)
        residual = 0.0
        for _ in range(n):
            rho = random_density(instr.dims[1], rng)
            residual = max(residual, abs(np.trace(instr.operation(full, rho.matrix)).real - 1.0))
        run.check(ident, residual, float(step.get("tol", tolerance.TOL)))
        return {"check": kind, "residual": residual}
    raise ValidationError(f"unknown check {kind!r}")


def _step_sample(run: _Run, step: dict, index: int) -> dict:
    cfg = run.sampling(step, index)
    sigma = float(step.get("sigma", run.cfg.sigma_bound))
    st = run.get("states", step["state"])
    ident = str(step.get("id", f"sample-{index}"))
    if "observable" in step:
        obs = run.get("observables", step["observable"])
        analytic = outcome_distribution(obs, st).probabilities
        two_stage = sample_experiment(obs, st, cfg, keep_records=False)
        run.compare(ident, obs.outcome_space.labels, analytic, two_stage.counts, cfg.trials, sigma)
        collapsed = sample_collapsed(obs, st, cfg)
        tv = total_variation(two_stage.frequencies, collapsed.frequencies)
        run.check(f"{ident}:two-stage-vs-collapsed", tv, sigma * math.sqrt(obs.outcome_space.size / cfg.trials))
        return {"seed": cfg.seed, "trials": cfg.trials, "counts": two_stage.counts, "tv_collapsed": tv}
    if "extended" in step:
        y = run.get("extended", step["extended"])
        sample = sample_instrument(y, st, cfg, keep_records=False)
        joint = np.einsum("woi,i->wo", y.kernel, st.probabilities)
        labels = [f"({w},{o})" for w in y.outcome_space.labels for o in y.out_info_space.labels]
        run.compare(ident, labels, joint.reshape(-1), sample.joint_counts.reshape(-1), cfg.trials, sigma)
        for w, wl in enumerate(y.outcome_space.labels):
            n_w = int(sample.joint_counts[w].sum())
            if n_w == 0 or joint[w].sum() <= tolerance.ZERO_PROBABILITY:
                continue
            post = posterior_state(y, Event.atom(y.outcome_space, w), st).probabilities
            run.compare(
                f"{ident}|{wl}", y.out_info_space.labels, post, sample.joint_counts[w], n_w, sigma
            )
        if "born_povm" in step and "frame" in step:
            povm = run.get("povms", step["born_povm"])
            fr = run.get("frames", step["frame"])
            born = born_distribution(povm, fr.density(st.probabilities))
            run.compare(f"{ident}:born", povm.outcome_space.labels, born, sample.outcome_counts, cfg.trials, sigma)
        return {"seed": cfg.seed, "trials": cfg.trials, "joint_counts": sample.joint_counts}
    if "sequence" in step:
        ys = [run.get("extended", name) for name in step["sequence"]]
        sample = sample_sequential(ys, st, cfg)
        composed = ys[0]
        for y in ys[1:]:
            composed = compose(composed, y)
        analytic = outcome_distribution(outcome_marginal(composed), st).probabilities
        run.compare(
            ident, composed.outcome_space.labels, analytic, sample.outcome_counts.reshape(-1), cfg.trials, sigma
        )
        final = outcome_distribution(system_marginal(composed), st).probabilities
        run.compare(f"{ident}:final", composed.out_info_space.labels, final, sample.final_counts, cfg.trials, sigma)
        return {"seed": cfg.seed, "trials": cfg.trials, "outcome_counts": sample.outcome_counts.reshape(-1)}
    raise ValidationError(f"sample step {ident!r} needs 'observable', 'extended' or 'sequence'")


STEP_OPS: dict[str, Callable[[_Run, dict, int], dict]] = {
    "distribution": _step_distribution,
    "instrument": _step_instrument,
    "condition": _step_condition,
    "compose": _step_compose,
    "marginals": _step_marginals,
    "posterior_mean": _step_posterior_mean,
    "born": _step_born,
    "state_update": _step_state_update,
    "lueders": _step_lueders,
    "check": _step_check,
    "sample": _step_sample,
}
