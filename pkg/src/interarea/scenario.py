"""Scenario documents: JSON parsing, validation, serialization and built-ins.

A scenario is one JSON object with the top-level keys ``buses``, ``lines``,
``areas``, ``generators``, ``model``, ``analysis`` and ``simulation`` (plus
optional ``name`` and ``description``).  See ``docs/scenario-format.md``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import IoError, ParseError, SchemaError, ValidationError
from .modal import THRESHOLD, ZERO_TOL
from .network import GENERATOR, LOAD, Bus, GeneratorParams, Line, NetworkModel, OperatingPoint, build_network
from .statespace import FULL, OMEGA, REDUCED, StateLabel, StateSpaceModel
from .timesim import DEFAULT_HORIZON, PERTURBATION, InputSignal, default_initial_state, mode_shape_state

TOP_LEVEL = ("buses", "lines", "areas", "generators", "model", "analysis", "simulation")
GEN_DEFAULTS = {"D": 0.0, "T_t": 1e6, "T_g": 1e6, "K_t": 1.0, "r": 0.05}
X0_KINDS = ("default", "zero", "perturbation", "mode", "vector")


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    network: NetworkModel
    operating_point: OperatingPoint = field(default_factory=OperatingPoint)
    form: str = REDUCED
    zero_tol: float = ZERO_TOL
    threshold: float = THRESHOLD
    step: float | None = None
    horizon: float = DEFAULT_HORIZON
    allow_large_step: bool = False
    x0: dict = field(default_factory=lambda: {"kind": "default"})
    signal: InputSignal = field(default_factory=InputSignal)
    description: str = ""

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return scenario_to_dict(self) == scenario_to_dict(other)

    def initial_state(self, model: StateSpaceModel) -> np.ndarray:
        """Resolve the ``x0`` specification against ``model``."""
        spec = self.x0
        kind = spec.get("kind", "default")
        value = spec.get("value", PERTURBATION)
        if kind == "default":
            return default_initial_state(model, self.network, value)
        if kind == "zero":
            return np.zeros(model.n_states)
        if kind == "perturbation":
            x0 = np.zeros(model.n_states)
            x0[model.index(spec["state"])] = value
            return x0
        if kind == "mode":
            return mode_shape_state(model, 1j * float(spec["frequency"]), value)
        x0 = np.zeros(model.n_states)
        for label, v in spec["values"].items():
            x0[model.index(label)] = v
        return x0


def _num(problems, path, value, positive=False, nonneg=False, optional=False):
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        problems.append((path, f"expected a finite number, got {value!r}"))
        return None
    if positive and not value > 0:
        problems.append((path, f"must be positive, got {value!r}"))
        return None
    if nonneg and not value >= 0:
        problems.append((path, f"must be non-negative, got {value!r}"))
        return None
    return float(value)


def _obj(problems, path, value):
    if not isinstance(value, dict):
        problems.append((path, "expected an object"))
        return {}
    return value


def _list(problems, path, value):
    if not isinstance(value, list):
        problems.append((path, "expected an array"))
        return []
    return value


def parse_scenario(source) -> Scenario:
    """Parse a scenario from a path, a JSON string, a dict or a built-in name.

    All schema violations are collected and reported together in one
    :class:`SchemaError`; network-level problems (unknown buses, islanded
    areas) surface as the corresponding :class:`ValidationError`.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = _read_source(source)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed scenario JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError([("$", "scenario must be a JSON object")])

    problems = []
    for key in TOP_LEVEL:
        if key not in doc:
            problems.append((key, "missing"))
    unknown = set(doc) - set(TOP_LEVEL) - {"name", "description"}
    for key in sorted(unknown):
        problems.append((key, "unknown key"))

    gens_doc = _obj(problems, "generators", doc.get("generators", {}))
    gens = {}
    for gid, g in gens_doc.items():
        path = f"generators.{gid}"
        g = _obj(problems, path, g)
        bad = set(g) - {"M", *GEN_DEFAULTS}
        for k in sorted(bad):
            problems.append((f"{path}.{k}", "unknown generator parameter"))
        if "M" not in g:
            problems.append((f"{path}.M", "missing"))
        vals = {"M": _num(problems, f"{path}.M", g.get("M"), positive=True)}
        for k, default in GEN_DEFAULTS.items():
            vals[k] = _num(problems, f"{path}.{k}", g.get(k, default), positive=(k != "D"), nonneg=(k == "D"))
        if all(v is not None for v in vals.values()):
            gens[str(gid)] = GeneratorParams(**vals)

    buses = []
    for i, b in enumerate(_list(problems, "buses", doc.get("buses", []))):
        path = f"buses[{i}]"
        b = _obj(problems, path, b)
        if "id" not in b:
            problems.append((f"{path}.id", "missing"))
            continue
        bid = str(b["id"])
        kind = b.get("kind", GENERATOR)
        if kind not in (GENERATOR, LOAD):
            problems.append((f"{path}.kind", f"must be '{GENERATOR}' or '{LOAD}'"))
            continue
        load = _num(problems, f"{path}.load", b.get("load", 0.0))
        if kind == GENERATOR and bid not in gens:
            if bid not in gens_doc:
                problems.append((f"{path}", f"generator bus {bid!r} has no entry under 'generators'"))
            continue
        if kind == LOAD and bid in gens_doc:
            problems.append((f"generators.{bid}", f"bus {bid!r} is a load-only bus"))
            continue
        buses.append(Bus(bid, kind, gens.get(bid) if kind == GENERATOR else None, load or 0.0))
    bus_ids = {str(b.get("id")) for b in doc.get("buses", []) if isinstance(b, dict)}
    for gid in gens_doc:
        if str(gid) not in bus_ids:
            problems.append((f"generators.{gid}", "no bus with this id"))

    lines = []
    for i, ln in enumerate(_list(problems, "lines", doc.get("lines", []))):
        path = f"lines[{i}]"
        ln = _obj(problems, path, ln)
        for k in ("from", "to", "x"):
            if k not in ln:
                problems.append((f"{path}.{k}", "missing"))
        if not {"from", "to", "x"} <= set(ln):
            continue
        x = _num(problems, f"{path}.x", ln["x"], positive=True)
        if str(ln["from"]) == str(ln["to"]):
            problems.append((path, "line endpoints must differ"))
            continue
        if x is not None:
            lines.append(Line(ln["from"], ln["to"], x))

    areas_doc = _obj(problems, "areas", doc.get("areas", {}))
    areas = {}
    for aid, members in areas_doc.items():
        members = _list(problems, f"areas.{aid}", members)
        areas[str(aid)] = [str(m) for m in members]

    model = _obj(problems, "model", doc.get("model", {}))
    form = model.get("form", REDUCED)
    if form not in (FULL, REDUCED):
        problems.append(("model.form", f"must be '{FULL}' or '{REDUCED}'"))
    op_doc = _obj(problems, "model.operating_point", model.get("operating_point", {}))
    delta = _obj(problems, "model.operating_point.delta", op_doc.get("delta", {}))
    v = _obj(problems, "model.operating_point.v", op_doc.get("v", {}))
    for k, val in delta.items():
        _num(problems, f"model.operating_point.delta.{k}", val)
    for k, val in v.items():
        _num(problems, f"model.operating_point.v.{k}", val, positive=True)

    analysis = _obj(problems, "analysis", doc.get("analysis", {}))
    zero_tol = _num(problems, "analysis.zero_tol", analysis.get("zero_tol", ZERO_TOL), positive=True)
    threshold = _num(problems, "analysis.threshold", analysis.get("threshold", THRESHOLD), positive=True)
    if threshold is not None and threshold > 1:
        problems.append(("analysis.threshold", "must not exceed 1"))

    sim = _obj(problems, "simulation", doc.get("simulation", {}))
    step = _num(problems, "simulation.step", sim.get("step"), positive=True, optional=True)
    horizon = _num(problems, "simulation.horizon", sim.get("horizon", DEFAULT_HORIZON), positive=True)
    allow = sim.get("allow_large_step", False)
    if not isinstance(allow, bool):
        problems.append(("simulation.allow_large_step", "expected true or false"))
    x0 = _parse_x0(problems, sim.get("x0", {"kind": "default"}))
    signal = _parse_input(problems, sim.get("input", {"kind": "zero"}))

    if problems:
        raise SchemaError(problems)

    network = build_network(buses, lines, areas)
    _check_references(network, form, x0, signal)
    try:
        op = OperatingPoint(delta, v)
    except ValidationError as exc:
        raise SchemaError([("model.operating_point", str(exc))]) from None
    return Scenario(
        name=str(doc.get("name", "")),
        network=network,
        operating_point=op,
        form=form,
        zero_tol=zero_tol,
        threshold=threshold,
        step=step,
        horizon=horizon,
        allow_large_step=allow,
        x0=x0,
        signal=signal,
        description=str(doc.get("description", "")),
    )


def _parse_x0(problems, spec):
    spec = _obj(problems, "simulation.x0", spec)
    kind = spec.get("kind", "default")
    if kind not in X0_KINDS:
        problems.append(("simulation.x0.kind", f"must be one of {', '.join(X0_KINDS)}"))
        return {"kind": "default"}
    out = {"kind": kind}
    if kind in ("default", "perturbation", "mode") and "value" in spec:
        out["value"] = _num(problems, "simulation.x0.value", spec["value"])
    if kind == "perturbation":
        if "state" not in spec:
            problems.append(("simulation.x0.state", "missing"))
        else:
            out["state"] = str(spec["state"])
    if kind == "mode":
        out["frequency"] = _num(problems, "simulation.x0.frequency", spec.get("frequency"), positive=True)
    if kind == "vector":
        vals = _obj(problems, "simulation.x0.values", spec.get("values", {}))
        out["values"] = {str(k): _num(problems, f"simulation.x0.values.{k}", x) for k, x in vals.items()}
    return out


def _parse_input(problems, spec):
    spec = _obj(problems, "simulation.input", spec)
    kind = spec.get("kind", "zero")
    if kind not in ("zero", "step", "sinusoid"):
        problems.append(("simulation.input.kind", "must be 'zero', 'step' or 'sinusoid'"))
        return InputSignal()
    if kind == "zero":
        return InputSignal()
    amp = _num(problems, "simulation.input.amplitude", spec.get("amplitude"))
    omega = _num(problems, "simulation.input.omega", spec.get("omega", 0.0), positive=(kind == "sinusoid"))
    start = _num(problems, "simulation.input.start", spec.get("start", 0.0), nonneg=True)
    if "bus" not in spec:
        problems.append(("simulation.input.bus", "missing"))
        return InputSignal()
    if None in (amp, omega, start):
        return InputSignal()
    return InputSignal(kind, amp, omega, start, str(spec["bus"]))


def _check_references(network, form, x0, signal):
    problems = []
    gens = set(network.generator_ids)
    tags = (OMEGA, "P_t", "a", "P_G") if form == FULL else (OMEGA, "P_G")

    def check_label(path, text):
        try:
            label = StateLabel.parse(text)
        except ValueError:
            problems.append((path, f"not a state label: {text!r}"))
            return
        if label.generator not in gens or label.tag not in tags:
            problems.append((path, f"no state {text!r} in a {form} model"))

    if x0["kind"] == "perturbation":
        check_label("simulation.x0.state", x0["state"])
    if x0["kind"] == "vector":
        for k in x0["values"]:
            check_label(f"simulation.x0.values.{k}", k)
    if signal.active and signal.bus not in network.bus_ids:
        problems.append(("simulation.input.bus", f"no bus {signal.bus!r}"))
    if problems:
        raise SchemaError(problems)


def scenario_to_dict(s: Scenario) -> dict:
    """Inverse of :func:`parse_scenario`, with every default written out."""
    net = s.network
    doc = {
        "name": s.name,
        "description": s.description,
        "buses": [{"id": b.id, "kind": b.kind, "load": b.load} for b in net.buses],
        "lines": [{"from": ln.from_bus, "to": ln.to_bus, "x": ln.x} for ln in net.lines],
        "areas": {a: list(m) for a, m in net.areas.items()},
        "generators": {
            b.id: {"M": b.generator.M, "D": b.generator.D, "T_t": b.generator.T_t, "T_g": b.generator.T_g,
                   "K_t": b.generator.K_t, "r": b.generator.r}
            for b in net.buses if b.generator is not None
        },
        "model": {"form": s.form, "operating_point": {"delta": dict(s.operating_point.delta),
                                                       "v": dict(s.operating_point.v)}},
        "analysis": {"zero_tol": s.zero_tol, "threshold": s.threshold},
        "simulation": {"step": s.step, "horizon": s.horizon, "allow_large_step": s.allow_large_step,
                       "x0": dict(s.x0), "input": _input_to_dict(s.signal)},
    }
    return doc


def _input_to_dict(sig: InputSignal) -> dict:
    if sig.kind == "zero":
        return {"kind": "zero"}
    return {"kind": sig.kind, "amplitude": sig.amplitude, "omega": sig.omega, "start": sig.start, "bus": sig.bus}


def scenario_to_json(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def _builtin_dir():
    return resources.files("interarea") / "scenarios"


def builtin_names() -> list[str]:
    return sorted(p.name[:-5] for p in _builtin_dir().iterdir() if p.name.endswith(".json"))


def _read_source(source) -> str:
    if isinstance(source, Path):
        return _read_path(source)
    text = str(source)
    if text.lstrip().startswith("{"):
        return text
    if text in builtin_names():
        return (_builtin_dir() / f"{text}.json").read_text()
    return _read_path(Path(text))


def _read_path(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise IoError(f"cannot read scenario {str(path)!r}: {exc.strerror or exc}") from None


def load_builtin(name: str) -> Scenario:
    if name not in builtin_names():
        raise ValidationError(f"no built-in scenario {name!r}; available: {', '.join(builtin_names())}")
    return parse_scenario(name)
