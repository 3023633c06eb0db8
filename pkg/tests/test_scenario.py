import copy
import json

import numpy as np
import pytest

from interarea import builtin_names, load_builtin, parse_scenario, scenario_to_json
from interarea.errors import IoError, IslandedAreaInterior, ParseError, SchemaError, UnknownBus, ValidationError
from interarea.scenario import scenario_to_dict
from interarea.statespace import build_model

MINIMAL = {
    "buses": [{"id": "1"}, {"id": "2"}],
    "lines": [{"from": "1", "to": "2", "x": 0.1}],
    "areas": {"A": ["1"], "B": ["2"]},
    "generators": {"1": {"M": 2.0}, "2": {"M": 4.0}},
    "model": {},
    "analysis": {},
    "simulation": {},
}


def doc(**changes):
    d = copy.deepcopy(MINIMAL)
    d.update(changes)
    return d


def paths(exc_info):
    return [p for p, _ in exc_info.value.problems]


class TestBuiltins:
    def test_names(self):
        assert {"paper-case1", "paper-case2", "paper-case3", "paper-inertia1", "paper-inertia2"} <= set(builtin_names())

    def test_case1(self):
        s = parse_scenario("paper-case1")
        net = s.network
        assert net.bus_ids == ["1", "2", "3"]
        assert [ln.x for ln in net.lines] == [1 / 15, 1 / 15]
        assert [b.generator.M for b in net.buses] == [3.2, 3.2, 3.2]
        assert dict(net.areas) == {"1": ("1", "2"), "2": ("3",)}
        assert s.form == "reduced"

    def test_inertia2(self):
        net = parse_scenario("paper-inertia2").network
        assert [b.generator.M for b in net.buses] == [3.2, 3.2, 32.0]
        assert [ln.x for ln in net.lines] == [1 / 15, 1 / 15]

    def test_case2_and_case3(self):
        assert [ln.x for ln in parse_scenario("paper-case2").network.lines] == [1 / 15, 10 / 15]
        assert [ln.name for ln in parse_scenario("paper-case3").network.lines] == ["1-2"]

    def test_load_builtin(self):
        assert load_builtin("paper-case1") == parse_scenario("paper-case1")
        with pytest.raises(ValidationError):
            load_builtin("paper-case9")

    @pytest.mark.parametrize("name", builtin_names())
    def test_round_trip(self, name):
        s = parse_scenario(name)
        again = parse_scenario(scenario_to_json(s))
        assert again == s
        assert scenario_to_json(again) == scenario_to_json(s)


class TestParsing:
    def test_minimal_defaults(self):
        s = parse_scenario(doc())
        g = s.network.bus("1").generator
        assert (g.D, g.T_t, g.T_g, g.K_t, g.r) == (0.0, 1e6, 1e6, 1.0, 0.05)
        assert s.zero_tol == 1e-6 and s.threshold == 0.1 and s.horizon == 50.0 and s.step is None
        assert s.x0 == {"kind": "default"} and not s.signal.active

    def test_sources(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(doc(name="file")))
        assert parse_scenario(path).name == "file"
        assert parse_scenario(str(path)).name == "file"
        assert parse_scenario(json.dumps(doc(name="text"))).name == "text"

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            parse_scenario(tmp_path / "nope.json")

    def test_malformed(self):
        with pytest.raises(ParseError):
            parse_scenario("{not json")

    def test_negative_reactance(self):
        d = doc(lines=[{"from": "1", "to": "2", "x": -1}])
        with pytest.raises(SchemaError) as exc:
            parse_scenario(d)
        assert paths(exc) == ["lines[0].x"]

    def test_all_problems_in_one_pass(self):
        d = doc(lines=[{"from": "1", "to": "2", "x": "big"}], generators={"1": {"M": -2}, "2": {"M": 4, "Q": 1}},
                analysis={"threshold": 2.0}, model={"form": "huge"}, extra=1)
        del d["simulation"]
        with pytest.raises(SchemaError) as exc:
            parse_scenario(d)
        assert set(paths(exc)) == {"simulation", "extra", "generators.1.M", "generators.2.Q", "lines[0].x",
                                   "model.form", "analysis.threshold"}
        assert "lines[0].x" in str(exc.value)

    def test_generator_bus_without_parameters(self):
        d = doc(generators={"1": {"M": 2.0}})
        with pytest.raises(SchemaError) as exc:
            parse_scenario(d)
        assert paths(exc) == ["buses[1]"]

    def test_load_bus_with_parameters(self):
        d = doc(buses=[{"id": "1"}, {"id": "2", "kind": "load"}])
        with pytest.raises(SchemaError) as exc:
            parse_scenario(d)
        assert "generators.2" in paths(exc)

    def test_network_errors_propagate(self):
        with pytest.raises(UnknownBus):
            parse_scenario(doc(lines=[{"from": "1", "to": "7", "x": 0.1}]))
        with pytest.raises(IslandedAreaInterior):
            parse_scenario(doc(areas={"A": ["1", "2"]}, lines=[]))

    def test_reference_checks(self):
        d = doc(simulation={"x0": {"kind": "perturbation", "state": "P_t_1"},
                            "input": {"kind": "step", "amplitude": 0.1, "bus": "9"}})
        with pytest.raises(SchemaError) as exc:
            parse_scenario(d)
        assert set(paths(exc)) == {"simulation.x0.state", "simulation.input.bus"}

    def test_full_model_accepts_turbine_state(self):
        d = doc(model={"form": "full"}, simulation={"x0": {"kind": "perturbation", "state": "P_t_1", "value": 0.2}})
        s = parse_scenario(d)
        x0 = s.initial_state(build_model(s.network, s.form))
        assert x0[1] == 0.2 and np.count_nonzero(x0) == 1

    def test_initial_state_kinds(self):
        for spec, check in [
            ({"kind": "zero"}, lambda x: not x.any()),
            ({"kind": "default", "value": 0.02}, lambda x: x[0] == 0.02 and np.count_nonzero(x) == 1),
            ({"kind": "vector", "values": {"P_G_2": 0.5}}, lambda x: x[3] == 0.5),
            ({"kind": "mode", "frequency": 1.0}, lambda x: np.abs(x[:2]).max() == pytest.approx(0.01)),
        ]:
            s = parse_scenario(doc(simulation={"x0": spec}))
            assert check(s.initial_state(build_model(s.network)))

    def test_operating_point(self):
        s = parse_scenario(doc(model={"operating_point": {"delta": {"1": 0.2}, "v": {"2": 1.05}}}))
        assert s.operating_point.delta == {"1": 0.2}
        with pytest.raises(SchemaError) as exc:
            parse_scenario(doc(model={"operating_point": {"v": {"2": -1}}}))
        assert paths(exc) == ["model.operating_point.v.2"]

    def test_dict_output_has_all_keys(self):
        d = scenario_to_dict(parse_scenario(doc()))
        assert {"buses", "lines", "areas", "generators", "model", "analysis", "simulation"} <= set(d)


def test_documented_example_matches_builtin():
    from dataclasses import replace
    from pathlib import Path
    import re

    text = (Path(__file__).resolve().parent.parent / "docs" / "scenario-format.md").read_text()
    block = re.search(r"```json\n(\{.*?\})\n```", text, re.S).group(1)
    builtin = parse_scenario("paper-case1")
    assert parse_scenario(block) == replace(builtin, description="")
