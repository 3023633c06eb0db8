import csv
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from interarea import builtin_names, parse_scenario
from interarea.cli import (ResultBundle, Table, cmd_eig, cmd_modes_compare, cmd_simulate, cmd_sweep, emit, main,
                           parse_values)
from interarea.errors import IoError, ValidationError


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestCommands:
    def test_modes_compare_case1(self):
        b = cmd_modes_compare(parse_scenario("paper-case1"))
        rows = b.table("mode_match").rows
        inter = [r for r in rows if r[0] == "interconnection"]
        assert len(inter) == 1
        assert inter[0][2] == pytest.approx(2.1650, abs=1e-3)
        assert set(inter[0][6].split(";")) == {"omega_G_1", "P_G_1", "omega_G_3", "P_G_3"}
        assert b.table("zero_modes").rows == [["CIS", 2], ["DIS", 4]]

    def test_eig_case3(self):
        b = cmd_eig(parse_scenario("paper-case3"))
        rows = b.table("modes").rows
        assert [r[2] for r in rows].count("zero") == 4
        osc = [r for r in rows if r[2] == "oscillatory"]
        assert len(osc) == 2
        assert max(r[1] for r in osc) == pytest.approx(3.0618, abs=1e-3)
        assert b.table("modes").columns == ["re_per_s", "im_per_s", "class", "dominant_states"]
        assert b.table("participation").columns[0] == "state"

    def test_simulate_dis_series_is_zero(self):
        b = cmd_simulate(parse_scenario("paper-case3"))
        t = b.table("area_series")
        col = t.columns.index("inter_area_rate_pu_per_s")
        assert all(row[col] == 0.0 for row in t.rows)

    def test_simulate_several(self):
        b = cmd_simulate([parse_scenario(n) for n in ("paper-case1", "paper-case2", "paper-case3")])
        assert [c[0] for c in b.plots[0].curves] == ["paper-case1", "paper-case2", "paper-case3"]
        assert "paper-case2-trajectory" in [t.name for t in b.tables]

    def test_resonance(self):
        b = cmd_simulate([parse_scenario("paper-renewable")], resonance=True)
        growth = b.table("growth").rows
        assert growth[0][1] >= 5 and growth[1][1] <= 2
        assert len(b.plots[0].curves) == 2

    def test_sweep(self):
        b = cmd_sweep(parse_scenario("paper-case1"), "lines.2-3.x", [1 / 15, 10 / 15])
        freqs = [r[1] for r in b.table("sweep").rows]
        np.testing.assert_allclose(freqs, [2.1650, 0.8274], atol=1e-3)

    def test_every_table_has_units(self):
        for b in (cmd_eig(parse_scenario("paper-case1")), cmd_simulate(parse_scenario("paper-case1"))):
            for t in b.tables:
                assert len(t.units) == len(t.columns)


class TestEmit:
    def test_csv_layout(self, tmp_path):
        files = emit(cmd_simulate(parse_scenario("paper-case1")), "csv", tmp_path)
        assert {f.name for f in files} == {"trajectory.csv", "area_series.csv"}
        rows = read_csv(tmp_path / "trajectory.csv")
        assert rows[0] == ["t_s", "omega_G_1", "omega_G_2", "omega_G_3", "P_G_1", "P_G_2", "P_G_3"]
        assert rows[1][:2] == ["0", "0.01"]
        assert all(len(v.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 9
                   for row in rows[1:50] for v in row)

    def test_modes_csv(self, tmp_path):
        emit(cmd_eig(parse_scenario("paper-case1")), "csv", tmp_path)
        rows = read_csv(tmp_path / "modes.csv")
        assert rows[0] == ["re_per_s", "im_per_s", "class", "dominant_states"]
        assert ["0", "3.75", "oscillatory", "omega_G_2;P_G_2"] in rows

    def test_empty_sweep_header_only(self, tmp_path):
        b = cmd_sweep(parse_scenario("paper-case1"), "lines.2-3.x", [])
        (path,) = emit(b, "csv", tmp_path)
        assert path.read_text().splitlines() == [
            "value,interconnection_rad_per_s,cis_zero_modes,dis_zero_modes,all_interconnection_rad_per_s"]
        with pytest.raises(ValidationError):
            emit(b, "svg", tmp_path)

    def test_json_mirrors_csv(self, tmp_path):
        b = cmd_eig(parse_scenario("paper-case2"))
        emit(b, "csv", tmp_path)
        (path,) = emit(b, "json", tmp_path)
        doc = json.loads(path.read_text())
        for name in ("modes", "participation"):
            rows = read_csv(tmp_path / f"{name}.csv")
            assert doc["tables"][name]["columns"] == rows[0]
            assert len(doc["tables"][name]["rows"]) == len(rows) - 1
            for jrow, crow in zip(doc["tables"][name]["rows"], rows[1:]):
                for jv, cv in zip(jrow, crow):
                    if jv is None:
                        assert cv == "nan"
                    elif isinstance(jv, float):
                        assert jv == float(cv)
                    else:
                        assert str(jv) == cv

    def test_svg_three_cases(self, tmp_path):
        b = cmd_simulate([parse_scenario(n) for n in ("paper-case1", "paper-case2", "paper-case3")])
        (path,) = emit(b, "svg", tmp_path)
        text = path.read_text()
        assert text.startswith("<svg") and text.count("<polyline") == 3
        assert "time [s]" in text and "paper-case2" in text

    def test_svg_resonance(self, tmp_path):
        b = cmd_simulate([parse_scenario("paper-renewable")], resonance=True)
        (path,) = emit(b, "svg", tmp_path)
        assert path.read_text().count("<polyline") == 2

    def test_deterministic_bytes(self, tmp_path):
        for fmt in ("csv", "json"):
            a = emit(cmd_eig(parse_scenario("paper-inertia2")), fmt, tmp_path / "a")
            b = emit(cmd_eig(parse_scenario("paper-inertia2")), fmt, tmp_path / "b")
            for x, y in zip(a, b):
                assert x.read_bytes() == y.read_bytes()

    def test_unwritable_destination(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        b = ResultBundle("x", [Table("t", ["a"], [""], [[1.0]])])
        with pytest.raises(IoError):
            emit(b, "csv", blocker / "sub")

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValidationError):
            emit(ResultBundle("x", [Table("t", ["a"], [""])]), "xlsx", tmp_path)


class TestMain:
    def test_success(self, tmp_path, capsys):
        assert main(["modes-compare", "--scenario", "paper-case1"]) == 0
        out = capsys.readouterr().out
        assert "interconnection mode 2.1651 rad/s" in out

    def test_out_dir(self, tmp_path):
        assert main(["eig", "--scenario", "paper-case1", "--out", str(tmp_path), "--format", "json"]) == 0
        assert (tmp_path / "eig-paper-case1.json").exists()

    def test_exit_codes(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"buses": []}')
        assert main(["eig", "--scenario", str(bad)]) == 2
        assert main(["eig", "--scenario", str(tmp_path / "missing.json")]) == 4
        assert main(["sweep", "--scenario", "paper-case1", "--param", "lines.9-9.x", "--values", "1"]) == 2
        assert main(["simulate", "--scenario", "paper-case1", "--step", "0.5"]) == 3
        assert main(["simulate", "--scenario", "paper-case1", "--step", "0.05", "--horizon", "1",
                     "--allow-large-step"]) == 0
        assert main(["eig", "--scenario", "paper-case1", "--threshold", "2"]) == 2
        err = capsys.readouterr().err
        assert "error:" in err

    def test_argparse_errors(self):
        with pytest.raises(SystemExit) as exc:
            main(["eig"])
        assert exc.value.code == 2

    def test_list(self, capsys):
        assert main(["list-scenarios"]) == 0
        out = capsys.readouterr().out
        assert all(name in out for name in builtin_names())

    def test_values_syntax(self):
        assert parse_values("1,2.5") == [1.0, 2.5]
        assert parse_values("0:1:3") == [0.0, 0.5, 1.0]
        assert parse_values("") == []
        with pytest.raises(ValidationError):
            parse_values("a,b")

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "interarea", "eig", "--scenario", "paper-case3"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "zero modes: 4" in proc.stdout


@pytest.mark.parametrize("name", builtin_names())
def test_builtin_end_to_end_under_one_second(name, tmp_path):
    start = time.perf_counter()
    s = parse_scenario(name)
    for bundle in (cmd_eig(s), cmd_modes_compare(s), cmd_simulate(s)):
        emit(bundle, "csv", tmp_path)
    assert time.perf_counter() - start < 1.0
