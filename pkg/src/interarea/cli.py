"""Command-line interface: command dispatch, result bundles and file emission.

Verbs::

    interarea eig            --scenario paper-case3
    interarea participation  --scenario paper-case1 --threshold 0.1
    interarea modes-compare  --scenario paper-case1
    interarea simulate       --scenario paper-case1 --scenario paper-case2 --format svg --out figs
    interarea simulate       --scenario paper-renewable --resonance --format svg --out figs
    interarea sweep          --scenario paper-case1 --param lines.2-3.x --values 0.05:1:20
    interarea list-scenarios

Exit status is 0 on success, 2 for invalid input, 3 for numerical failures
and 4 for I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InterAreaError, IoError, ValidationError
from .modal import classify_modes, dominant_states, eigen_decompose, participation_factors
from .scenario import Scenario, builtin_names, parse_scenario
from .statespace import OMEGA, POWER, build_model
from .svg import line_plot
from .timesim import (PERTURBATION, analyze_interconnection, interaction_variables, resonance_experiment,
                      simulate, sweep)

FORMATS = ("csv", "json", "svg")
DIGITS = 9


# result containers ---------------------------------------------------------

@dataclass
class Table:
    """A named table; ``units[k]`` is the unit of ``columns[k]`` ("" when dimensionless)."""

    name: str
    columns: list
    units: list
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("every column needs a unit entry")


@dataclass
class Plot:
    name: str
    xlabel: str
    ylabel: str
    curves: list
    title: str = ""


@dataclass
class ResultBundle:
    """Everything a command produces: tables, plots and human-readable summary lines."""

    name: str
    tables: list = field(default_factory=list)
    plots: list = field(default_factory=list)
    summary: list = field(default_factory=list)

    def table(self, name) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if v == 0.0:
            return "0"
        return format(v, f".{DIGITS}g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return None
        return float(format(v, f".{DIGITS}g")) if v != 0.0 else 0.0
    return v


# commands ------------------------------------------------------------------

def _clean(lam, scale):
    """Flush rounding-level real/imaginary parts to zero so output is platform independent."""
    tol = 1e-12 * max(scale, 1.0)
    re, im = float(lam.real), float(lam.imag)
    return (0.0 if abs(re) < tol else re), (0.0 if abs(im) < tol else im)


def _mode_class(i, cls):
    if i in cls.zero:
        return "zero"
    if i in cls.aperiodic:
        return "aperiodic"
    return "oscillatory"


def _spectrum(scenario: Scenario):
    model = build_model(scenario.network, scenario.form, scenario.operating_point)
    modes = eigen_decompose(model.A, model.label_names)
    return model, modes, classify_modes(modes, scenario.zero_tol), participation_factors(modes)


def _participation_table(modes, p) -> Table:
    cols = ["state"] + [f"mode_{i}" for i in range(len(modes))]
    table = Table("participation", cols, [""] * len(cols))
    for k, label in enumerate(modes.labels):
        table.rows.append([label] + [float(v) for v in p.values[k]])
    return table


def cmd_eig(scenario: Scenario) -> ResultBundle:
    """Spectrum, mode classification and participation factors."""
    model, modes, cls, p = _spectrum(scenario)
    table = Table("modes", ["re_per_s", "im_per_s", "class", "dominant_states"], ["1/s", "rad/s", "", ""])
    for i, lam in enumerate(modes.eigenvalues):
        kind = _mode_class(i, cls)
        dom = "" if modes.defective[i] else ";".join(dominant_states(p, i, scenario.threshold))
        table.rows.append([*_clean(lam, modes.a_norm), kind, dom])
    bundle = ResultBundle(f"eig-{scenario.name}", [table, _participation_table(modes, p)])
    bundle.summary.append(f"{scenario.name}: {model.n_states} states ({scenario.form} model)")
    bundle.summary.append(f"zero modes: {len(cls.zero)}")
    for pair in cls.oscillatory:
        dom = dominant_states(p, pair.upper, scenario.threshold)
        bundle.summary.append(f"oscillatory pair {pair.frequency:.4f} rad/s: {', '.join(dom) or '-'}")
    if cls.aperiodic:
        bundle.summary.append(f"aperiodic modes: {len(cls.aperiodic)}")
    return bundle


def cmd_participation(scenario: Scenario) -> ResultBundle:
    """Participation matrix alone."""
    _, modes, _, p = _spectrum(scenario)
    bundle = ResultBundle(f"participation-{scenario.name}", [_participation_table(modes, p)])
    if p.omitted:
        bundle.summary.append(f"defective modes without participation: {list(p.omitted)}")
    return bundle


def cmd_modes_compare(scenario: Scenario) -> ResultBundle:
    """Pair CIS and DIS modes and report the interconnection mode(s)."""
    match = analyze_interconnection(scenario.network, scenario.form, scenario.operating_point, scenario.zero_tol)
    p = participation_factors(match.cis)
    lc, ld = match.cis.eigenvalues, match.dis.eigenvalues
    table = Table(
        "mode_match",
        ["status", "cis_re_per_s", "cis_im_per_s", "dis_re_per_s", "dis_im_per_s", "distance_per_s",
         "dominant_states"],
        ["", "1/s", "rad/s", "1/s", "rad/s", "1/s", ""],
    )
    nan = math.nan
    a_norm = match.cis.a_norm
    for i, j, dist in match.pairs:
        table.rows.append(["matched", *_clean(lc[i], a_norm), *_clean(ld[j], a_norm), dist,
                           ";".join(dominant_states(p, i, scenario.threshold))])
    for i in match.interconnection:
        table.rows.append(["interconnection", *_clean(lc[i], a_norm), nan, nan, nan,
                           ";".join(dominant_states(p, i, scenario.threshold))])
    for j in match.unmatched_dis:
        table.rows.append(["unmatched_dis", nan, nan, *_clean(ld[j], a_norm), nan, ""])
    zeros = Table("zero_modes", ["system", "zero_modes"], ["", ""],
                  [["CIS", match.cis_zero_count], ["DIS", match.dis_zero_count]])
    bundle = ResultBundle(f"modes-compare-{scenario.name}", [table, zeros])
    bundle.summary.append(f"zero modes: CIS {match.cis_zero_count}, DIS {match.dis_zero_count}")
    if not match.interconnection:
        bundle.summary.append("no interconnection mode")
    for i in match.interconnection:
        dom = dominant_states(p, i, scenario.threshold)
        bundle.summary.append(f"interconnection mode {abs(lc[i].imag):.4f} rad/s: {', '.join(dom) or '-'}")
    return bundle


def _run(scenario: Scenario):
    model = build_model(scenario.network, scenario.form, scenario.operating_point)
    x0 = scenario.initial_state(model)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        traj = simulate(model, x0, scenario.signal, h=scenario.step, horizon=scenario.horizon,
                        allow_large_step=scenario.allow_large_step)
    return traj, interaction_variables(traj, scenario.network), [str(w.message) for w in caught]


def _series_table(name, series) -> Table:
    cols, units = ["t_s"], ["s"]
    for a in series.area_ids:
        cols += [f"intvar_{a}_pu", f"intvar_rate_{a}_pu_per_s"]
        units += ["p.u.", "p.u./s"]
    cols += ["inter_area_rate_pu_per_s", "inter_area_power_pu"]
    units += ["p.u./s", "p.u."]
    table = Table(name, cols, units)
    for k, t in enumerate(series.t):
        row = [float(t)]
        for a in range(len(series.area_ids)):
            row += [float(series.intvar[k, a]), float(series.rate[k, a])]
        row += [float(series.inter_area[k]), float(series.inter_area_power[k])]
        table.rows.append(row)
    return table


def _trajectory_table(name, traj) -> Table:
    units = {OMEGA: "p.u.", POWER: "p.u."}
    labels = list(traj.model.label_names)
    table = Table(name, ["t_s"] + labels, ["s"] + [units.get(l.rsplit("_", 1)[0], "p.u.") for l in labels])
    for t, x in zip(traj.t, traj.x):
        table.rows.append([float(t)] + [float(v) for v in x])
    return table


def cmd_simulate(scenarios, resonance: bool = False) -> ResultBundle:
    """Trajectories and interaction-variable series for one or more scenarios.

    With several scenarios the tables are prefixed by scenario name and the
    inter-area series are overlaid in one plot.  ``resonance`` replaces the
    plain run with the forced experiment at the interconnection frequency
    and at half of it.
    """
    if isinstance(scenarios, Scenario):
        scenarios = [scenarios]
    if not scenarios:
        raise ValidationError("simulate needs at least one scenario")
    if resonance:
        return _cmd_resonance(scenarios)
    multi = len(scenarios) > 1
    names = [s.name or f"scenario{k + 1}" for k, s in enumerate(scenarios)]
    if len(set(names)) != len(names):
        names = [f"{n}-{k + 1}" for k, n in enumerate(names)]
    bundle = ResultBundle("simulate-" + "-".join(names))
    curves = []
    for name, s in zip(names, scenarios):
        traj, series, notes = _run(s)
        prefix = f"{name}-" if multi else ""
        bundle.tables.append(_trajectory_table(f"{prefix}trajectory", traj))
        bundle.tables.append(_series_table(f"{prefix}area_series", series))
        curves.append((name, series.t, series.inter_area))
        bundle.summary.extend(f"{name}: warning: {n}" for n in notes)
        bundle.summary.append(f"{name}: {len(traj.t) - 1} steps of {traj.h:.6g} s, "
                              f"max |inter-area rate| {np.abs(series.inter_area).max():.6g} p.u./s")
    bundle.plots.append(Plot("inter_area", "time [s]", "inter-area rate [p.u./s]", curves,
                             "Inter-area variable"))
    return bundle


def _cmd_resonance(scenarios) -> ResultBundle:
    bundle = ResultBundle("resonance")
    for s in scenarios:
        model = build_model(s.network, s.form, s.operating_point)
        freqs = analyze_interconnection(s.network, s.form, s.operating_point, s.zero_tol).interconnection_frequencies
        if not freqs:
            raise ValidationError(f"scenario {s.name!r} has no interconnection mode to excite")
        sig = s.signal
        amplitude = sig.amplitude if sig.active else PERTURBATION
        bus = sig.bus if sig.active else None
        res = resonance_experiment(model, s.network, freqs[0], amplitude=amplitude, horizon=s.horizon,
                                   bus=bus, h=s.step)
        prefix = f"{s.name}-" if len(scenarios) > 1 else ""
        table = Table(f"{prefix}resonance", ["t_s", "resonant_rate_pu_per_s", "off_resonant_rate_pu_per_s"],
                      ["s", "p.u./s", "p.u./s"])
        for row in zip(res.resonant.t, res.resonant_series.inter_area, res.off_resonant_series.inter_area):
            table.rows.append([float(v) for v in row])
        bundle.tables.append(table)
        bundle.tables.append(Table(
            f"{prefix}growth", ["forcing_rad_per_s", "growth_ratio"], ["rad/s", ""],
            [[res.omega, res.resonant_growth], [0.5 * res.omega, res.off_resonant_growth]]))
        bundle.plots.append(Plot(
            f"{prefix}resonance", "time [s]", "inter-area rate [p.u./s]",
            [(f"forcing at {res.omega:.4f} rad/s", res.resonant.t, res.resonant_series.inter_area),
             (f"forcing at {0.5 * res.omega:.4f} rad/s", res.off_resonant.t, res.off_resonant_series.inter_area)],
            f"Renewable forcing at bus {res.bus}"))
        bundle.summary.append(f"{s.name}: growth {res.resonant_growth:.3g} at {res.omega:.4f} rad/s, "
                              f"{res.off_resonant_growth:.3g} at {0.5 * res.omega:.4f} rad/s")
    return bundle


def cmd_sweep(scenario: Scenario, param: str, values) -> ResultBundle:
    """Interconnection frequency as one parameter varies."""
    rows = sweep(scenario.network, param, values, scenario.form, scenario.operating_point, scenario.zero_tol)
    table = Table("sweep", ["value", "interconnection_rad_per_s", "cis_zero_modes", "dis_zero_modes",
                            "all_interconnection_rad_per_s"], [param, "rad/s", "", "", "rad/s"])
    for r in rows:
        table.rows.append([r.value, r.frequency, r.cis_zero_count, r.dis_zero_count,
                           ";".join(_fmt(f) for f in r.interconnection_frequencies)])
    bundle = ResultBundle(f"sweep-{scenario.name}", [table])
    if rows:
        bundle.plots.append(Plot("sweep", param, "interconnection frequency [rad/s]",
                                 [(scenario.name or "sweep", [r.value for r in rows], [r.frequency for r in rows])]))
    bundle.summary.append(f"{len(rows)} sweep points over {param}")
    return bundle


def cmd_list_scenarios() -> ResultBundle:
    table = Table("scenarios", ["name", "form", "description"], ["", "", ""])
    for name in builtin_names():
        s = parse_scenario(name)
        table.rows.append([name, s.form, s.description])
    bundle = ResultBundle("scenarios", [table])
    bundle.summary.extend(f"{r[0]:<18} {r[2]}" for r in table.rows)
    return bundle


# emission ------------------------------------------------------------------

def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def bundle_to_json(bundle: ResultBundle) -> str:
    doc = {
        "name": bundle.name,
        "summary": list(bundle.summary),
        "tables": {
            t.name: {"columns": list(t.columns), "units": list(t.units),
                     "rows": [[_json_value(v) for v in row] for row in t.rows]}
            for t in bundle.tables
        },
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def emit(bundle: ResultBundle, fmt: str, destination) -> list[Path]:
    """Write ``bundle`` under directory ``destination``; returns the written paths.

    ``csv`` writes one ``<table>.csv`` per table, ``json`` one
    ``<bundle>.json`` holding every table and ``svg`` one ``<plot>.svg`` per
    plot.
    """
    if fmt not in FORMATS:
        raise ValidationError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    if fmt == "svg" and not bundle.plots:
        raise ValidationError(f"'{bundle.name}' has nothing to plot")
    if fmt != "svg" and not bundle.tables:
        raise ValidationError(f"'{bundle.name}' has no tables")
    dest = Path(destination)
    files = {}
    if fmt == "csv":
        files = {f"{t.name}.csv": table_to_csv(t) for t in bundle.tables}
    elif fmt == "json":
        files = {f"{bundle.name}.json": bundle_to_json(bundle)}
    else:
        files = {f"{p.name}.svg": line_plot(p.curves, p.xlabel, p.ylabel, p.title) for p in bundle.plots}
    written = []
    try:
        dest.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            path = dest / name
            with open(path, "w", newline="") as fh:
                fh.write(text)
            written.append(path)
    except OSError as exc:
        raise IoError(f"cannot write to {str(dest)!r}: {exc.strerror or exc}") from None
    return written


# argument handling ---------------------------------------------------------

def parse_values(text: str) -> list[float]:
    """``"a,b,c"`` or ``"start:stop:count"`` (inclusive, evenly spaced)."""
    text = text.strip()
    try:
        if not text:
            return []
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 0:
                raise ValueError
            return [float(v) for v in np.linspace(start, stop, count)]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"cannot read --values {text!r}; use 'a,b,c' or 'start:stop:count'") from None


def _with_overrides(s: Scenario, args) -> Scenario:
    changes = {}
    if args.zero_tol is not None:
        if not args.zero_tol > 0:
            raise ValidationError("--zero-tol must be positive")
        changes["zero_tol"] = args.zero_tol
    if args.threshold is not None:
        if not 0 < args.threshold <= 1:
            raise ValidationError("--threshold must lie in (0, 1]")
        changes["threshold"] = args.threshold
    if args.step is not None:
        if not args.step > 0:
            raise ValidationError("--step must be positive")
        changes["step"] = args.step
    if args.horizon is not None:
        if not args.horizon > 0:
            raise ValidationError("--horizon must be positive")
        changes["horizon"] = args.horizon
    if args.allow_large_step:
        changes["allow_large_step"] = True
    return replace(s, **changes) if changes else s


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="interarea", description="Inter-area oscillation analysis of multi-area power networks.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, many=False):
        p.add_argument("--scenario", action="append" if many else "store", required=True,
                       help="scenario file or built-in name" + (" (repeatable)" if many else ""))
        p.add_argument("--out", help="output directory (stdout when omitted)")
        p.add_argument("--format", choices=FORMATS, default="csv")
        p.add_argument("--zero-tol", type=float, dest="zero_tol")
        p.add_argument("--threshold", type=float)
        p.add_argument("--step", type=float, help="integration step [s]")
        p.add_argument("--horizon", type=float, help="simulated time [s]")
        p.add_argument("--allow-large-step", action="store_true", dest="allow_large_step")

    common(sub.add_parser("eig", help="spectrum, classification and participation"))
    common(sub.add_parser("participation", help="participation matrix"))
    common(sub.add_parser("modes-compare", help="CIS vs DIS interconnection-mode identification"))
    sim = sub.add_parser("simulate", help="time-domain simulation")
    common(sim, many=True)
    sim.add_argument("--resonance", action="store_true",
                     help="force at the interconnection frequency and at half of it")
    sw = sub.add_parser("sweep", help="interconnection frequency versus one parameter")
    common(sw)
    sw.add_argument("--param", required=True, help="lines.<a>-<b>.x or generators.<bus>.M")
    sw.add_argument("--values", required=True, help="'a,b,c' or 'start:stop:count'")
    ls = sub.add_parser("list-scenarios", help="list built-in scenarios")
    ls.add_argument("--out")
    ls.add_argument("--format", choices=FORMATS, default="csv")
    return parser


def dispatch(args) -> ResultBundle:
    if args.verb == "list-scenarios":
        return cmd_list_scenarios()
    if args.verb == "simulate":
        scenarios = [_with_overrides(parse_scenario(s), args) for s in args.scenario]
        return cmd_simulate(scenarios, resonance=args.resonance)
    scenario = _with_overrides(parse_scenario(args.scenario), args)
    if args.verb == "eig":
        return cmd_eig(scenario)
    if args.verb == "participation":
        return cmd_participation(scenario)
    if args.verb == "modes-compare":
        return cmd_modes_compare(scenario)
    return cmd_sweep(scenario, args.param, parse_values(args.values))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        bundle = dispatch(args)
        if args.out:
            for path in emit(bundle, args.format, args.out):
                print(path)
            for line in bundle.summary:
                print(line, file=sys.stderr)
        elif args.format == "svg":
            raise ValidationError("--format svg needs --out")
        elif args.format == "json":
            sys.stdout.write(bundle_to_json(bundle))
        else:
            for line in bundle.summary:
                print(line)
            for t in bundle.tables:
                if args.verb in ("simulate",) and len(t.rows) > 20:
                    continue  # long series only go to files
                print(f"\n# {t.name}")
                sys.stdout.write(table_to_csv(t))
    except InterAreaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
