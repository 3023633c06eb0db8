"""Time-domain simulation, interaction variables and parameter sweeps."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .eigensolver import eigvals
from .errors import StepTooLarge, UnknownArea, UnknownParameterPath, ValidationError
from .modal import ZERO_TOL, eigen_decompose, identify_interconnection_mode
from .network import FLAT_START, Line, NetworkModel, OperatingPoint, disconnect_ties, jacobian
from .statespace import OMEGA, POWER, REDUCED, StateSpaceModel, build_model

DEFAULT_HORIZON = 50.0
MAX_STEP = 0.01
PERTURBATION = 0.01


@dataclass(frozen=True)
class InputSignal:
    """Load-power rate ``dP_L/dt`` [p.u./s] applied at one bus.

    ``kind`` is ``"zero"``, ``"step"`` (``amplitude`` from ``start`` on) or
    ``"sinusoid"`` (``amplitude * sin(omega * (t - start))`` from ``start`` on).
    A renewable source is a negative load, so its output rate enters with the
    opposite sign.
    """

    kind: str = "zero"
    amplitude: float = 0.0
    omega: float = 0.0
    start: float = 0.0
    bus: str | None = None

    def __post_init__(self):
        if self.bus is not None:
            object.__setattr__(self, "bus", str(self.bus))
        if self.kind not in ("zero", "step", "sinusoid"):
            raise ValidationError(f"unknown input kind {self.kind!r}")
        if self.kind == "sinusoid" and not self.omega > 0:
            raise ValidationError("a sinusoidal input needs omega > 0")
        if self.kind != "zero" and self.bus is None:
            raise ValidationError("a non-zero input needs a target bus")

    @property
    def active(self):
        return self.kind != "zero" and self.amplitude != 0.0

    def rate(self, t):
        """``dP_L/dt`` at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        if not self.active:
            return np.zeros_like(t)
        on = t >= self.start
        if self.kind == "step":
            return np.where(on, self.amplitude, 0.0)
        return np.where(on, self.amplitude * np.sin(self.omega * (t - self.start)), 0.0)

    def integral(self, t):
        """Load deviation ``P_L(t) - P_L(0)`` implied by the rate."""
        t = np.asarray(t, dtype=float)
        if not self.active:
            return np.zeros_like(t)
        tau = np.maximum(t - self.start, 0.0)
        if self.kind == "step":
            return self.amplitude * tau
        return self.amplitude * (1.0 - np.cos(self.omega * tau)) / self.omega


ZERO_INPUT = InputSignal()


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States sampled on a uniform grid; row ``k`` of ``x`` is the state at ``t[k]``."""

    t: np.ndarray
    x: np.ndarray
    h: float
    labels: tuple
    model: StateSpaceModel
    signal: InputSignal

    def column(self, label) -> np.ndarray:
        return self.x[:, self.model.index(label)]

    def derivative(self) -> np.ndarray:
        """Exact state derivative ``A x + b u(t)`` at every sample."""
        dx = self.x @ self.model.A.T
        if self.signal.active:
            dx += np.outer(self.signal.rate(self.t), self.model.input_column(self.signal.bus))
        return dx


def max_frequency_hz(A) -> float:
    lam = eigvals(A)
    return float(np.abs(lam.imag).max(initial=0.0)) / (2 * math.pi)


def default_step(A) -> float:
    f_max = max_frequency_hz(A)
    return MAX_STEP if f_max == 0.0 else min(0.01 / f_max, MAX_STEP)


def simulate(model: StateSpaceModel, x0, signal: InputSignal = ZERO_INPUT, h: float | None = None,
             horizon: float = DEFAULT_HORIZON, allow_large_step: bool = False) -> Trajectory:
    """Integrate ``dx/dt = A x + b u(t)`` with the classical fixed-step RK4 scheme.

    Parameters
    ----------
    h : float, optional
        Step size [s].  Defaults to ``min(0.01 / f_max, 0.01)`` where
        ``f_max`` is the highest modal frequency in Hz.  A larger step raises
        :class:`StepTooLarge` unless ``allow_large_step`` is set, in which case
        a warning is issued.
    horizon : float
        Final time [s]; rounded to a whole number of steps.
    """
    A = model.A
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.n_states,):
        raise ValidationError(f"x0 has shape {x0.shape}, expected ({model.n_states},)")
    f_max = max_frequency_hz(A)
    limit = math.inf if f_max == 0.0 else 0.01 / f_max
    if h is None:
        h = min(limit, MAX_STEP)
    if not h > 0:
        raise ValidationError(f"step must be positive, got {h}")
    if h > limit * (1 + 1e-12):
        msg = f"step {h:g} s exceeds 0.01/f_max = {limit:g} s"
        if not allow_large_step:
            raise StepTooLarge(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)

    n_steps = max(int(round(horizon / h)), 1)
    t = h * np.arange(n_steps + 1)
    x = np.empty((n_steps + 1, model.n_states))
    x[0] = x0
    At = A.T
    if signal.active:
        b = model.input_column(signal.bus)
        u = signal.rate(np.concatenate([t[:, None], t[:, None] + h / 2], axis=1))
        for k in range(n_steps):
            xk = x[k]
            u0, uh, u1 = u[k, 0], u[k, 1], u[k + 1, 0]
            k1 = xk @ At + u0 * b
            k2 = (xk + 0.5 * h * k1) @ At + uh * b
            k3 = (xk + 0.5 * h * k2) @ At + uh * b
            k4 = (xk + h * k3) @ At + u1 * b
            x[k + 1] = xk + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    else:
        # linear and autonomous: one step is a fixed matrix
        I = np.eye(model.n_states)
        hA = h * A
        P = I + hA @ (I + hA / 2 @ (I + hA / 3 @ (I + hA / 4)))
        Pt = P.T
        for k in range(n_steps):
            x[k + 1] = x[k] @ Pt
    return Trajectory(t, x, float(h), model.labels, model, signal)


def perturbation_state(model: StateSpaceModel, label, value: float = PERTURBATION) -> np.ndarray:
    x0 = np.zeros(model.n_states)
    x0[model.index(label)] = value
    return x0


def default_initial_state(model: StateSpaceModel, network: NetworkModel, value: float = PERTURBATION):
    """Speed deviation ``value`` on the first generator of the first area."""
    first_area = network.area_ids[0]
    gen = next(g for g in model.generator_ids if network.area_of(g) == first_area)
    return perturbation_state(model, (gen, OMEGA), value)


def mode_shape_state(model: StateSpaceModel, eigenvalue, value: float = PERTURBATION) -> np.ndarray:
    """Real initial state along the right eigenvector of the mode nearest ``eigenvalue``.

    Scaled so the largest speed deviation is ``value``; the trajectory then
    oscillates in that mode alone.
    """
    modes = eigen_decompose(model.A, model.label_names)
    i = int(np.argmin(np.abs(modes.eigenvalues - eigenvalue)))
    phi = modes.right[:, i]
    w = phi[model.indices(OMEGA)]
    phi = phi / w[np.argmax(np.abs(w))]
    x0 = phi.real
    return value * x0 / np.abs(x0[model.indices(OMEGA)]).max()


@dataclass(frozen=True, eq=False)
class AreaSeries:
    """Per-area interaction variables along a trajectory.

    ``intvar[:, a]`` is the net power [p.u.] out of area ``area_ids[a]``;
    ``rate`` its time derivative [p.u./s].  ``inter_area`` is the rate
    difference ``rate[I] - rate[II]`` and ``inter_area_power`` the
    power-level difference ``intvar[I] - intvar[II]``.
    """

    t: np.ndarray
    area_ids: tuple
    intvar: np.ndarray
    rate: np.ndarray
    pair: tuple
    inter_area: np.ndarray
    inter_area_power: np.ndarray

    def area(self, area_id):
        return self.area_ids.index(str(area_id))


def interaction_variables(traj: Trajectory, network: NetworkModel, pair=None) -> AreaSeries:
    """Interaction variable and its rate for every area.

    Rates use the exact model derivative (no numerical differencing).
    ``pair`` selects ``(Area I, Area II)`` for the inter-area series and
    defaults to the first two areas.
    """
    model = traj.model
    areas = tuple(network.area_ids)
    if pair is None:
        pair = areas[:2] if len(areas) >= 2 else (areas[0], areas[0])
    pair = tuple(str(a) for a in pair)
    for a in pair:
        if a not in areas:
            raise UnknownArea(f"no area {a!r}")

    p_idx = model.indices(POWER)
    P = traj.x[:, p_idx]
    dP = traj.derivative()[:, p_idx]
    load_dev = traj.signal.integral(traj.t)
    load_rate = traj.signal.rate(traj.t)
    load_area = network.area_of(traj.signal.bus) if traj.signal.active else None

    intvar = np.zeros((len(traj.t), len(areas)))
    rate = np.zeros_like(intvar)
    for a, area in enumerate(areas):
        cols = [k for k, g in enumerate(model.generator_ids) if network.area_of(g) == area]
        intvar[:, a] = P[:, cols].sum(axis=1)
        rate[:, a] = dP[:, cols].sum(axis=1)
        if load_area == area:
            intvar[:, a] -= load_dev
            rate[:, a] -= load_rate
    i, j = areas.index(pair[0]), areas.index(pair[1])
    return AreaSeries(traj.t, areas, intvar, rate, pair, rate[:, i] - rate[:, j], intvar[:, i] - intvar[:, j])


def tie_flow_deviations(traj: Trajectory, network: NetworkModel, op: OperatingPoint = FLAT_START) -> dict:
    """Tie-line flow deviations ``F(t) - F(0)`` rebuilt from integrated machine speeds.

    Generator angles come from trapezoidal integration of ``omega_G``;
    load-only bus angles from the network equations.  Keys are line names.
    """
    model = traj.model
    ids = network.bus_ids
    index = {b: k for k, b in enumerate(ids)}
    w = traj.x[:, model.indices(OMEGA)]
    d_gen = np.zeros_like(w)
    d_gen[1:] = np.cumsum(0.5 * traj.h * (w[1:] + w[:-1]), axis=0)

    J = jacobian(network, op)
    angles = np.zeros((len(traj.t), len(ids)))
    g = [index[b] for b in model.generator_ids]
    angles[:, g] = d_gen
    if model.load_ids:
        l = [index[b] for b in model.load_ids]
        dP_L = np.zeros((len(traj.t), len(l)))
        if traj.signal.active and traj.signal.bus in model.load_ids:
            dP_L[:, model.load_ids.index(traj.signal.bus)] = traj.signal.integral(traj.t)
        rhs = -dP_L - d_gen @ J[np.ix_(l, g)].T
        angles[:, l] = np.linalg.solve(J[np.ix_(l, l)], rhs.T).T

    flows = {}
    for ln in network.tie_lines:
        i, j = index[ln.from_bus], index[ln.to_bus]
        flows[ln.name] = -J[i, j] * (angles[:, i] - angles[:, j])
    return flows


def zero_crossing_frequency(t, y, rel_floor: float = 1e-12) -> float:
    """Angular frequency [rad/s] estimated from the spacing of zero crossings.

    Returns 0.0 for a signal that never leaves ``rel_floor`` of zero or has
    fewer than two crossings.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    scale = np.abs(y).max(initial=0.0)
    if scale == 0.0 or scale < rel_floor:
        return 0.0
    s = np.sign(y)
    k = np.flatnonzero(s[:-1] * s[1:] < 0)
    if len(k) < 2:
        return 0.0
    tc = t[k] - y[k] * (t[k + 1] - t[k]) / (y[k + 1] - y[k])
    return math.pi * (len(tc) - 1) / (tc[-1] - tc[0])


@dataclass(frozen=True, eq=False)
class ResonanceResult:
    resonant: Trajectory
    off_resonant: Trajectory
    resonant_series: AreaSeries
    off_resonant_series: AreaSeries
    resonant_growth: float
    off_resonant_growth: float
    omega: float
    bus: str


def growth_ratio(y, fraction: float = 0.1) -> float:
    """Peak ``|y|`` over the last ``fraction`` of samples divided by the peak over the first."""
    y = np.abs(np.asarray(y, dtype=float))
    k = max(int(len(y) * fraction), 1)
    first = y[:k].max()
    last = y[-k:].max()
    return float(last / first) if first > 0 else math.nan


def resonance_experiment(model: StateSpaceModel, network: NetworkModel, mode_freq: float,
                         amplitude: float = PERTURBATION, horizon: float = DEFAULT_HORIZON,
                         bus=None, h: float | None = None, x0=None) -> ResonanceResult:
    """Drive ``dP_L/dt = amplitude * sin(omega t)`` at ``bus`` and at half the frequency.

    ``bus`` defaults to the first bus of the first area.  Both runs start
    from ``x0`` (zero by default).
    """
    omega_rows = model.indices(OMEGA)
    if np.abs(np.diag(model.A)[omega_rows]).max(initial=0.0) > 0:
        raise ValidationError("the resonance experiment expects an undamped model (D = 0)")
    if not amplitude >= 0:
        raise ValidationError("amplitude must be non-negative")
    if bus is None:
        bus = network.areas[network.area_ids[0]][0]
    bus = str(bus)
    if x0 is None:
        x0 = np.zeros(model.n_states)

    runs = []
    for omega in (mode_freq, 0.5 * mode_freq):
        sig = InputSignal("sinusoid", amplitude, omega, 0.0, bus)
        traj = simulate(model, x0, sig, h=h, horizon=horizon)
        runs.append((traj, interaction_variables(traj, network)))
    (tr, sr), (to, so) = runs
    return ResonanceResult(tr, to, sr, so, growth_ratio(sr.inter_area), growth_ratio(so.inter_area),
                           float(mode_freq), bus)


# parameter sweeps ---------------------------------------------------------

_GEN_FIELDS = ("M",)


def apply_parameter(network: NetworkModel, path: str, value: float) -> NetworkModel:
    """Copy of ``network`` with one parameter replaced.

    ``path`` is ``lines.<from>-<to>.x`` (line reactance) or
    ``generators.<bus>.M`` (inertia).
    """
    parts = path.split(".")
    if len(parts) != 3:
        raise UnknownParameterPath(f"malformed parameter path {path!r}")
    kind, key, attr = parts
    if kind == "lines" and attr == "x":
        ends = key.split("-")
        if len(ends) != 2:
            raise UnknownParameterPath(f"malformed line key in {path!r}")
        hit = False
        lines = []
        for ln in network.lines:
            if {ln.from_bus, ln.to_bus} == set(ends):
                lines.append(Line(ln.from_bus, ln.to_bus, value))
                hit = True
            else:
                lines.append(ln)
        if not hit:
            raise UnknownParameterPath(f"no line {key!r}")
        return network.with_lines(lines)
    if kind == "generators" and attr in _GEN_FIELDS:
        buses = []
        hit = False
        for b in network.buses:
            if b.id == key and b.generator is not None:
                b = replace(b, generator=replace(b.generator, **{attr: value}))
                hit = True
            buses.append(b)
        if not hit:
            raise UnknownParameterPath(f"no generator at bus {key!r}")
        return network.with_buses(buses)
    raise UnknownParameterPath(f"unsupported parameter path {path!r}")


@dataclass(frozen=True)
class SweepRow:
    value: float
    frequency: float
    cis_zero_count: int
    dis_zero_count: int
    interconnection_frequencies: tuple


def analyze_interconnection(network: NetworkModel, form: str = REDUCED, op: OperatingPoint = FLAT_START,
                            zero_tol: float = ZERO_TOL):
    """CIS/DIS mode match for ``network`` and its tie-free variant."""
    cis_model = build_model(network, form, op)
    dis_model = build_model(disconnect_ties(network), form, op)
    cis = eigen_decompose(cis_model.A, cis_model.label_names)
    dis = eigen_decompose(dis_model.A, dis_model.label_names)
    return identify_interconnection_mode(cis, dis, zero_tol)


def sweep(network: NetworkModel, path: str, values, form: str = REDUCED, op: OperatingPoint = FLAT_START,
          zero_tol: float = ZERO_TOL, max_workers: int | None = None) -> list[SweepRow]:
    """Interconnection-mode frequency for each parameter value.

    ``frequency`` is the slowest interconnection mode [rad/s], NaN when
    there is none.  Evaluations are independent; ``max_workers`` > 1 runs
    them on a thread pool.
    """
    values = [float(v) for v in values]
    variants = [apply_parameter(network, path, v) for v in values]

    def one(item):
        value, net = item
        match = analyze_interconnection(net, form, op, zero_tol)
        freqs = tuple(match.interconnection_frequencies)
        return SweepRow(value, freqs[0] if freqs else math.nan, match.cis_zero_count, match.dis_zero_count, freqs)

    items = list(zip(values, variants))
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(one, items))
    return [one(it) for it in items]
