"""Lossless network description and linearized power-flow sensitivities.

The network is purely inductive.  Under the P-delta decoupling assumption the
real-power Jacobian with respect to bus angles is a susceptance-weighted
graph Laplacian (exactly so at flat start).  Eliminating load-only buses by a
Schur complement gives the generator-side sensitivity ``K_P`` and the map
``D_P`` from load-power rates to generator-power rates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DuplicateId,
    IslandedAreaInterior,
    SingularReduction,
    UnknownBus,
    ValidationError,
)

GENERATOR = "generator"
LOAD = "load"


@dataclass(frozen=True)
class GeneratorParams:
    """Governor-turbine-generator parameters (per unit on system base).

    Parameters
    ----------
    M : float
        Inertia of the combined set [p.u. s].
    D : float
        Damping [p.u.].
    T_t, T_g : float
        Turbine and governor time constants [s].
    K_t : float
        Turbine gain.
    r : float
        Governor droop.
    """

    M: float
    D: float = 0.0
    T_t: float = 1e6
    T_g: float = 1e6
    K_t: float = 1.0
    r: float = 0.05

    def __post_init__(self):
        if not self.M > 0:
            raise ValidationError(f"inertia M must be positive, got {self.M}")
        if not self.D >= 0:
            raise ValidationError(f"damping D must be non-negative, got {self.D}")
        for name in ("T_t", "T_g", "r"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class Bus:
    id: str
    kind: str = GENERATOR
    generator: GeneratorParams | None = None
    load: float = 0.0
    area: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        if self.area is not None:
            object.__setattr__(self, "area", str(self.area))
        if self.kind not in (GENERATOR, LOAD):
            raise ValidationError(f"bus {self.id}: unknown kind {self.kind!r}")
        if (self.kind == GENERATOR) != (self.generator is not None):
            raise ValidationError(
                f"bus {self.id}: generator parameters are required for kind "
                f"'{GENERATOR}' and forbidden for kind '{LOAD}'"
            )


@dataclass(frozen=True)
class Line:
    from_bus: str
    to_bus: str
    x: float

    def __post_init__(self):
        object.__setattr__(self, "from_bus", str(self.from_bus))
        object.__setattr__(self, "to_bus", str(self.to_bus))
        if not self.x > 0:
            raise ValidationError(f"line {self.from_bus}-{self.to_bus}: reactance must be positive, got {self.x}")
        if self.from_bus == self.to_bus:
            raise ValidationError(f"line {self.from_bus}-{self.to_bus}: endpoints must differ")

    @property
    def name(self):
        return f"{self.from_bus}-{self.to_bus}"

    @property
    def susceptance(self):
        return 1.0 / self.x


@dataclass(frozen=True)
class OperatingPoint:
    """Per-bus angle [rad] and voltage magnitude [p.u.]; missing buses default to flat start."""

    delta: Mapping[str, float] = field(default_factory=dict)
    v: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "delta", {str(k): float(x) for k, x in self.delta.items()})
        object.__setattr__(self, "v", {str(k): float(x) for k, x in self.v.items()})
        bad = [k for k, x in self.v.items() if not x > 0]
        if bad:
            raise ValidationError(f"voltage magnitude must be positive at bus(es) {bad}")

    def angles(self, bus_ids):
        return np.array([self.delta.get(b, 0.0) for b in bus_ids])

    def voltages(self, bus_ids):
        return np.array([self.v.get(b, 1.0) for b in bus_ids])


FLAT_START = OperatingPoint()


@dataclass(frozen=True)
class NetworkModel:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    areas: Mapping[str, tuple[str, ...]]

    @property
    def bus_ids(self) -> list[str]:
        return [b.id for b in self.buses]

    @property
    def generator_ids(self) -> list[str]:
        return [b.id for b in self.buses if b.kind == GENERATOR]

    @property
    def load_ids(self) -> list[str]:
        return [b.id for b in self.buses if b.kind == LOAD]

    @property
    def area_ids(self) -> list[str]:
        return list(self.areas)

    @property
    def tie_lines(self) -> tuple[Line, ...]:
        return tuple(ln for ln in self.lines if self.area_of(ln.from_bus) != self.area_of(ln.to_bus))

    @property
    def internal_lines(self) -> tuple[Line, ...]:
        return tuple(ln for ln in self.lines if self.area_of(ln.from_bus) == self.area_of(ln.to_bus))

    def bus(self, bus_id) -> Bus:
        bus_id = str(bus_id)
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise UnknownBus(f"no bus with id {bus_id!r}")

    def area_of(self, bus_id) -> str:
        return self.bus(bus_id).area

    def generators(self) -> list[GeneratorParams]:
        return [b.generator for b in self.buses if b.kind == GENERATOR]

    def with_lines(self, lines: Iterable[Line]) -> "NetworkModel":
        return build_network(self.buses, lines, self.areas)

    def with_buses(self, buses: Iterable[Bus]) -> "NetworkModel":
        return build_network(buses, self.lines, self.areas)


@dataclass(frozen=True)
class ReducedNetwork:
    """Generator-side sensitivities after eliminating load-only buses.

    ``K_P`` is n x n [p.u./rad]; ``D_P`` is n x m and maps load-power rates
    at the eliminated buses to generator-power rates (entering with a minus
    sign).
    """

    K_P: np.ndarray
    D_P: np.ndarray
    generator_ids: tuple[str, ...]
    load_ids: tuple[str, ...]


def build_network(buses, lines, areas) -> NetworkModel:
    """Validate buses, lines and the area partition and return a :class:`NetworkModel`.

    ``areas`` maps an area id to the bus ids it contains.  Bus ``area``
    fields are filled from it; a conflicting pre-set field is an error.
    """
    buses = list(buses)
    lines = tuple(lines)
    if not buses:
        raise ValidationError("a network needs at least one bus")

    seen = set()
    for b in buses:
        if b.id in seen:
            raise DuplicateId(f"duplicate bus id {b.id!r}")
        seen.add(b.id)

    area_of = {}
    area_map = {}
    for area, members in areas.items():
        area = str(area)
        if area in area_map:
            raise DuplicateId(f"duplicate area id {area!r}")
        members = tuple(str(m) for m in members)
        for m in members:
            if m not in seen:
                raise UnknownBus(f"area {area!r} lists unknown bus {m!r}")
            if m in area_of:
                raise ValidationError(f"bus {m!r} is assigned to areas {area_of[m]!r} and {area!r}")
            area_of[m] = area
        area_map[area] = members

    placed = []
    for b in buses:
        if b.id not in area_of:
            raise ValidationError(f"bus {b.id!r} does not belong to any area")
        if b.area is not None and b.area != area_of[b.id]:
            raise ValidationError(f"bus {b.id!r} declares area {b.area!r} but is listed under {area_of[b.id]!r}")
        placed.append(replace(b, area=area_of[b.id]))

    for ln in lines:
        for end in (ln.from_bus, ln.to_bus):
            if end not in seen:
                raise UnknownBus(f"line {ln.name} references unknown bus {end!r}")

    for area, members in area_map.items():
        if not members:
            raise ValidationError(f"area {area!r} has no buses")
        internal = [(ln.from_bus, ln.to_bus) for ln in lines
                    if area_of[ln.from_bus] == area and area_of[ln.to_bus] == area]
        if _count_components(members, internal) > 1:
            raise IslandedAreaInterior(f"the internal network of area {area!r} is not connected")

    return NetworkModel(buses=tuple(placed), lines=lines, areas=area_map)


def _count_components(nodes, edges) -> int:
    adj = {n: [] for n in nodes}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    unseen = set(nodes)
    count = 0
    while unseen:
        count += 1
        queue = deque([unseen.pop()])
        while queue:
            for nb in adj[queue.popleft()]:
                if nb in unseen:
                    unseen.remove(nb)
                    queue.append(nb)
    return count


def connected_components(network: NetworkModel) -> int:
    """Number of connected components of the full line graph."""
    return _count_components(network.bus_ids, [(ln.from_bus, ln.to_bus) for ln in network.lines])


def jacobian(network: NetworkModel, op: OperatingPoint = FLAT_START) -> np.ndarray:
    """Return dP/d(delta) over all buses, in ``network.bus_ids`` order."""
    ids = network.bus_ids
    index = {b: i for i, b in enumerate(ids)}
    delta = op.angles(ids)
    v = op.voltages(ids)
    J = np.zeros((len(ids), len(ids)))
    for ln in network.lines:
        i, j = index[ln.from_bus], index[ln.to_bus]
        b = v[i] * v[j] * np.cos(delta[i] - delta[j]) / ln.x
        J[i, j] -= b
        J[j, i] -= b
    J[np.diag_indices_from(J)] = -J.sum(axis=1)
    return J


def reduce(J, generator_mask, bus_ids=None) -> ReducedNetwork:
    """Eliminate the load-only buses of ``J`` by Schur complement.

    Parameters
    ----------
    J : (N, N) array
        Bus Jacobian.
    generator_mask : (N,) bool array
        True for buses that keep a generator state.
    bus_ids : sequence of str, optional
        Labels carried into the result; defaults to ``"0".."N-1"``.
    """
    J = np.asarray(J, dtype=float)
    g = np.asarray(generator_mask, dtype=bool)
    if J.ndim != 2 or J.shape[0] != J.shape[1] or g.shape != (J.shape[0],):
        raise ValidationError("J must be square and generator_mask must match its size")
    if bus_ids is None:
        bus_ids = [str(i) for i in range(J.shape[0])]
    bus_ids = np.asarray(list(bus_ids), dtype=object)
    l = ~g
    J_GG = J[np.ix_(g, g)]
    if not l.any():
        return ReducedNetwork(J_GG.copy(), np.zeros((g.sum(), 0)), tuple(bus_ids[g]), ())

    J_GL = J[np.ix_(g, l)]
    J_LG = J[np.ix_(l, g)]
    J_LL = J[np.ix_(l, l)]
    # a load-only bus with no path to a generator makes J_LL singular
    if np.linalg.cond(J_LL) > 1e12:
        raise SingularReduction("load-bus block of the Jacobian is singular (islanded load bus?)")
    D_P = np.linalg.solve(J_LL.T, J_GL.T).T
    K_P = J_GG - D_P @ J_LG
    return ReducedNetwork(K_P, D_P, tuple(bus_ids[g]), tuple(bus_ids[l]))


def reduce_network(network: NetworkModel, op: OperatingPoint = FLAT_START) -> ReducedNetwork:
    mask = [b.kind == GENERATOR for b in network.buses]
    return reduce(jacobian(network, op), mask, network.bus_ids)


def disconnect_ties(network: NetworkModel) -> NetworkModel:
    """Copy of ``network`` with every area-crossing line removed."""
    return NetworkModel(buses=network.buses, lines=network.internal_lines, areas=network.areas)
