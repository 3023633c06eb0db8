"""Transformed state-space models built from generator blocks and ``K_P``.

Two forms are available:

``full``
    four states per generator, ``(omega_G, P_t, a)`` for every machine
    followed by all ``P_G``.
``reduced``
    the swing-only limit of very slow turbine/governor dynamics, ``omega_G``
    for every machine followed by all ``P_G``.

In both forms the generator outputs obey ``dP_G/dt = K_P omega_G + dF_e/dt
- D_P dP_L/dt``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import DimensionMismatch, UnknownBus, ValidationError
from .network import FLAT_START, GeneratorParams, NetworkModel, OperatingPoint, ReducedNetwork, reduce_network

OMEGA = "omega_G"
TURBINE = "P_t"
VALVE = "a"
POWER = "P_G"
FULL = "full"
REDUCED = "reduced"


class StateLabel(NamedTuple):
    generator: str
    tag: str

    def __str__(self):
        return f"{self.tag}_{self.generator}"

    @classmethod
    def parse(cls, text: str) -> "StateLabel":
        for tag in (OMEGA, TURBINE, POWER, VALVE):
            if text.startswith(tag + "_"):
                return cls(text[len(tag) + 1:], tag)
        raise ValueError(f"not a state label: {text!r}")


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """``dx/dt = A x + B_L dP_L/dt + B_F dF_e/dt``.

    Attributes
    ----------
    A : (N, N) array
        System matrix [1/s].
    labels : tuple of StateLabel
        One label per row of ``A``.
    B_L : (N, m) array
        Load-rate input map for the load-only buses, ``[0; -D_P]``.
    generator_ids, load_ids : tuple of str
        Bus ids of the machines (``K_P`` order) and of the eliminated buses.
    form : {"full", "reduced"}
    K_P : (n, n) array
        Generator-side sensitivity used in the bottom block row.
    """

    A: np.ndarray
    labels: tuple
    B_L: np.ndarray
    generator_ids: tuple
    load_ids: tuple
    form: str
    K_P: np.ndarray

    @property
    def n_states(self):
        return self.A.shape[0]

    @property
    def label_names(self) -> list[str]:
        return [str(s) for s in self.labels]

    def index(self, label) -> int:
        if isinstance(label, str):
            label = StateLabel.parse(label)
        return self.labels.index(StateLabel(str(label[0]), label[1]))

    def indices(self, tag) -> np.ndarray:
        return np.array([i for i, s in enumerate(self.labels) if s.tag == tag], dtype=int)

    @property
    def omega_selector(self) -> np.ndarray:
        """The 0/1 matrix ``E`` picking ``omega_G`` out of the state vector."""
        E = np.zeros((len(self.generator_ids), self.n_states))
        E[np.arange(len(self.generator_ids)), self.indices(OMEGA)] = 1.0
        return E

    @property
    def B_F(self) -> np.ndarray:
        """Input map of the effective neighbour-flow rate ``dF_e/dt`` (unit entries on ``P_G`` rows)."""
        B = np.zeros((self.n_states, len(self.generator_ids)))
        B[self.indices(POWER), np.arange(len(self.generator_ids))] = 1.0
        return B

    def input_column(self, bus_id) -> np.ndarray:
        """State-space column through which a load-power rate at ``bus_id`` enters.

        Load-only buses use their ``B_L`` column.  A load co-located with a
        generator changes that machine's output one-for-one, so its column is
        a unit entry on the machine's ``P_G`` row.
        """
        bus_id = str(bus_id)
        if bus_id in self.load_ids:
            return self.B_L[:, self.load_ids.index(bus_id)].copy()
        if bus_id in self.generator_ids:
            col = np.zeros(self.n_states)
            col[self.index((bus_id, POWER))] = 1.0
            return col
        raise UnknownBus(f"bus {bus_id!r} is not part of this model")


def gtg_block(p: GeneratorParams) -> tuple[np.ndarray, np.ndarray]:
    """Local governor-turbine-generator matrix and its ``P_G`` input column."""
    A_lc = np.array([
        [-p.D / p.M, 1.0 / p.M, 0.0],
        [0.0, -1.0 / p.T_t, p.K_t / p.T_t],
        [-1.0 / p.T_g, 0.0, -1.0 / (p.r * p.T_g)],
    ])
    c_m = np.array([-1.0 / p.M, 0.0, 0.0])
    return A_lc, c_m


def _check(generators, reduced):
    n = reduced.K_P.shape[0]
    if reduced.K_P.shape != (n, n) or len(generators) != n:
        raise DimensionMismatch(f"{len(generators)} generators but K_P is {reduced.K_P.shape}")
    if reduced.D_P.shape[0] != n:
        raise DimensionMismatch(f"D_P has {reduced.D_P.shape[0]} rows, expected {n}")
    return n


def assemble_full(generators: Sequence[GeneratorParams], reduced: ReducedNetwork) -> StateSpaceModel:
    n = _check(generators, reduced)
    blocks = [gtg_block(p) for p in generators]
    A_lc = block_diag(*[b[0] for b in blocks]) if n else np.zeros((0, 0))
    C_m = block_diag(*[b[1][:, None] for b in blocks]) if n else np.zeros((0, 0))
    E = np.zeros((n, 3 * n))
    E[np.arange(n), 3 * np.arange(n)] = 1.0
    A = np.block([[A_lc, C_m], [reduced.K_P @ E, np.zeros((n, n))]])

    gids = tuple(reduced.generator_ids)
    labels = [StateLabel(g, tag) for g in gids for tag in (OMEGA, TURBINE, VALVE)]
    labels += [StateLabel(g, POWER) for g in gids]
    B_L = np.vstack([np.zeros((3 * n, reduced.D_P.shape[1])), -reduced.D_P])
    return StateSpaceModel(A, tuple(labels), B_L, gids, tuple(reduced.load_ids), FULL, reduced.K_P.copy())


def assemble_reduced(generators: Sequence[GeneratorParams], reduced: ReducedNetwork) -> StateSpaceModel:
    n = _check(generators, reduced)
    M = np.array([p.M for p in generators], dtype=float)
    D = np.array([p.D for p in generators], dtype=float)
    A = np.block([[np.diag(-D / M), np.diag(-1.0 / M)], [reduced.K_P, np.zeros((n, n))]])

    gids = tuple(reduced.generator_ids)
    labels = [StateLabel(g, OMEGA) for g in gids] + [StateLabel(g, POWER) for g in gids]
    B_L = np.vstack([np.zeros((n, reduced.D_P.shape[1])), -reduced.D_P])
    return StateSpaceModel(A, tuple(labels), B_L, gids, tuple(reduced.load_ids), REDUCED, reduced.K_P.copy())


def build_model(network: NetworkModel, form: str = REDUCED, op: OperatingPoint = FLAT_START) -> StateSpaceModel:
    """Reduce ``network`` at ``op`` and assemble the requested model form."""
    reduced = reduce_network(network, op)
    gens = [network.bus(g).generator for g in reduced.generator_ids]
    if form == FULL:
        return assemble_full(gens, reduced)
    if form == REDUCED:
        return assemble_reduced(gens, reduced)
    raise ValidationError(f"unknown model form {form!r}")
