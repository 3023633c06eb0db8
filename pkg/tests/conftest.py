"""Shared fixtures: the three-bus two-area test system in its paper variants."""

import numpy as np
import pytest

from interarea import Bus, GeneratorParams, Line, build_network

B = 15.0  # line susceptance of the reference system [p.u.]


def three_bus(x2=1 / B, masses=(3.2, 3.2, 3.2), tie=True, damping=0.0):
    """Buses 1 and 2 form area 1, bus 3 is area 2; line 2-3 is the tie."""
    buses = [Bus(str(i + 1), generator=GeneratorParams(M=m, D=damping)) for i, m in enumerate(masses)]
    lines = [Line("1", "2", 1 / B)]
    if tie:
        lines.append(Line("2", "3", x2))
    return build_network(buses, lines, {"1": ["1", "2"], "2": ["3"]})


def random_network(rng, n_machines, n_areas=None):
    """Connected random lossless network with one generator per bus.

    A random spanning tree guarantees connectivity; areas are contiguous
    blocks of the tree order, so each area interior is connected too.
    """
    ids = [str(i + 1) for i in range(n_machines)]
    lines = []
    for k in range(1, n_machines):
        parent = int(rng.integers(0, k))
        lines.append(Line(ids[parent], ids[k], float(rng.uniform(0.05, 1.0))))
    present = {frozenset((ln.from_bus, ln.to_bus)) for ln in lines}
    for _ in range(int(rng.integers(0, n_machines))):
        a, b = rng.choice(n_machines, size=2, replace=False)
        key = frozenset((ids[a], ids[b]))
        if key not in present:
            present.add(key)
            lines.append(Line(ids[a], ids[b], float(rng.uniform(0.05, 1.0))))
    buses = [Bus(i, generator=GeneratorParams(M=float(rng.uniform(1.0, 40.0)))) for i in ids]
    return build_network(buses, lines, {"1": ids})


@pytest.fixture
def case1():
    return three_bus()


@pytest.fixture
def case2():
    return three_bus(x2=10 / B)


@pytest.fixture
def case3():
    return three_bus(tie=False)


@pytest.fixture
def inertia2():
    return three_bus(masses=(3.2, 3.2, 32.0))


def upper_frequencies(lam, tol=1e-6):
    lam = np.asarray(lam)
    return sorted(float(v.imag) for v in lam if v.imag > tol)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        terminalreporter.write_line(verdicts[number])
