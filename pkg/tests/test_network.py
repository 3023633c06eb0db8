
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_network
from interarea import (Bus, GeneratorParams, Line, OperatingPoint, build_network, connected_components,
                       disconnect_ties, jacobian, reduce, reduce_network)
from interarea.errors import DuplicateId, IslandedAreaInterior, SingularReduction, UnknownBus, ValidationError

G = GeneratorParams(M=3.2)


def gen(i):
    return Bus(str(i), generator=G)


def load(i):
    return Bus(str(i), kind="load")


class TestBuildNetwork:
    def test_reference_system_has_one_tie(self, case1):
        assert [ln.name for ln in case1.tie_lines] == ["2-3"]
        assert [ln.name for ln in case1.internal_lines] == ["1-2"]
        assert case1.area_of("3") == "2"

    def test_single_bus_has_no_ties(self):
        net = build_network([gen(1)], [], {"A": ["1"]})
        assert net.tie_lines == ()

    def test_unknown_line_endpoint(self):
        with pytest.raises(UnknownBus):
            build_network([gen(1), gen(2)], [Line("1", "4", 0.1)], {"A": ["1", "2"]})

    def test_duplicate_bus(self):
        with pytest.raises(DuplicateId):
            build_network([gen(1), gen(1)], [], {"A": ["1"]})

    def test_islanded_area_interior(self):
        # buses 1 and 3 share an area but are only linked through bus 2 of another area
        lines = [Line("1", "2", 0.1), Line("2", "3", 0.1)]
        with pytest.raises(IslandedAreaInterior):
            build_network([gen(1), gen(2), gen(3)], lines, {"A": ["1", "3"], "B": ["2"]})

    def test_bus_without_area(self):
        with pytest.raises(ValidationError):
            build_network([gen(1), gen(2)], [Line("1", "2", 0.1)], {"A": ["1"]})

    def test_line_validation(self):
        with pytest.raises(ValidationError):
            Line("1", "2", -1.0)
        with pytest.raises(ValidationError):
            Line("1", "1", 0.1)

    def test_generator_kind_consistency(self):
        with pytest.raises(ValidationError):
            Bus("1")
        with pytest.raises(ValidationError):
            Bus("1", kind="load", generator=G)


class TestJacobian:
    def test_two_bus(self):
        net = build_network([gen(1), gen(2)], [Line("1", "2", 1 / 15)], {"A": ["1", "2"]})
        np.testing.assert_allclose(jacobian(net), [[15, -15], [-15, 15]], rtol=1e-14)

    def test_three_bus_path(self, case1):
        expected = [[15, -15, 0], [-15, 30, -15], [0, -15, 15]]
        np.testing.assert_allclose(jacobian(case1), expected, rtol=1e-14)

    def test_single_bus(self):
        net = build_network([gen(1)], [], {"A": ["1"]})
        np.testing.assert_array_equal(jacobian(net), [[0.0]])

    def test_operating_point_entries(self):
        net = build_network([gen(1), gen(2)], [Line("1", "2", 0.5)], {"A": ["1", "2"]})
        op = OperatingPoint({"1": 0.3, "2": -0.1}, {"1": 1.05, "2": 0.95})
        b = 1.05 * 0.95 * np.cos(0.4) / 0.5
        np.testing.assert_allclose(jacobian(net, op), [[b, -b], [-b, b]], rtol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7))
    def test_laplacian_properties(self, seed, n):
        net = random_network(np.random.default_rng(seed), n)
        J = jacobian(net)
        np.testing.assert_allclose(J, J.T, atol=1e-12)
        np.testing.assert_allclose(J.sum(axis=1), 0.0, atol=1e-10 * max(1.0, np.abs(J).max()))
        nullity = n - np.linalg.matrix_rank(J)
        assert nullity == connected_components(net)

    def test_nullity_counts_components(self, case3):
        J = jacobian(case3)
        assert 3 - np.linalg.matrix_rank(J) == connected_components(case3) == 2


class TestReduce:
    def test_all_generators_keeps_jacobian(self, case1):
        red = reduce_network(case1)
        np.testing.assert_array_equal(red.K_P, jacobian(case1))
        assert red.D_P.shape == (3, 0)

    def test_interior_load_bus_series_susceptance(self):
        net = build_network([gen(1), load(2), gen(3)], [Line("1", "2", 1 / 15), Line("2", "3", 1 / 15)],
                            {"A": ["1", "2", "3"]})
        red = reduce_network(net)
        np.testing.assert_allclose(red.K_P, [[7.5, -7.5], [-7.5, 7.5]], rtol=1e-13)
        # each generator takes half of a load change at the midpoint
        np.testing.assert_allclose(red.D_P, [[-0.5], [-0.5]], rtol=1e-13)
        assert red.generator_ids == ("1", "3") and red.load_ids == ("2",)

    def test_single_generator(self):
        red = reduce(np.zeros((1, 1)), [True])
        np.testing.assert_array_equal(red.K_P, [[0.0]])
        assert red.D_P.shape == (1, 0)

    def test_islanded_load_bus_is_singular(self):
        J = np.array([[15.0, -15.0, 0.0], [-15.0, 15.0, 0.0], [0.0, 0.0, 0.0]])
        with pytest.raises(SingularReduction):
            reduce(J, [True, True, False])

    def test_schur_complement_oracle(self):
        rng = np.random.default_rng(7)
        ids = [str(i) for i in range(6)]
        lines = [Line(ids[k], ids[k + 1], float(rng.uniform(0.05, 1))) for k in range(5)]
        lines.append(Line("0", "4", 0.3))
        buses = [gen(i) if i in (0, 2, 5) else load(i) for i in range(6)]
        net = build_network(buses, lines, {"A": ids})
        J = jacobian(net)
        g = np.array([b.kind == "generator" for b in net.buses])
        J_GG, J_GL = J[np.ix_(g, g)], J[np.ix_(g, ~g)]
        J_LG, J_LL = J[np.ix_(~g, g)], J[np.ix_(~g, ~g)]
        red = reduce_network(net)
        np.testing.assert_allclose(red.K_P, J_GG - J_GL @ np.linalg.inv(J_LL) @ J_LG, atol=1e-10)
        np.testing.assert_allclose(red.D_P, J_GL @ np.linalg.inv(J_LL), atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_conservation_and_permutation(self, seed):
        rng = np.random.default_rng(seed)
        net = random_network(rng, int(rng.integers(3, 7)))
        n = len(net.buses)
        mask = np.zeros(n, dtype=bool)
        mask[rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)] = True
        J = jacobian(net)
        red = reduce(J, mask)
        scale = np.abs(red.K_P).max() + 1.0
        e = np.ones(red.K_P.shape[0])
        assert np.abs(e @ red.K_P).max() <= 1e-10 * scale
        assert np.abs(red.K_P @ e).max() <= 1e-10 * scale

        perm = rng.permutation(n)
        red_p = reduce(J[np.ix_(perm, perm)], mask[perm])
        # generators keep their relative order under the permutation
        gen_pos = np.flatnonzero(mask)
        order = [list(gen_pos).index(p) for p in perm if mask[p]]
        np.testing.assert_allclose(red_p.K_P, red.K_P[np.ix_(order, order)], atol=1e-10 * scale)


class TestDisconnectTies:
    def test_reference_system(self, case1):
        dis = disconnect_ties(case1)
        assert [ln.name for ln in dis.lines] == ["1-2"]
        assert dis.buses == case1.buses

    def test_idempotent(self, case1, case3):
        once = disconnect_ties(case1)
        assert disconnect_ties(once) == once
        assert disconnect_ties(case3).lines == case3.lines

    def test_two_ties_removed(self):
        lines = [Line("1", "2", 0.1), Line("3", "4", 0.1), Line("1", "3", 0.2), Line("2", "4", 0.3)]
        net = build_network([gen(i) for i in range(1, 5)], lines, {"A": ["1", "2"], "B": ["3", "4"]})
        dis = disconnect_ties(net)
        assert set(dis.lines) == set(lines) - set(net.tie_lines)
        assert {ln.name for ln in net.tie_lines} == {"1-3", "2-4"}
