import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxgraph.graphs import (
    CompatibilityGraph,
    NoContextualityError,
    complete_graph,
    cycle_graph,
    is_chordal,
    wheel_graph,
)
from ctxgraph.marginals import vorobyev_extend
from ctxgraph.polytope import classical_bound, evaluate, membership, ncycle_quantum_value, ncycle_witness
from ctxgraph.quantum import (
    AmbiguousCommutationError,
    EmbeddingError,
    IdealMeasurement,
    MeasurementSet,
    QuantumState,
    born_behavior,
    commutator_norm,
    commute,
    compatibility_graph,
    cone_vectors,
    RealizationError,
    embed_add_vertex,
    even_cycle_realization,
    even_cycle_search,
    odd_cycle_realization,
    random_measurement_set,
    random_state,
    realize_nonchordal,
)
from ctxgraph.tensor import MAX_DENSE_DIM, DenseLimitError, TensorOp, commutator
from oracles import brute_max

Z_BASIS = IdealMeasurement.from_dense([np.diag([1, 0]), np.diag([0, 1])])
X_BASIS = IdealMeasurement.from_dense([np.full((2, 2), 0.5), np.array([[0.5, -0.5], [-0.5, 0.5]])])


def dense_commutator_norm(a: IdealMeasurement, b: IdealMeasurement) -> float:
    """Reference: assemble full matrices."""
    return max(np.linalg.norm(p.dense() @ q.dense() - q.dense() @ p.dense(), 2)
               for p in a.projectors for q in b.projectors)


class TestTensorOp:
    def test_products_match_dense(self):
        rng = np.random.default_rng(0)
        fs = [rng.normal(size=(2, 2)) for _ in range(3)]
        gs = [rng.normal(size=(2, 2)) for _ in range(3)]
        a, b = TensorOp.product(fs), TensorOp.product(gs)
        assert np.allclose((a @ b).dense(), a.dense() @ b.dense())
        assert np.allclose((a + b).dense(), a.dense() + b.dense())
        assert np.isclose(commutator(a, b).norm(), np.linalg.norm(a.dense() @ b.dense() - b.dense() @ a.dense(), 2))

    def test_simplify_merges_single_register(self):
        p = np.diag([1.0, 0.0])
        q = np.eye(2) - p
        op = TensorOp.product([np.eye(3), p]) + TensorOp.product([np.eye(3), q])
        s = op.simplify()
        assert len(s.terms) == 1
        assert np.allclose(s.dense(), np.eye(6))

    def test_expectation(self):
        rho = TensorOp.product([np.diag([1, 0]), np.eye(2) / 2])
        op = TensorOp.product([np.diag([0.3, 0.7]), np.diag([2.0, 4.0])])
        assert np.isclose(op.expectation(rho), 0.3 * 3.0)

    def test_dense_limit(self):
        big = TensorOp.identity([2] * 13)
        with pytest.raises(DenseLimitError):
            big.dense()
        # the norm only needs the registers where terms differ
        assert big.norm() == pytest.approx(1.0)


class TestCommute:
    def test_self(self):
        assert commute(Z_BASIS, Z_BASIS)

    def test_pauli_pair(self):
        assert not commute(Z_BASIS, X_BASIS)
        assert commutator_norm(Z_BASIS, X_BASIS) == pytest.approx(0.5)

    def test_kcbs_neighbours(self):
        _, s = odd_cycle_realization(5)
        assert commutator_norm(s[0], s[1]) < 1e-12
        assert dense_commutator_norm(s[0], s[1]) < 1e-12

    def test_layout_mismatch(self):
        with pytest.raises(ValueError):
            commute(Z_BASIS, IdealMeasurement.from_dense([np.eye(3)]))


class TestCompatibilityGraph:
    def test_kcbs(self):
        assert compatibility_graph(odd_cycle_realization(5)[1]) == cycle_graph(5)

    def test_chsh(self):
        assert compatibility_graph(even_cycle_realization(4)[1]) == cycle_graph(4)

    def test_single(self):
        assert compatibility_graph([Z_BASIS]) == CompatibilityGraph(1)

    def test_ambiguous_rejected(self):
        eps = 1e-8
        u = np.array([np.cos(eps), np.sin(eps)])
        near = IdealMeasurement.binary(np.outer(u, u))
        with pytest.raises(AmbiguousCommutationError):
            compatibility_graph([Z_BASIS, near])


class TestBorn:
    def test_eigenstate(self):
        s = MeasurementSet((Z_BASIS,), CompatibilityGraph(1))
        b = born_behavior(QuantumState.pure([0, 1]), s)
        assert np.allclose(b.tables[(0,)], [0, 1])

    def test_maximally_mixed(self):
        m = IdealMeasurement.binary(np.diag([1.0, 0, 0]))
        b = born_behavior(QuantumState.product([np.eye(3) / 3]), MeasurementSet((m,), CompatibilityGraph(1)))
        assert b.tables[(0,)][1] == pytest.approx(1 / 3)

    def test_kcbs_value(self):
        state, s = odd_cycle_realization(5)
        b = born_behavior(state, s)
        w = ncycle_witness(range(5), s.outcomes)
        assert float(evaluate(w, b)) == pytest.approx(ncycle_quantum_value(5), abs=1e-12)
        for t in b.tables.values():
            assert t.min() >= 0 and t.sum() == pytest.approx(1)


class TestCycles:
    @pytest.mark.parametrize("n", [5, 7, 9])
    def test_odd(self, n):
        state, s = odd_cycle_realization(n)
        v = cone_vectors(n)
        assert max(abs(v[i] @ v[(i + 1) % n]) for i in range(n)) < 1e-12
        assert compatibility_graph(s) == cycle_graph(n)
        b = born_behavior(state, s)
        assert membership(b).contextual

    @pytest.mark.parametrize("n", [4, 6])
    def test_odd_rejects(self, n):
        with pytest.raises(ValueError):
            odd_cycle_realization(n)

    def test_square(self):
        state, s = even_cycle_realization(4)
        assert s.dims == (4,)
        b = born_behavior(state, s)
        w = ncycle_witness(range(4), s.outcomes)
        assert brute_max(w, s.outcomes.sizes) == 2
        assert float(evaluate(w, b)) == pytest.approx(2 * np.sqrt(2), abs=1e-12)

    @pytest.mark.parametrize("n", [6, 8])
    def test_even_exact_graph(self, n):
        state, s = even_cycle_realization(n)
        assert compatibility_graph(s) == cycle_graph(n)
        # every non-edge, including pairs acting on different qubits of the
        # two-qubit block (e.g. vertices 0 and 3), fails to commute
        for i, j in itertools.combinations(range(n), 2):
            if (j - i) % n not in (1, n - 1):
                assert commutator_norm(s[i], s[j]) > 1e-6
        b = born_behavior(state, s)
        w = ncycle_witness(range(n), s.outcomes)
        assert float(evaluate(w, b)) == pytest.approx(n * np.cos(np.pi / n), abs=1e-3)
        assert classical_bound(w, cycle_graph(n), s.outcomes) == n - 2

    def test_even_rejects(self):
        with pytest.raises(ValueError):
            even_cycle_realization(5)


class TestEmbedding:
    def _kcbs(self):
        return odd_cycle_realization(5)

    def test_universal_new_vertex(self):
        state, s = self._kcbs()
        g2 = cycle_graph(5).add_vertex(range(5))
        s2, rho2 = embed_add_vertex(s, state, g2)
        new = s2[5]
        assert all(commute(new, s2[i]) for i in range(5))
        b1, b2 = born_behavior(state, s), born_behavior(rho2, s2)
        for i in range(5):
            assert np.allclose(b2.table([i])[:2], b1.table([i]), atol=1e-12)
            assert b2.table([i])[2] == pytest.approx(0, abs=1e-15)

    def test_isolated_new_vertex(self):
        state, s = self._kcbs()
        s2, _ = embed_add_vertex(s, state, cycle_graph(5).add_vertex([]))
        assert all(not commute(s2[5], s2[i]) for i in range(5))
        assert compatibility_graph(s2) == cycle_graph(5).add_vertex([])

    def test_two_neighbours(self):
        state, s = self._kcbs()
        g2 = cycle_graph(5).add_vertex([0, 1])
        s2, rho2 = embed_add_vertex(s, state, g2)
        assert compatibility_graph(s2) == g2
        for i in range(5):
            for a in range(2):
                old = state.probability(s[i].projectors[a])
                new = rho2.probability(s2[i].projectors[a])
                assert abs(old - new) < 1e-12

    def test_factorwise_matches_dense(self):
        state, s = self._kcbs()
        s2, _ = embed_add_vertex(s, state, cycle_graph(5).add_vertex([0, 2]))
        for i, j in itertools.combinations(range(6), 2):
            assert commutator_norm(s2[i], s2[j]) == pytest.approx(dense_commutator_norm(s2[i], s2[j]), abs=1e-12)

    def test_precondition(self):
        state, s = self._kcbs()
        with pytest.raises(EmbeddingError):
            embed_add_vertex(s, state, cycle_graph(6))

    def test_projector_validity(self):
        state, s = self._kcbs()
        s2, rho2 = embed_add_vertex(s, state, cycle_graph(5).add_vertex([3]))
        for m in s2.measurements:
            m.validate(1e-10)
        rho2.validate()


class TestRealize:
    def test_pentagon(self):
        r = realize_nonchordal(cycle_graph(5))
        assert r.measurements.dims == (3,)
        assert r.membership.contextual

    def test_square(self):
        r = realize_nonchordal(cycle_graph(4))
        assert r.membership.contextual
        assert float(r.cycle_witness.value) == pytest.approx(2 * np.sqrt(2), abs=1e-9)
        assert r.cycle_witness.classical_bound == 2

    def test_wheel(self):
        g = wheel_graph(5)
        r = realize_nonchordal(g)
        assert r.cycle == (0, 1, 2, 3, 4)
        assert r.measurements.dims == (3,) + (2,) * 5
        assert compatibility_graph(r.measurements) == g
        assert r.membership.contextual
        assert abs(float(r.cycle_witness.gap) - float(r.base_witness.gap)) < 1e-9

    def test_chordal_rejected(self):
        with pytest.raises(NoContextualityError):
            realize_nonchordal(complete_graph(4))

    def test_large_layout_stays_factorwise(self):
        # square plus three extra vertices: 4 * 2^(4+5+6) total dimension
        g = cycle_graph(4).add_vertex([0, 1]).add_vertex([1, 2, 4]).add_vertex([4, 5])
        assert not is_chordal(g).chordal
        r = realize_nonchordal(g, check_membership=False)
        assert TensorOp.identity(r.measurements.dims).total_dim > MAX_DENSE_DIM
        assert compatibility_graph(r.measurements) == g
        assert abs(float(r.cycle_witness.gap) - float(r.base_witness.gap)) < 1e-9

    def test_explicit_cycle(self):
        g = wheel_graph(5)
        with pytest.raises(ValueError):
            realize_nonchordal(g, cycle=(0, 1, 5, 3))


class TestChordalSanity:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]), st.integers(2, 5))
    def test_chordal_sets_are_noncontextual(self, seed, dim, n):
        rng = np.random.default_rng(seed)
        ms = random_measurement_set(n, dim, rng)
        try:
            g = compatibility_graph(ms)
        except AmbiguousCommutationError:
            return
        if not is_chordal(g).chordal:
            return
        s = MeasurementSet(tuple(ms), g)
        b = born_behavior(random_state(dim, rng), s)
        assert not membership(b).contextual
        j = vorobyev_extend(g, b)
        assert j.is_valid(1e-9)


class TestEvenSearch:
    def test_hexagon_in_dimension_four(self):
        state, s = even_cycle_realization(6, method="search")
        assert s.dims == (4,)
        assert compatibility_graph(s) == cycle_graph(6)
        assert commutator_norm(s[0], s[3]) > 1e-6
        w = ncycle_witness(range(6), s.outcomes)
        assert float(evaluate(w, born_behavior(state, s))) > 4

    def test_budget_failure_is_reported(self):
        with pytest.raises(RealizationError):
            even_cycle_search(6, attempts=1, seed=0)

    def test_pipeline_option(self):
        r = realize_nonchordal(cycle_graph(6), even_method="search")
        assert r.measurements.dims == (4,) and r.membership.contextual
