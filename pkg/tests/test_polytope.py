from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxgraph.graphs import CompatibilityGraph, cycle_graph, maximal_cliques, path_graph
from ctxgraph.marginals import ContextMarginals, OutcomeSpace, random_joint, tables_from_mapping
from ctxgraph.polytope import (
    NotABehaviorFamilyError,
    VertexBoundError,
    best_cycle_witness,
    classical_bound,
    correlator_witness,
    deterministic_vertices,
    evaluate,
    membership,
    ncycle_witness,
)
from ctxgraph.simplex import solve_feasibility
from oracles import brute_max, lp_membership

F = Fraction
H = F(1, 2)
SAME = {(0, 0): H, (1, 1): H}
DIFF = {(0, 1): H, (1, 0): H}


def pr_box(exact=True):
    same, diff = SAME, DIFF
    if not exact:
        same = {k: 0.5 for k in SAME}
        diff = {k: 0.5 for k in DIFF}
    return tables_from_mapping(cycle_graph(4), OutcomeSpace.uniform(4),
                               {(0, 1): same, (1, 2): same, (2, 3): same, (0, 3): diff})


def deterministic_behavior(g, outcomes, assignment):
    tables = {}
    for ctx in maximal_cliques(g):
        t = np.zeros(outcomes.shape(ctx), dtype=object)
        t[...] = F(0)
        t[tuple(outcomes.labels[v].index(assignment[v]) for v in ctx)] = F(1)
        tables[ctx] = t
    return ContextMarginals(g, outcomes, tables)


def mix(b1, b2, lam):
    return ContextMarginals(b1.graph, b1.outcomes,
                            {c: lam * b1.tables[c] + (1 - lam) * b2.tables[c] for c in b1.contexts})


class TestVertices:
    @pytest.mark.parametrize(
        "g, sizes, count",
        [(path_graph(2), (2, 2), 4), (cycle_graph(5), (2,) * 5, 32), (path_graph(3), (2, 3, 2), 12)],
    )
    def test_counts(self, g, sizes, count):
        assert len(deterministic_vertices(g, OutcomeSpace.from_sizes(sizes))) == count

    def test_bound(self):
        with pytest.raises(VertexBoundError):
            deterministic_vertices(CompatibilityGraph(21), OutcomeSpace.uniform(21))


class TestClassicalBound:
    def test_chsh(self):
        o = OutcomeSpace.uniform(4)
        w = ncycle_witness((0, 1, 2, 3), o)
        assert classical_bound(w, cycle_graph(4), o) == 2 == brute_max(w, o.sizes)

    def test_kcbs_anticorrelation_minimum(self):
        o = OutcomeSpace.uniform(5)
        plain = correlator_witness({(i, (i + 1) % 5): 1 for i in range(5)}, o)
        neg = {c: -t for c, t in plain.items()}
        assert -classical_bound(neg, cycle_graph(5), o) == -3
        assert classical_bound(ncycle_witness(range(5), o), cycle_graph(5), o) == 3

    def test_zero(self):
        o = OutcomeSpace.uniform(3)
        assert classical_bound({(0, 1): np.zeros((2, 2))}, path_graph(3), o) == 0

    @pytest.mark.parametrize("k", [4, 5, 6, 7])
    def test_ncycle_bound_is_n_minus_2(self, k):
        o = OutcomeSpace.uniform(k)
        assert classical_bound(ncycle_witness(range(k), o), cycle_graph(k), o) == k - 2


class TestMembership:
    def test_deterministic(self):
        o = OutcomeSpace.uniform(4)
        b = deterministic_behavior(cycle_graph(4), o, (1, 0, 0, 1))
        res = membership(b)
        assert res.verdict == "noncontextual" and res.exact
        assert res.weights == [((1, 0, 0, 1), 1)]

    def test_uniform(self):
        o = OutcomeSpace.uniform(5)
        b = ContextMarginals(cycle_graph(5), o, {c: np.full((2, 2), F(1, 4), dtype=object)
                                                 for c in maximal_cliques(cycle_graph(5))})
        res = membership(b)
        assert not res.contextual
        mixed = res.mixture(b)
        assert all((mixed[c] == b.tables[c]).all() for c in b.contexts)

    @pytest.mark.parametrize("exact", [True, False])
    def test_pr_box(self, exact):
        b = pr_box(exact)
        res = membership(b)
        assert res.contextual and res.exact == exact
        w = res.witness
        assert w.classical_bound == pytest.approx(1)
        assert w.value > w.classical_bound
        assert brute_max(w.coeffs, b.outcomes.sizes) == pytest.approx(float(w.classical_bound))
        chsh = best_cycle_witness(b)
        assert chsh["classical_bound"] == 2 and chsh["value"] == 4

    def test_pr_box_exact_witness_value(self):
        w = membership(pr_box()).witness
        assert w.classical_bound == 1 and w.value == F(3, 2)

    def test_inconsistent_is_not_contextual(self):
        g = CompatibilityGraph.from_edges(3, [(0, 1), (0, 2)])
        b = tables_from_mapping(g, OutcomeSpace.uniform(3), {(0, 1): {(0, 0): H, (1, 1): H}, (0, 2): {(0, 0): 1}})
        with pytest.raises(NotABehaviorFamilyError):
            membership(b)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([4, 5, 6]))
    def test_agrees_with_scipy(self, seed, n):
        # random behaviors on a cycle: convex mixtures of a consistent family and the PR box
        rng = np.random.default_rng(seed)
        g = cycle_graph(n)
        o = OutcomeSpace.uniform(n)
        base = ContextMarginals.from_joint(g, random_joint(o, rng))
        noise = {c: np.full((2, 2), 0.25) for c in base.contexts}
        twisted = {c: (np.array([[0.5, 0], [0, 0.5]]) if c != (0, n - 1) else np.array([[0, 0.5], [0.5, 0]]))
                   for c in base.contexts}
        lam, mu = rng.random(2)
        tables = {c: lam * twisted[c] + (1 - lam) * (mu * base.tables[c] + (1 - mu) * noise[c]) for c in base.contexts}
        b = ContextMarginals(g, o, tables)
        res = membership(b)
        assert res.contextual != lp_membership(b.tables, o.sizes, b.contexts)
        if res.contextual:
            w = res.witness
            assert w.value - w.classical_bound > 0
            assert brute_max(w.coeffs, o.sizes) == pytest.approx(float(w.classical_bound), abs=1e-9)
            assert float(evaluate(w.coeffs, b)) == pytest.approx(float(w.value))
        else:
            mixed = res.mixture(b)
            assert max(np.abs(mixed[c] - b.tables[c]).max() for c in b.contexts) < 1e-8
            assert all(wt >= 0 for _, wt in res.weights)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1), st.floats(0, 1))
    def test_convexity_closure(self, s1, s2, lam):
        g = cycle_graph(4)
        o = OutcomeSpace.uniform(4)
        verts = deterministic_vertices(g, o)
        r1, r2 = np.random.default_rng(s1), np.random.default_rng(s2)
        b1 = deterministic_behavior(g, o, verts[r1.integers(len(verts))])
        b2 = deterministic_behavior(g, o, verts[r2.integers(len(verts))])
        lam = F(lam).limit_denominator(1000)
        assert not membership(mix(b1, b2, lam)).contextual


class TestSimplex:
    def test_exact_feasible_point(self):
        A = np.array([[1, 1, 0], [0, 1, 1]])
        b = np.array([F(1, 2), F(3, 4)])
        res = solve_feasibility(A, b, exact=True)
        assert res.feasible
        assert list(A @ res.x) == list(b) and all(x >= 0 for x in res.x)

    def test_farkas_certificate(self):
        # x1 + x2 = 1 and x1 + x2 = 2 cannot both hold
        A = np.array([[1, 1], [1, 1]])
        b = np.array([F(1), F(2)])
        res = solve_feasibility(A, b, exact=True)
        assert not res.feasible
        y = res.y
        assert all(v <= 0 for v in y @ A) and y @ b > 0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_float_matches_scipy(self, seed):
        from scipy.optimize import linprog

        rng = np.random.default_rng(seed)
        A = rng.integers(-2, 3, size=(4, 7)).astype(float)
        b = rng.integers(-3, 4, size=4).astype(float)
        ours = solve_feasibility(A, b).feasible
        ref = linprog(np.zeros(7), A_eq=A, b_eq=b, bounds=(0, None), method="highs").status == 0
        assert ours == ref

    def test_degenerate_cycle_guard(self):
        # highly degenerate system (many zero right-hand sides) still terminates
        A = np.vstack([np.eye(6), np.ones((1, 6))]).astype(object)
        b = np.array([F(0)] * 5 + [F(1), F(1)])
        assert solve_feasibility(A, b, exact=True).feasible
