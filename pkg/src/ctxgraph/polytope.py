"""Membership in the noncontextual polytope and noncontextuality witnesses.

A behavior is noncontextual iff its context tables are a convex mixture of
the 0/1 behaviors induced by deterministic, context-independent outcome
assignments. Membership is a linear feasibility problem; when it fails the
simplex multipliers give a violated linear inequality.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .graphs import CompatibilityGraph, maximal_cliques
from .marginals import (
    DEFAULT_TOL,
    ContextMarginals,
    InconsistentMarginalsError,
    OutcomeSpace,
    check_consistency,
    is_exact,
)
from .simplex import FLOAT_TOL, SolverError, solve_feasibility

MAX_VERTICES = 2**20

# A behavior carries the same data as a family of context marginals; overlap
# consistency is checked by ``membership`` rather than assumed.
Behavior = ContextMarginals

__all__ = [
    "Behavior",
    "MembershipResult",
    "NotABehaviorFamilyError",
    "SolverError",
    "Witness",
    "classical_bound",
    "classical_range",
    "correlator_witness",
    "deterministic_vertices",
    "evaluate",
    "membership",
    "ncycle_witness",
]


class NotABehaviorFamilyError(InconsistentMarginalsError):
    """Context tables disagree on overlaps, so the polytope question is ill-posed."""


class VertexBoundError(ValueError):
    pass


def _assignment_indices(outcomes: OutcomeSpace) -> np.ndarray:
    sizes = outcomes.sizes
    total = int(np.prod(sizes, dtype=object))
    if total > MAX_VERTICES:
        raise VertexBoundError(f"{total} deterministic assignments exceeds bound {MAX_VERTICES}")
    grid = np.indices(sizes).reshape(len(sizes), -1).T
    return grid


def deterministic_vertices(g: CompatibilityGraph, outcomes: OutcomeSpace) -> list[tuple]:
    """Every deterministic assignment, as a tuple of outcome labels indexed by vertex."""
    if outcomes.n != g.n:
        raise ValueError("outcome space does not match graph")
    idx = _assignment_indices(outcomes)
    return [tuple(outcomes.labels[v][k] for v, k in enumerate(row)) for row in idx]


def _cells(shape: Sequence[int], assign: np.ndarray, clique: Sequence[int]) -> np.ndarray:
    """Flat cell index hit by each assignment in the table over ``clique``."""
    if not clique:
        return np.zeros(len(assign), dtype=int)
    return np.ravel_multi_index(tuple(assign[:, list(clique)].T), tuple(shape))


def _vertex_matrix(contexts, outcomes: OutcomeSpace, assign: np.ndarray) -> np.ndarray:
    blocks = []
    for ctx in contexts:
        shape = outcomes.shape(ctx)
        size = int(np.prod(shape))
        block = np.zeros((size, len(assign)), dtype=np.int8)
        block[_cells(shape, assign, ctx), np.arange(len(assign))] = 1
        blocks.append(block)
    return np.vstack(blocks)


def _scores(coeffs: Mapping, outcomes: OutcomeSpace, assign: np.ndarray) -> np.ndarray:
    """Value of the functional on every deterministic assignment."""
    exact = any(is_exact(np.asarray(c)) for c in coeffs.values())
    total = np.zeros(len(assign), dtype=object if exact else float)
    if exact:
        total[:] = Fraction(0)
    for clique, c in coeffs.items():
        c = np.asarray(c)
        clique = tuple(clique)
        total = total + c.reshape(-1)[_cells(outcomes.shape(clique), assign, clique)]
    return total


def classical_bound(coeffs: Mapping, g: CompatibilityGraph, outcomes: OutcomeSpace):
    """Maximum of ``sum_c <coeffs[c], P_c>`` over deterministic behaviors.

    ``coeffs`` maps cliques (any cliques, not only maximal ones) to arrays
    shaped like their outcome tables.
    """
    for clique in coeffs:
        if not g.is_clique(clique):
            raise ValueError(f"{tuple(clique)} is not a clique")
    if not coeffs:
        return 0
    return max(_scores(coeffs, outcomes, _assignment_indices(outcomes)))


def classical_range(coeffs: Mapping, g: CompatibilityGraph, outcomes: OutcomeSpace) -> tuple:
    s = _scores(coeffs, outcomes, _assignment_indices(outcomes)) if coeffs else [0]
    return min(s), max(s)


def evaluate(coeffs: Mapping, b: ContextMarginals):
    """Value of the linear functional on a behavior."""
    total = 0
    for clique, c in coeffs.items():
        total = total + (np.asarray(c) * b.table(clique)).sum()
    return total


@dataclass
class Witness:
    """Linear functional on context tables with its classical bound."""

    coeffs: dict
    classical_bound: object
    value: object

    @property
    def gap(self):
        return self.value - self.classical_bound

    def to_dict(self) -> dict:
        from .io import encode_coeffs, encode_number

        return {
            "coeffs": encode_coeffs(self.coeffs),
            "classical_bound": encode_number(self.classical_bound),
            "value": encode_number(self.value),
        }


@dataclass
class MembershipResult:
    verdict: str  # "noncontextual" | "contextual"
    weights: list = field(default_factory=list)  # [(assignment labels, weight)]
    witness: Witness | None = None
    lp_objective: object = 0
    exact: bool = False
    cycle_witness: dict | None = None  # most violated n-cycle inequality, when the graph has an induced cycle

    @property
    def contextual(self) -> bool:
        return self.verdict == "contextual"

    def mixture(self, b: ContextMarginals) -> dict:
        """Context tables reproduced by the returned weights."""
        out = {}
        labels = b.outcomes.labels
        for ctx in b.contexts:
            t = np.zeros(b.outcomes.shape(ctx), dtype=object if self.exact else float)
            if self.exact:
                t[...] = Fraction(0)
            for assignment, w in self.weights:
                idx = tuple(labels[v].index(assignment[v]) for v in ctx)
                t[idx] += w
            out[ctx] = t
        return out

    def to_dict(self) -> dict:
        from .io import encode_number

        return {
            "verdict": self.verdict,
            "weights": [{"assignment": list(a), "weight": encode_number(w)} for a, w in self.weights],
            "witness": None if self.witness is None else self.witness.to_dict(),
            "cycle_witness": self.cycle_witness,
        }


def membership(b: ContextMarginals, tol: float | None = None, exact: bool | None = None) -> MembershipResult:
    """Decide whether ``b`` lies in the noncontextual polytope.

    Exact rational arithmetic is used when every table is rational
    (``Fraction`` entries); otherwise a floating-point simplex with feasibility
    tolerance ``1e-8``. The returned witness is shifted and scaled so its
    classical bound is 1 (or 0 when it is constant on the polytope).

    Raises
    ------
    NotABehaviorFamilyError
        If context tables are not normalized or disagree on overlaps.
    SolverError
        If the LP solver fails; never conflated with a contextual verdict.
    """
    if exact is None:
        exact = b.exact
    if tol is None:
        tol = 0 if exact else FLOAT_TOL
    rep = check_consistency(b, DEFAULT_TOL if not exact else 0)
    if not rep:
        raise NotABehaviorFamilyError(rep)

    contexts = b.contexts
    tables = b.context_tables()
    assign = _assignment_indices(b.outcomes)
    M = _vertex_matrix(contexts, b.outcomes, assign)
    rhs = np.concatenate([np.asarray(tables[c]).reshape(-1) for c in contexts])
    A = np.vstack([M, np.ones((1, len(assign)), dtype=np.int8)])
    rhs = np.concatenate([rhs, np.asarray([1], dtype=rhs.dtype)])
    if exact:
        A = A.astype(object)
    res = solve_feasibility(A, rhs, exact=exact, tol=tol if not exact else 0)

    labels = b.outcomes.labels
    if res.feasible:
        weights = []
        for k in np.nonzero([w != 0 for w in res.x])[0]:
            w = res.x[k]
            if not exact and w <= 1e-15:
                continue
            weights.append((tuple(labels[v][i] for v, i in enumerate(assign[k])), w))
        return MembershipResult("noncontextual", weights, None, res.objective, exact)

    witness = _witness_from_multipliers(res.y[:-1], contexts, b, assign, M, exact)
    if not witness.gap > 0:  # pragma: no cover - guards against float breakdown
        raise SolverError(f"infeasible LP but extracted witness has gap {witness.gap}")
    return MembershipResult("contextual", [], witness, res.objective, exact, best_cycle_witness(b))


def _witness_from_multipliers(y, contexts, b, assign, M, exact) -> Witness:
    y = np.asarray(y, dtype=object if exact else float)
    scores = M.T.astype(object if exact else float) @ y
    lo = min(scores)
    hi = max(scores)
    coeffs = {}
    start = 0
    for ctx in contexts:
        shape = b.outcomes.shape(ctx)
        size = int(np.prod(shape))
        coeffs[ctx] = y[start:start + size].reshape(shape).copy()
        start += size
    # every context table sums to one, so a constant added to one context's
    # coefficients shifts the functional uniformly
    coeffs[contexts[0]] = coeffs[contexts[0]] - lo
    bound = hi - lo
    if (bound != 0) if exact else (float(bound) > 1e-12):
        scale = 1 / bound
    else:
        biggest = max(abs(x) for c in coeffs.values() for x in c.flat)
        scale = 1 / biggest
    coeffs = {c: v * scale for c, v in coeffs.items()}
    cb = classical_bound(coeffs, b.graph, b.outcomes)
    return Witness(coeffs, cb, evaluate(coeffs, b))


# ---------------------------------------------------------------------------
# standard functionals


def _sign_vector(k: int) -> np.ndarray:
    # outcome 0 reads as +1, every other outcome as -1
    s = -np.ones(k, dtype=int)
    s[0] = 1
    return s


def correlator_witness(signed_edges: Mapping, outcomes: OutcomeSpace) -> dict:
    """Coefficients of ``sum_e sign_e <A_u A_v>`` with outcome 0 read as +1."""
    coeffs = {}
    for (u, v), sgn in signed_edges.items():
        e = (min(u, v), max(u, v))
        su = _sign_vector(len(outcomes.labels[e[0]]))
        sv = _sign_vector(len(outcomes.labels[e[1]]))
        c = np.outer(su, sv) * sgn
        coeffs[e] = coeffs.get(e, 0) + c
    return coeffs


def ncycle_signs(k: int) -> list[int]:
    """Edge signs of the standard n-cycle inequality (an odd number of minus signs).

    Odd cycles: all edges anticorrelated (the KCBS form). Even cycles: all
    correlated except the closing edge (the CHSH / chained form).
    """
    if k % 2:
        return [-1] * k
    return [1] * (k - 1) + [-1]


def ncycle_witness(cycle: Sequence[int], outcomes: OutcomeSpace) -> dict:
    """Correlator witness on the edges of ``cycle``; classical bound ``len(cycle) - 2``."""
    k = len(cycle)
    signs = ncycle_signs(k)
    edges = {(cycle[i], cycle[(i + 1) % k]): signs[i] for i in range(k)}
    return correlator_witness(edges, outcomes)


def ncycle_quantum_value(k: int) -> float:
    """Largest quantum value of the n-cycle correlator inequality (cross-check target)."""
    c = np.cos(np.pi / k)
    if k % 2:
        return (3 * k * c - k) / (1 + c)
    return k * c


def best_cycle_witness(b: ContextMarginals) -> dict | None:
    """Most violated correlator inequality on the graph's first induced cycle.

    Every sign pattern with an odd number of minus signs is tried; each has
    classical bound ``n - 2`` (recomputed here by enumeration).
    """
    from .graphs import is_chordal

    cert = is_chordal(b.graph)
    if cert.chordal:
        return None
    cycle = list(cert.induced_cycle)
    k = len(cycle)
    best = None
    for flips in itertools.product((1, -1), repeat=k - 1):
        signs = list(flips) + [1 if flips.count(-1) % 2 else -1]
        edges = {(cycle[i], cycle[(i + 1) % k]): signs[i] for i in range(k)}
        coeffs = correlator_witness(edges, b.outcomes)
        value = evaluate(coeffs, b)
        if best is None or value > best[0]:
            best = (value, signs, coeffs)
    value, signs, coeffs = best
    from .io import encode_number

    bound = classical_bound(coeffs, b.graph, b.outcomes)
    bound = int(bound) if float(bound).is_integer() else bound  # integer coefficients
    return {
        "cycle": cycle,
        "signs": signs,
        "classical_bound": encode_number(bound),
        "value": encode_number(value),
    }
