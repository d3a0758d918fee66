"""Ideal (projective) measurement sets with prescribed compatibility graphs.

Projectors and states are ``TensorOp`` objects over a shared register
layout, so commutators, products and Born probabilities are evaluated
register by register. The ancilla embedding grows the layout by one qubit
register per old measurement each time a vertex is added; nothing here ever
assembles the full Kronecker product.

Outcome convention for the cycle witnesses: outcome 0 reads as +1 and every
other outcome as -1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graphs import (
    CompatibilityGraph,
    NoContextualityError,
    cycle_graph,
    is_chordal,
    is_induced_cycle,
    maximal_cliques,
)
from .marginals import ContextMarginals, OutcomeSpace
from .polytope import MembershipResult, Witness, classical_bound, evaluate, membership, ncycle_witness
from .seesaw import seesaw_max
from .tensor import TensorOp

COMMUTE_TOL = 1e-10
NONCOMMUTE_MARGIN = 1e-6
PROJECTOR_TOL = 1e-10
MAX_REGISTERS = 48

KET_PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
PSI = np.outer(KET_PLUS, KET_PLUS).astype(complex)


class LayoutError(ValueError):
    """Operators live on different register layouts."""


class AmbiguousCommutationError(ValueError):
    """A commutator norm falls between the commutation tolerance and the
    non-commutation margin, so neither edge nor non-edge is certified."""


class EmbeddingError(ValueError):
    pass


class RegisterBudgetError(ValueError):
    pass


class RealizationError(RuntimeError):
    """A constructed realization failed its own verification."""


# ---------------------------------------------------------------------------
# states and measurements


@dataclass(frozen=True)
class QuantumState:
    rho: TensorOp

    @classmethod
    def product(cls, factors: Sequence[np.ndarray]) -> "QuantumState":
        return cls(TensorOp.product(factors))

    @classmethod
    def pure(cls, psi: np.ndarray) -> "QuantumState":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls.product([np.outer(psi, psi.conj())])

    @property
    def dims(self) -> tuple:
        return self.rho.dims

    def tensor(self, other: "QuantumState") -> "QuantumState":
        return QuantumState(self.rho.tensor(other.rho))

    def validate(self, tol: float = PROJECTOR_TOL) -> None:
        tr = self.rho.expectation(TensorOp.identity(self.dims))
        if abs(tr - 1) > tol:
            raise ValueError(f"state trace is {tr}")
        if (self.rho - self.rho.dagger()).norm() > tol:
            raise ValueError("state is not Hermitian")
        if self.rho.is_product:
            for f in self.rho.terms[0][1]:
                if np.linalg.eigvalsh((f + f.conj().T) / 2)[0] * np.real(self.rho.terms[0][0]) < -tol:
                    raise ValueError("state factor has a negative eigenvalue")

    def probability(self, op: TensorOp) -> float:
        return float(np.real(op.expectation(self.rho)))


@dataclass(frozen=True)
class IdealMeasurement:
    """Projective measurement; ``projectors[k]`` belongs to ``outcomes[k]``."""

    outcomes: tuple
    projectors: tuple  # of TensorOp

    def __post_init__(self):
        if len(self.outcomes) != len(self.projectors) or not self.projectors:
            raise ValueError("need one projector per outcome")
        dims = self.projectors[0].dims
        if any(p.dims != dims for p in self.projectors):
            raise LayoutError("projectors of one measurement must share a layout")

    @classmethod
    def from_dense(cls, projectors: Sequence[np.ndarray], outcomes: Sequence | None = None) -> "IdealMeasurement":
        outcomes = tuple(range(len(projectors))) if outcomes is None else tuple(outcomes)
        return cls(outcomes, tuple(TensorOp.product([p]) for p in projectors))

    @classmethod
    def binary(cls, p: np.ndarray) -> "IdealMeasurement":
        """Outcome 0 onto ``I - p``, outcome 1 onto ``p``."""
        p = np.asarray(p, dtype=complex)
        return cls.from_dense([np.eye(len(p)) - p, p])

    @property
    def dims(self) -> tuple:
        return self.projectors[0].dims

    def validate(self, tol: float = PROJECTOR_TOL) -> None:
        total = TensorOp.zero(self.dims)
        for k, p in enumerate(self.projectors):
            if (p - p.dagger()).norm() > tol:
                raise ValueError(f"projector {k} is not Hermitian")
            if (p @ p - p).norm() > tol:
                raise ValueError(f"projector {k} is not idempotent")
            for q in self.projectors[k + 1:]:
                if (p @ q).norm() > tol:
                    raise ValueError("outcome projectors are not orthogonal")
            total = total + p
        if (total - TensorOp.identity(self.dims)).norm() > tol:
            raise ValueError("outcome projectors do not sum to the identity")


def commutator_norm(a: IdealMeasurement, b: IdealMeasurement) -> float:
    """Largest spectral norm of ``[P, Q]`` over outcome projector pairs."""
    if a.dims != b.dims:
        raise LayoutError(f"layouts differ: {a.dims} vs {b.dims}")
    worst = 0.0
    for p in a.projectors:
        for q in b.projectors:
            worst = max(worst, (p @ q - q @ p).norm())
    return worst


def commute(a: IdealMeasurement, b: IdealMeasurement, tol: float = COMMUTE_TOL) -> bool:
    return commutator_norm(a, b) <= tol


@dataclass(frozen=True)
class MeasurementSet:
    measurements: tuple
    graph: CompatibilityGraph  # intended compatibility graph

    def __post_init__(self):
        if len(self.measurements) != self.graph.n:
            raise ValueError("one measurement per vertex required")
        if self.measurements and any(m.dims != self.dims for m in self.measurements):
            raise LayoutError("measurements must share a register layout")

    @property
    def dims(self) -> tuple:
        return self.measurements[0].dims

    @property
    def outcomes(self) -> OutcomeSpace:
        return OutcomeSpace(tuple(m.outcomes for m in self.measurements))

    def __len__(self):
        return len(self.measurements)

    def __getitem__(self, i) -> IdealMeasurement:
        return self.measurements[i]

    def verify(self, tol: float = COMMUTE_TOL, margin: float = NONCOMMUTE_MARGIN) -> None:
        for m in self.measurements:
            m.validate()
        got = compatibility_graph(self, tol, margin)
        if got != self.graph:
            raise RealizationError(f"compatibility graph {got.to_text()} differs from {self.graph.to_text()}")


def compatibility_graph(
    s: MeasurementSet | Sequence[IdealMeasurement],
    tol: float = COMMUTE_TOL,
    margin: float = NONCOMMUTE_MARGIN,
) -> CompatibilityGraph:
    """Edge iff every projector pair commutes within ``tol``.

    Raises ``AmbiguousCommutationError`` if a pair's commutator norm lies in
    ``(tol, margin]``.
    """
    ms = s.measurements if isinstance(s, MeasurementSet) else tuple(s)
    edges = []
    for i, j in itertools.combinations(range(len(ms)), 2):
        c = commutator_norm(ms[i], ms[j])
        if c <= tol:
            edges.append((i, j))
        elif c <= margin:
            raise AmbiguousCommutationError(f"measurements {i},{j}: commutator norm {c:.3e}")
    return CompatibilityGraph.from_edges(len(ms), edges)


def born_behavior(state: QuantumState, s: MeasurementSet, graph: CompatibilityGraph | None = None) -> ContextMarginals:
    """Context tables ``p(a_c) = tr(rho prod_v P_{v, a_v})`` over maximal cliques.

    ``graph`` defaults to the set's intended graph, which callers should have
    verified; a context with non-commuting members raises.
    """
    g = s.graph if graph is None else graph
    if state.dims != s.dims:
        raise LayoutError("state and measurements use different layouts")
    outcomes = s.outcomes
    tables = {}
    for ctx in maximal_cliques(g):
        for u, v in itertools.combinations(ctx, 2):
            if not commute(s[u], s[v]):
                raise RealizationError(f"context {ctx} contains non-commuting measurements {u},{v}")
        t = np.zeros(outcomes.shape(ctx))
        for cell in itertools.product(*(range(len(s[v].outcomes)) for v in ctx)):
            op = TensorOp.identity(s.dims)
            for v, a in zip(ctx, cell):
                op = (op @ s[v].projectors[a]).simplify()
            t[cell] = state.probability(op)
        t[(t < 0) & (t > -1e-12)] = 0.0
        tables[ctx] = t
    return ContextMarginals(g, outcomes, tables)


# ---------------------------------------------------------------------------
# cycle realizations


def _observable(alpha: float) -> np.ndarray:
    return np.array([[np.cos(alpha), np.sin(alpha)], [np.sin(alpha), -np.cos(alpha)]], dtype=complex)


def cone_vectors(n: int) -> np.ndarray:
    """Unit vectors in R^3 at a common polar angle with consecutive (cyclically)
    vectors orthogonal; valid for odd ``n``."""
    c = np.cos(np.pi / n)
    cos_t = np.sqrt(c / (1 + c))
    sin_t = np.sqrt(1 - cos_t**2)
    phi = np.arange(n) * np.pi * (n - 1) / n
    return np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), np.full(n, cos_t)], axis=1)


def odd_cycle_realization(n: int) -> tuple[QuantumState, MeasurementSet]:
    """Rank-one projectors onto cone vectors in dimension 3; the state is the cone axis."""
    if n < 5 or n % 2 == 0:
        raise ValueError("odd_cycle_realization needs odd n >= 5")
    vecs = cone_vectors(n)
    for i in range(n):
        if abs(vecs[i] @ vecs[(i + 1) % n]) > 1e-12:
            raise RealizationError("cone vectors are not orthogonal")  # pragma: no cover
    ms = tuple(IdealMeasurement.binary(np.outer(v, v)) for v in vecs)
    s = MeasurementSet(ms, cycle_graph(n))
    s.verify()
    return QuantumState.pure([0.0, 0.0, 1.0]), s


def _two_qubit_cycle_observables(n: int) -> list[np.ndarray]:
    """Vertex ``i`` measures ``cos(a) Z + sin(a) X`` with ``a = i pi / n`` on qubit ``i mod 2``."""
    eye = np.eye(2)
    out = []
    for i in range(n):
        a = _observable(i * np.pi / n)
        out.append(np.kron(a, eye) if i % 2 == 0 else np.kron(eye, a))
    return out


def _chain_vectors(n: int, rng: np.random.Generator) -> np.ndarray:
    """Real unit vectors in R^3 with ``v_i`` orthogonal to ``v_{i+1}`` cyclically,
    drawn at random and closed with a cross product."""
    vs = [rng.normal(size=3)]
    vs[0] /= np.linalg.norm(vs[0])
    for _ in range(n - 2):
        x = rng.normal(size=3)
        x -= (x @ vs[-1]) * vs[-1]
        vs.append(x / np.linalg.norm(x))
    last = np.cross(vs[-1], vs[0])
    vs.append(last / np.linalg.norm(last))
    return np.array(vs)


def _rank_one_commutator(u: np.ndarray, v: np.ndarray) -> float:
    ip = abs(u @ v)
    return ip * np.sqrt(max(0.0, 1 - ip**2))


EVEN_METHODS = ("direct_sum", "search")


def even_cycle_realization(
    n: int, seed: int = 0, attempts: int = 100, method: str = "direct_sum"
) -> tuple[QuantumState, MeasurementSet]:
    """Two-qubit chained realization; for ``n >= 6`` a three-dimensional block
    is appended so that non-adjacent cross-party pairs stop commuting.

    ``method="search"`` instead runs ``even_cycle_search`` in one
    four-dimensional register (``attempts`` see-saw starts).

    On the two-qubit block every measurement of one qubit commutes with every
    measurement of the other, which for ``n >= 6`` adds edges absent from the
    cycle. The extra block carries rank-one projectors onto a random
    orthogonal representation of the cycle (consecutive vectors orthogonal,
    all other pairs neither orthogonal nor parallel) and the state has no
    weight on it, so the witness value is that of the two-qubit block.
    """
    if n < 4 or n % 2:
        raise ValueError("even_cycle_realization needs even n >= 4")
    if method not in EVEN_METHODS:
        raise ValueError(f"method must be one of {EVEN_METHODS}")
    if method == "search" and n > 4:
        return even_cycle_search(n, seed=seed, attempts=attempts)
    obs = _two_qubit_cycle_observables(n)
    phi = np.zeros(4)
    phi[[0, 3]] = 1 / np.sqrt(2)
    if n == 4:
        ms = tuple(IdealMeasurement.from_dense([(np.eye(4) + a) / 2, (np.eye(4) - a) / 2]) for a in obs)
        s = MeasurementSet(ms, cycle_graph(n))
        s.verify()
        return QuantumState.pure(phi), s
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        vecs = _chain_vectors(n, rng)
        margins = [
            _rank_one_commutator(vecs[i], vecs[j])
            for i, j in itertools.combinations(range(n), 2)
            if (j - i) % n not in (1, n - 1)
        ]
        if min(margins) > 1e-3:
            break
    else:  # pragma: no cover
        raise RealizationError(f"no well-separated orthogonal representation of C_{n} in {attempts} draws")
    ms = []
    for a, v in zip(obs, vecs):
        p1 = np.zeros((7, 7), dtype=complex)
        p1[:4, :4] = (np.eye(4) - a) / 2
        p1[4:, 4:] = np.outer(v, v)
        ms.append(IdealMeasurement.binary(p1))
    s = MeasurementSet(tuple(ms), cycle_graph(n))
    s.verify()
    return QuantumState.pure(np.concatenate([phi, np.zeros(3)])), s


def even_cycle_search(
    n: int, dim: int = 4, seed: int = 0, attempts: int = 40, budget: int = 200
) -> tuple[QuantumState, MeasurementSet]:
    """Numerical realization of ``C_n`` in a single ``dim``-dimensional register.

    Each attempt is one see-saw start on the n-cycle witness; the first
    output whose compatibility graph is exactly ``C_n`` (edges within
    ``COMMUTE_TOL``, non-edges above ``NONCOMMUTE_MARGIN``) and whose
    behavior violates the witness is returned. The see-saw enforces only the
    edges, and its best values usually commute on some non-edge, so the
    accepted realization can be well below the optimum.
    """
    if n < 4 or n % 2:
        raise ValueError("even_cycle_search needs even n >= 4")
    g = cycle_graph(n)
    coeffs = ncycle_witness(tuple(range(n)), OutcomeSpace.uniform(n))
    for k in range(attempts):
        res = seesaw_max(coeffs, g, dim, restarts=1, budget=budget, seed=seed + k)
        ms = tuple(IdealMeasurement.from_dense(p) for p in res.projectors)
        try:
            if compatibility_graph(ms) != g:
                continue
        except AmbiguousCommutationError:
            continue
        s = MeasurementSet(ms, g)
        state = QuantumState.pure(res.state)
        if float(evaluate(coeffs, born_behavior(state, s))) > n - 2 + 1e-9:
            s.verify()
            return state, s
    raise RealizationError(f"no exact C_{n} realization with a violation in {attempts} see-saw starts (d={dim})")


def cycle_realization(n: int, seed: int = 0, even_method: str = "direct_sum") -> tuple[QuantumState, MeasurementSet]:
    return odd_cycle_realization(n) if n % 2 else even_cycle_realization(n, seed=seed, method=even_method)


# ---------------------------------------------------------------------------
# ancilla embedding


def _ancilla_factors(n_old: int, site: int | None, at_site: np.ndarray, elsewhere) -> list[np.ndarray]:
    out = []
    for j in range(n_old):
        if j == site:
            out.append(at_site)
        else:
            out.append(elsewhere(j) if callable(elsewhere) else elsewhere)
    return out


def embed_add_vertex(
    s1: MeasurementSet, state: QuantumState, g2: CompatibilityGraph, verify: bool = True
) -> tuple[MeasurementSet, QuantumState]:
    """Add vertex ``g2.n - 1`` to a realization of ``g2`` minus that vertex.

    One qubit ancilla per old measurement is appended. Old measurement ``i``
    keeps its outcomes as ``P_a (x) |0><0|_i`` and gains one residual outcome
    ``I (x) |1><1|_i``, labelled one past its largest label, which has
    probability zero on the lifted state. The new measurement has outcomes
    ``0 -> I - Q`` and ``1 -> Q`` with ``Q = I (x) prod_j P_j``, where
    ``P_j = I`` if ``j`` is adjacent to the new vertex and ``|+><+|`` otherwise.
    The lifted state is ``rho (x) |0><0|^{(x) n}``.
    """
    n1 = s1.graph.n
    if g2.n != n1 + 1 or g2.induced_subgraph(range(n1)) != s1.graph:
        raise EmbeddingError("old graph must be the induced subgraph of the target on vertices 0..n-1")
    if state.dims != s1.dims:
        raise LayoutError("state and measurements use different layouts")
    if len(s1.dims) + n1 > MAX_REGISTERS:
        raise RegisterBudgetError(f"embedding would need {len(s1.dims) + n1} registers (> {MAX_REGISTERS})")
    eye2 = np.eye(2, dtype=complex)
    new_ms = []
    for i, m in enumerate(s1.measurements):
        lift0 = TensorOp.product(_ancilla_factors(n1, i, KET0, eye2))
        projs = [p.tensor(lift0) for p in m.projectors]
        projs.append(TensorOp.identity(s1.dims).tensor(TensorOp.product(_ancilla_factors(n1, i, KET1, eye2))))
        labels = tuple(m.outcomes) + (_residual_label(m.outcomes),)
        new_ms.append(IdealMeasurement(labels, tuple(projs)))
    nbrs = g2.neighbors(n1)
    q = TensorOp.identity(s1.dims).tensor(
        TensorOp.product([eye2 if j in nbrs else PSI for j in range(n1)])
    )
    ident = TensorOp.identity(q.dims)
    new_ms.append(IdealMeasurement((0, 1), ((ident - q).simplify(), q)))
    s2 = MeasurementSet(tuple(new_ms), g2)
    rho2 = state.tensor(QuantumState.product([KET0] * n1))
    if verify:
        s2.verify()
        check_preservation(state, s1, rho2, s2)
    return s2, rho2


def _residual_label(labels: Sequence):
    ints = [x for x in labels if isinstance(x, (int, np.integer))]
    if len(ints) == len(labels):
        return max(ints) + 1
    k = 0
    while f"r{k}" in labels:
        k += 1
    return f"r{k}"


def check_preservation(state: QuantumState, s1: MeasurementSet, state2: QuantumState, s2: MeasurementSet,
                       tol: float = 1e-12) -> float:
    """Largest change of an old outcome probability after embedding; raises above ``tol``."""
    worst = 0.0
    for i, m in enumerate(s1.measurements):
        for a, p in enumerate(m.projectors):
            worst = max(worst, abs(state.probability(p) - state2.probability(s2[i].projectors[a])))
    if worst > tol:
        raise RealizationError(f"old outcome probabilities moved by {worst:.3e}")
    return worst


# ---------------------------------------------------------------------------
# full pipeline


def lift_coefficients(coeffs: dict, outcomes: OutcomeSpace) -> dict:
    """Pad coefficient tables to larger outcome sets by reusing outcome 0's
    coefficients for every added outcome (a coarse graining, so the classical
    bound is unchanged)."""
    out = {}
    for clique, t in coeffs.items():
        t = np.asarray(t, dtype=float)
        for axis, v in enumerate(clique):
            extra = outcomes.sizes[v] - t.shape[axis]
            if extra > 0:
                first = np.take(t, [0], axis=axis)
                t = np.concatenate([t] + [first] * extra, axis=axis)
        out[clique] = t
    return out


@dataclass
class Realization:
    state: QuantumState
    measurements: MeasurementSet
    behavior: ContextMarginals
    membership: MembershipResult
    cycle: tuple
    cycle_witness: Witness  # n-cycle witness lifted to the full outcome sets
    base_witness: Witness  # the same witness on the bare cycle realization
    order: tuple = field(default=())  # g's vertices in the order they were realized

    @property
    def graph(self) -> CompatibilityGraph:
        return self.measurements.graph


def _witness(coeffs, b: ContextMarginals) -> Witness:
    return Witness(coeffs, classical_bound(coeffs, b.graph, b.outcomes), evaluate(coeffs, b))


def realize_nonchordal(
    g: CompatibilityGraph,
    cycle: Sequence[int] | None = None,
    seed: int = 0,
    check_membership: bool = True,
    even_method: str = "direct_sum",
) -> Realization:
    """Contextual realization of a nonchordal compatibility graph.

    The induced cycle (by default the first minimum-length one found by the
    chordality test) is realized directly; every remaining vertex is then
    added by ``embed_add_vertex`` in ascending label order.
    """
    cert = is_chordal(g)
    if cert.chordal:
        raise NoContextualityError()
    cycle = tuple(cert.induced_cycle if cycle is None else cycle)
    if len(cycle) < 4 or not is_induced_cycle(g, cycle):
        raise ValueError(f"{cycle} is not an induced cycle of length >= 4")
    k = len(cycle)
    rest = sorted(set(range(g.n)) - set(cycle))
    order = cycle + tuple(rest)

    state, s = cycle_realization(k, seed=seed, even_method=even_method)
    base_b = born_behavior(state, s)
    base_coeffs = ncycle_witness(tuple(range(k)), s.outcomes)
    base_w = _witness(base_coeffs, base_b)
    if not base_w.gap > 0:
        raise RealizationError("cycle realization does not violate its witness")  # pragma: no cover

    for m in range(k, g.n):
        target = g.induced_subgraph(order[: m + 1])
        s, state = embed_add_vertex(s, state, target)

    # position p in the realized set is vertex order[p] of g
    pos = {v: p for p, v in enumerate(order)}
    final = MeasurementSet(tuple(s[pos[v]] for v in range(g.n)), g)
    if g.n > k:
        final.verify()
    behavior = born_behavior(state, final)
    lifted = {(min(cycle[a], cycle[b]), max(cycle[a], cycle[b])): _orient(t, cycle[a] > cycle[b])
              for (a, b), t in base_coeffs.items()}
    lifted = lift_coefficients(lifted, final.outcomes)
    cw = _witness(lifted, behavior)
    result = membership(behavior) if check_membership else MembershipResult("unchecked")
    if check_membership and not result.contextual:
        raise RealizationError("realized behavior is not certified contextual")
    return Realization(state, final, behavior, result, cycle, cw, base_w, order)


def _orient(t, swap: bool):
    t = np.asarray(t)
    return t.T if swap else t


# ---------------------------------------------------------------------------
# random measurement sets


def _haar(d: int, rng) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _basis_measurement(u: np.ndarray, k: int, rng) -> IdealMeasurement:
    d = len(u)
    labels = rng.permutation(np.arange(d) % k) if k <= d else rng.integers(0, k, size=d)
    return IdealMeasurement.from_dense([u[:, labels == a] @ u[:, labels == a].conj().T for a in range(k)])


def random_measurement_set(n: int, dim: int, rng: np.random.Generator, outcomes: int = 2) -> list[IdealMeasurement]:
    """Random projective measurements mixing three sources so that both
    commuting and non-commuting pairs are common: a few shared bases (outcome
    groupings of one basis commute), local factors on a qubit of a
    two-qubit space (``dim == 4``), and fresh Haar-random bases."""
    shared = [_haar(dim, rng) for _ in range(2)]
    local = [_haar(2, rng) for _ in range(2)]
    out = []
    for _ in range(n):
        r = rng.random()
        if r < 0.45:
            out.append(_basis_measurement(shared[rng.integers(2)], outcomes, rng))
        elif r < 0.8 and dim == 4:
            side = rng.integers(2)
            m = _basis_measurement(local[side] if rng.random() < 0.5 else _haar(2, rng), min(outcomes, 2), rng)
            projs = [p.dense() for p in m.projectors]
            full = [np.kron(p, np.eye(2)) if side == 0 else np.kron(np.eye(2), p) for p in projs]
            out.append(IdealMeasurement.from_dense(full))
        else:
            out.append(_basis_measurement(_haar(dim, rng), outcomes, rng))
    return out


def random_state(dim: int, rng: np.random.Generator, rank: int | None = None) -> QuantumState:
    rank = dim if rank is None else rank
    x = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = x @ x.conj().T
    return QuantumState.product([rho / np.trace(rho)])
