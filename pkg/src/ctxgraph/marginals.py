"""Context marginals and their global extension on chordal graphs.

Tables are numpy arrays with one axis per measurement, axes ordered by
increasing vertex label. Entries may be floats or ``fractions.Fraction``
(object arrays); every routine here works for both, so exact inputs give
exact outputs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graphs import CompatibilityGraph, is_chordal, maximal_cliques

DEFAULT_TOL = 1e-9
MAX_TABLE_SIZE = 2**20


class MissingTableError(KeyError):
    pass


class InconsistentMarginalsError(ValueError):
    def __init__(self, report: "ConsistencyReport"):
        super().__init__(report.message)
        self.report = report


class NotChordalError(ValueError):
    pass


class TableTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class OutcomeSpace:
    """Outcome labels for each measurement (one tuple per vertex)."""

    labels: tuple

    def __post_init__(self):
        labels = tuple(tuple(ls) for ls in self.labels)
        for v, ls in enumerate(labels):
            if not ls:
                raise ValueError(f"measurement {v} has no outcomes")
            if len(set(ls)) != len(ls):
                raise ValueError(f"duplicate outcome labels for measurement {v}: {ls}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, n: int, k: int = 2) -> "OutcomeSpace":
        return cls(tuple(tuple(range(k)) for _ in range(n)))

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "OutcomeSpace":
        return cls(tuple(tuple(range(k)) for k in sizes))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def sizes(self) -> tuple:
        return tuple(len(ls) for ls in self.labels)

    def shape(self, vertices: Iterable[int]) -> tuple:
        return tuple(len(self.labels[v]) for v in vertices)

    def table_size(self, vertices: Iterable[int]) -> int:
        return int(np.prod(self.shape(vertices), dtype=object))


def is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def as_table(values, shape: tuple) -> np.ndarray:
    """Coerce nested values to a table; Fractions/ints stay exact, floats become float64."""
    arr = np.asarray(values, dtype=object).reshape(shape)
    if all(isinstance(x, (Fraction, int)) and not isinstance(x, bool) for x in arr.flat):
        return np.vectorize(Fraction, otypes=[object])(arr) if arr.size else arr
    return arr.astype(float)


def marginalize_table(table: np.ndarray, vertices: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Sum out every axis of ``table`` whose vertex is not in ``keep``.

    The result has axes in increasing vertex order.
    """
    keep = set(keep)
    missing = keep - set(vertices)
    if missing:
        raise ValueError(f"vertices {sorted(missing)} not in table over {list(vertices)}")
    drop = tuple(i for i, v in enumerate(vertices) if v not in keep)
    out = table.sum(axis=drop) if drop else table
    kept = [v for v in vertices if v in keep]
    order = np.argsort(kept)
    return np.transpose(out, order) if len(kept) > 1 else out


def _max_abs(arr) -> float:
    if arr.size == 0:
        return 0.0
    return float(max(abs(x) for x in np.asarray(arr).flat))


@dataclass
class ContextMarginals:
    """One probability table per context (maximal clique) of ``graph``.

    ``tables`` maps sorted clique tuples to arrays whose axes follow the
    clique order. Tables for non-maximal cliques are allowed in the mapping
    but only the maximal ones are treated as contexts.
    """

    graph: CompatibilityGraph
    outcomes: OutcomeSpace
    tables: dict

    def __post_init__(self):
        if self.outcomes.n != self.graph.n:
            raise ValueError("outcome space and graph disagree on the number of measurements")
        fixed = {}
        for clique, t in self.tables.items():
            c = tuple(sorted(int(v) for v in clique))
            if not self.graph.is_clique(c):
                raise ValueError(f"{c} is not a clique of the graph")
            arr = t if isinstance(t, np.ndarray) else np.asarray(t)
            if arr.shape != self.outcomes.shape(c):
                raise ValueError(f"table for {c} has shape {arr.shape}, expected {self.outcomes.shape(c)}")
            fixed[c] = arr
        self.tables = fixed

    @property
    def contexts(self) -> list[tuple]:
        return maximal_cliques(self.graph)

    @property
    def exact(self) -> bool:
        return all(is_exact(t) for t in self.tables.values())

    def table(self, clique: Iterable[int]) -> np.ndarray:
        """Probability table for any clique, read from an enclosing context table."""
        c = tuple(sorted(clique))
        if c in self.tables:
            return self.tables[c]
        for ctx in self.contexts:
            if set(c) <= set(ctx):
                if ctx not in self.tables:
                    raise MissingTableError(f"no table for context {ctx}")
                return marginalize_table(self.tables[ctx], ctx, c)
        raise ValueError(f"{c} is not a clique of the graph")

    def context_tables(self) -> dict:
        out = {}
        for ctx in self.contexts:
            if ctx not in self.tables:
                raise MissingTableError(f"no table for context {ctx}")
            out[ctx] = self.tables[ctx]
        return out

    @classmethod
    def from_joint(cls, graph: CompatibilityGraph, joint: "JointDistribution") -> "ContextMarginals":
        tables = {c: marginalize(joint, c) for c in maximal_cliques(graph)}
        return cls(graph, joint.outcomes, tables)


@dataclass
class JointDistribution:
    outcomes: OutcomeSpace
    table: np.ndarray

    def __post_init__(self):
        if self.table.shape != self.outcomes.sizes:
            raise ValueError("joint table shape does not match outcome space")

    @property
    def n(self) -> int:
        return self.outcomes.n

    def is_valid(self, tol: float = DEFAULT_TOL) -> bool:
        t = self.table
        return bool(min(t.flat) >= -tol) and abs(t.sum() - 1) <= tol


def marginalize(j: JointDistribution, subset: Iterable[int]) -> np.ndarray:
    """Marginal table of ``j`` over ``subset`` (axes in increasing vertex order)."""
    return marginalize_table(j.table, range(j.n), subset)


@dataclass(frozen=True)
class ConsistencyReport:
    ok: bool
    kind: str = ""
    cliques: tuple = ()
    deviation: float = 0.0

    @property
    def message(self) -> str:
        if self.ok:
            return "consistent"
        if self.kind == "normalization":
            return f"table for {self.cliques[0]} is not a distribution (deviation {self.deviation:.3g})"
        return (
            f"tables for {self.cliques[0]} and {self.cliques[1]} disagree on their overlap "
            f"(max deviation {self.deviation:.3g})"
        )

    def __bool__(self):
        return self.ok


def check_consistency(m: ContextMarginals, tol: float = DEFAULT_TOL) -> ConsistencyReport:
    """Normalization of every context table and agreement on every overlap.

    Returns the first violation found; raises ``MissingTableError`` if a
    context has no table.
    """
    tables = m.context_tables()
    for ctx, t in tables.items():
        neg = -min(min(t.flat), 0)
        dev = max(float(neg), float(abs(t.sum() - 1)))
        if dev > tol:
            return ConsistencyReport(False, "normalization", (ctx,), dev)
    for c1, c2 in itertools.combinations(tables, 2):
        common = sorted(set(c1) & set(c2))
        if not common:
            continue
        a = marginalize_table(tables[c1], c1, common)
        b = marginalize_table(tables[c2], c2, common)
        dev = _max_abs(a - b)
        if dev > tol:
            return ConsistencyReport(False, "overlap", (c1, c2), dev)
    return ConsistencyReport(True)


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # 0/0 := 0; consistency forces num == 0 wherever den == 0
    mask = den != 0
    safe = np.where(mask, den, 1)
    return np.where(mask, num / safe, 0 * num)


def _expand(table: np.ndarray, vertices: Sequence[int], target: Sequence[int]) -> np.ndarray:
    """Reshape a table over ``vertices`` (sorted) to broadcast against axes ``target``."""
    pos = {v: i for i, v in enumerate(target)}
    order = sorted(range(len(vertices)), key=lambda i: pos[vertices[i]])
    t = np.transpose(table, order) if len(vertices) > 1 else table
    shape = [1] * len(target)
    for i in order:
        shape[pos[vertices[i]]] = table.shape[i]
    return t.reshape(shape)


def vorobyev_extend(
    g: CompatibilityGraph, m: ContextMarginals, tol: float = DEFAULT_TOL, check: bool = True
) -> JointDistribution:
    """Glue consistent context marginals on a chordal graph into a joint distribution.

    With the perfect elimination ordering read backwards as ``v_1..v_n``, set
    ``P_1 = Prob(v_1)`` and

        P_k = Prob(A_k) * P_{k-1} / Prob(A_k minus v_k)

    where ``A_k`` is ``v_k`` together with its neighbours among
    ``v_1..v_{k-1}`` (a clique by the PEO property). The result marginalizes
    to every context table.
    """
    if g != m.graph:
        raise ValueError("marginals are defined on a different graph")
    cert = is_chordal(g)
    if not cert.chordal:
        raise NotChordalError(f"graph has induced cycle {list(cert.induced_cycle)}")
    if m.outcomes.table_size(range(g.n)) > MAX_TABLE_SIZE:
        raise TableTooLargeError(f"joint table would exceed {MAX_TABLE_SIZE} entries")
    if check:
        rep = check_consistency(m, tol)
        if not rep:
            raise InconsistentMarginalsError(rep)

    order = list(cert.peo)[::-1]  # v_1, ..., v_n
    axes: list[int] = []
    joint = None
    for v in order:
        earlier = sorted(u for u in g.neighbors(v) if u in axes)
        a_k = sorted(earlier + [v])
        num = m.table(a_k)
        if earlier:
            cond = _safe_ratio(num, _expand(m.table(earlier), earlier, a_k))
        else:
            cond = num
        new_axes = axes + [v]
        cond_b = _expand(cond, a_k, new_axes)
        joint = cond_b if joint is None else joint[..., None] * cond_b
        axes = new_axes
    perm = np.argsort(axes)
    return JointDistribution(m.outcomes, np.transpose(joint, perm))


# ---------------------------------------------------------------------------
# random instances


def random_joint(outcomes: OutcomeSpace, rng: np.random.Generator, sparsity: float = 0.0) -> JointDistribution:
    """Dirichlet-random joint; ``sparsity`` is the fraction of cells forced to zero."""
    p = rng.dirichlet(np.ones(int(np.prod(outcomes.sizes))))
    if sparsity > 0:
        zero = rng.random(p.shape) < sparsity
        if zero.all():
            zero[rng.integers(p.size)] = False
        p = np.where(zero, 0.0, p)
        p = p / p.sum()
    return JointDistribution(outcomes, p.reshape(outcomes.sizes))


def random_chordal_graph(n: int, rng: np.random.Generator, p_glue: float = 0.6) -> CompatibilityGraph:
    """Chordal graph grown by gluing: each new vertex joins a random subset of an
    existing maximal clique (so it is simplicial when added)."""
    g = CompatibilityGraph(1)
    for _ in range(1, n):
        cliques = maximal_cliques(g)
        base = cliques[rng.integers(len(cliques))]
        nbrs = [v for v in base if rng.random() < p_glue]
        g = g.add_vertex(nbrs)
    return g


def tables_from_mapping(
    graph: CompatibilityGraph, outcomes: OutcomeSpace, mapping: Mapping
) -> ContextMarginals:
    """Build marginals from ``{clique: {outcome tuple: prob}}``; absent cells are 0."""
    tables = {}
    for clique, cells in mapping.items():
        c = tuple(sorted(clique))
        shape = outcomes.shape(c)
        vals = [0] * int(np.prod(shape))
        index = {lab: i for i, lab in enumerate(itertools.product(*(outcomes.labels[v] for v in c)))}
        for key, p in cells.items():
            vals[index[tuple(key)]] = p
        tables[c] = as_table(vals, shape)
    return ContextMarginals(graph, outcomes, tables)
