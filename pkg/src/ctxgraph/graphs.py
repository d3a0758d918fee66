"""Compatibility graphs: chordality certificates, cliques, classification, census.

Vertices are the integers ``0..n-1``. Graph values are immutable, so every
function here is pure.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


class GraphFormatError(ValueError):
    """Malformed graph description."""


class NoContextualityError(ValueError):
    """Raised when an operation needs a nonchordal graph but got a chordal one."""

    def __init__(self, msg: str = "no contextuality possible: graph is chordal"):
        super().__init__(msg)


@dataclass(frozen=True)
class CompatibilityGraph:
    """Simple undirected graph on vertices ``0..n-1``.

    An edge means the two measurements are compatible.
    """

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise GraphFormatError(f"vertex count must be a positive integer, got {self.n!r}")
        norm = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"edge ({u},{v}) out of range for n={self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", frozenset(norm))
        nbrs = [set() for _ in range(self.n)]
        for u, v in norm:
            nbrs[u].add(v)
            nbrs[v].add(u)
        object.__setattr__(self, "_nbrs", tuple(frozenset(s) for s in nbrs))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "CompatibilityGraph":
        edges = [tuple(e) for e in edges]
        seen = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(edges))

    @classmethod
    def from_adjacency(cls, adj) -> "CompatibilityGraph":
        adj = np.asarray(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise GraphFormatError("adjacency matrix must be square")
        if (adj != adj.T).any():
            raise GraphFormatError("adjacency matrix must be symmetric")
        if adj.diagonal().any():
            raise GraphFormatError("adjacency matrix has self-loops")
        iu, ju = np.nonzero(np.triu(adj, 1))
        return cls(adj.shape[0], frozenset(zip(iu.tolist(), ju.tolist())))

    def neighbors(self, v: int) -> frozenset:
        return self._nbrs[v]

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._nbrs[u]

    @property
    def vertices(self) -> range:
        return range(self.n)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        return a

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def is_clique(self, vs: Iterable[int]) -> bool:
        vs = list(vs)
        return all(self.adjacent(u, v) for u, v in itertools.combinations(vs, 2))

    def induced_subgraph(self, vs: Sequence[int]) -> "CompatibilityGraph":
        """Subgraph induced on ``vs``, relabelled so ``vs[i]`` becomes ``i``."""
        idx = {v: i for i, v in enumerate(vs)}
        return CompatibilityGraph(
            len(vs),
            frozenset((idx[u], idx[v]) for u, v in self.edges if u in idx and v in idx),
        )

    def relabel(self, perm: Sequence[int]) -> "CompatibilityGraph":
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        return CompatibilityGraph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges))

    def complement(self) -> "CompatibilityGraph":
        return CompatibilityGraph(
            self.n,
            frozenset(e for e in itertools.combinations(range(self.n), 2) if e not in self.edges),
        )

    def add_vertex(self, nbrs: Iterable[int]) -> "CompatibilityGraph":
        """Copy with a new vertex ``n`` joined to ``nbrs``."""
        return CompatibilityGraph(self.n + 1, self.edges | {(int(u), self.n) for u in nbrs})

    def to_text(self) -> str:
        return f"{self.n}: " + ",".join(f"{u}-{v}" for u, v in self.sorted_edges())

    def __repr__(self):
        return f"CompatibilityGraph({self.to_text()!r})"


# ---------------------------------------------------------------------------
# standard families


def cycle_graph(n: int) -> CompatibilityGraph:
    return CompatibilityGraph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> CompatibilityGraph:
    return CompatibilityGraph(n, frozenset(itertools.combinations(range(n), 2)))


def path_graph(n: int) -> CompatibilityGraph:
    return CompatibilityGraph(n, frozenset((i, i + 1) for i in range(n - 1)))


def wheel_graph(rim: int) -> CompatibilityGraph:
    """Cycle ``0..rim-1`` plus hub ``rim`` adjacent to every rim vertex."""
    return cycle_graph(rim).add_vertex(range(rim))


def complete_multipartite(*sizes: int) -> CompatibilityGraph:
    labels = [p for p, s in enumerate(sizes) for _ in range(s)]
    n = len(labels)
    return CompatibilityGraph(
        n, frozenset((u, v) for u, v in itertools.combinations(range(n), 2) if labels[u] != labels[v])
    )


# ---------------------------------------------------------------------------
# chordality


@dataclass(frozen=True)
class ChordalityCertificate:
    chordal: bool
    peo: tuple | None = None
    induced_cycle: tuple | None = None

    @property
    def verdict(self) -> str:
        return "chordal" if self.chordal else "nonchordal"

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict}
        if self.chordal:
            d["peo"] = list(self.peo)
        else:
            d["induced_cycle"] = list(self.induced_cycle)
        return d


def max_cardinality_search(g: CompatibilityGraph) -> list[int]:
    """Visit order of maximum-cardinality search (ties broken by smallest label)."""
    weight = [0] * g.n
    visited = [False] * g.n
    order = []
    for _ in range(g.n):
        v = max((u for u in range(g.n) if not visited[u]), key=lambda u: (weight[u], -u))
        visited[v] = True
        order.append(v)
        for u in g.neighbors(v):
            if not visited[u]:
                weight[u] += 1
    return order


def is_perfect_elimination_ordering(g: CompatibilityGraph, order: Sequence[int]) -> bool:
    if sorted(order) != list(range(g.n)):
        return False
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in g.neighbors(v) if pos[u] > pos[v]]
        if not g.is_clique(later):
            return False
    return True


def is_induced_cycle(g: CompatibilityGraph, cycle: Sequence[int]) -> bool:
    """True iff ``cycle`` lists the vertices of a chordless cycle of length >= 4 in order."""
    k = len(cycle)
    if k < 4 or len(set(cycle)) != k:
        return False
    for i in range(k):
        for j in range(i + 1, k):
            consecutive = j == i + 1 or (i == 0 and j == k - 1)
            if g.adjacent(cycle[i], cycle[j]) != consecutive:
                return False
    return True


def _bfs_path(g: CompatibilityGraph, src: int, dst: int, allowed: set) -> list[int] | None:
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            path = []
            while u is not None:
                path.append(u)
                u = prev[u]
            return path[::-1]
        for w in sorted(g.neighbors(u)):
            if w in allowed and w not in prev:
                prev[w] = u
                queue.append(w)
    return None


def _normalize_cycle(cycle: Sequence[int]) -> tuple:
    k = len(cycle)
    i = min(range(k), key=lambda j: cycle[j])
    rot = list(cycle[i:]) + list(cycle[:i])
    if rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return tuple(rot)


def _induced_cycles_through(g: CompatibilityGraph, v: int):
    """Yield one shortest chordless cycle through ``v`` per nonadjacent neighbour pair."""
    nb = sorted(g.neighbors(v))
    for a, b in itertools.combinations(nb, 2):
        if g.adjacent(a, b):
            continue
        allowed = set(range(g.n)) - set(nb) - {v} | {a, b}
        path = _bfs_path(g, a, b, allowed)
        if path is not None:
            yield [v] + path


def find_induced_cycle_ge4(g: CompatibilityGraph) -> tuple | None:
    """First minimum-length chordless cycle of length >= 4, or ``None``.

    For each vertex ``v`` and each pair of nonadjacent neighbours ``a, b``, a
    shortest ``a``-``b`` path avoiding the rest of ``N[v]`` closes an induced
    cycle through ``v``; every induced cycle arises this way, so the minimum
    over all choices is a globally shortest one.
    """
    best = None
    for v in range(g.n):
        for cyc in _induced_cycles_through(g, v):
            if best is None or len(cyc) < len(best):
                best = cyc
    return None if best is None else _normalize_cycle(best)


def is_chordal(g: CompatibilityGraph) -> ChordalityCertificate:
    """Decide chordality and return a checkable certificate.

    The reverse of a maximum-cardinality-search visit order is a perfect
    elimination ordering exactly when ``g`` is chordal; if verification of
    that ordering fails, an induced cycle of length >= 4 is extracted.
    """
    peo = max_cardinality_search(g)[::-1]
    if is_perfect_elimination_ordering(g, peo):
        return ChordalityCertificate(True, peo=tuple(peo))
    cycle = find_induced_cycle_ge4(g)
    if cycle is None:  # pragma: no cover - contradicts the MCS theorem
        raise AssertionError(f"MCS order failed but no induced cycle found in {g}")
    return ChordalityCertificate(False, induced_cycle=cycle)


def verify_certificate(g: CompatibilityGraph, cert: ChordalityCertificate) -> bool:
    if cert.chordal:
        return cert.peo is not None and is_perfect_elimination_ordering(g, cert.peo)
    return cert.induced_cycle is not None and is_induced_cycle(g, cert.induced_cycle)


# ---------------------------------------------------------------------------
# cliques


def maximal_cliques(g: CompatibilityGraph) -> list[tuple]:
    """All maximal cliques as sorted tuples, in lexicographic order (Bron-Kerbosch with pivot)."""
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: len(p & g.neighbors(u)))
        for v in sorted(p - g.neighbors(pivot)):
            nv = g.neighbors(v)
            expand(r | {v}, p & nv, x & nv)
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(g.n)), set())
    return sorted(out)


def connected_components(g: CompatibilityGraph) -> list[list[int]]:
    seen = set()
    comps = []
    for s in range(g.n):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in g.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return sorted(comps)


# ---------------------------------------------------------------------------
# classification


class ScenarioLabel(str, Enum):
    BELL = "a"
    MULTIPARTITE_INTRA = "b"
    NON_MULTIPARTITE = "c"


@dataclass(frozen=True)
class ScenarioClass:
    label: ScenarioLabel
    party_partition: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "class": self.label.value,
            "partition": None if self.party_partition is None else [list(p) for p in self.party_partition],
        }


def is_valid_party_partition(g: CompatibilityGraph, parts: Sequence[Sequence[int]]) -> bool:
    """Check the multipartite conditions directly."""
    if len(parts) < 2:
        return False
    flat = [v for p in parts for v in p]
    if sorted(flat) != list(range(g.n)):
        return False
    for p in parts:
        if g.is_clique(p):  # no nonadjacent pair inside
            return False
    for p, q in itertools.combinations(parts, 2):
        if not all(g.adjacent(u, v) for u in p for v in q):
            return False
    return True


def multipartite_partition(g: CompatibilityGraph) -> tuple | None:
    """Split the vertices into parties, or return ``None`` if impossible.

    Parties are unions of connected components of the complement graph.
    Components with at least one complement edge become parties; singleton
    components (vertices compatible with everything) join the first party.
    """
    comps = connected_components(g.complement())
    big = [c for c in comps if len(c) > 1]
    if len(big) < 2:
        return None
    singles = [c[0] for c in comps if len(c) == 1]
    parts = [list(c) for c in big]
    parts[0] = sorted(parts[0] + singles)
    return tuple(tuple(p) for p in parts)


def is_complete_multipartite(g: CompatibilityGraph) -> bool:
    """Complement is a disjoint union of cliques."""
    comp = g.complement()
    return all(comp.is_clique(c) for c in connected_components(comp))


def classify(g: CompatibilityGraph) -> ScenarioClass:
    """Label a nonchordal scenario as Bell (a), multipartite with compatible
    local measurements (b), or non-multipartite (c).

    Raises
    ------
    NoContextualityError
        If ``g`` is chordal.
    """
    if is_chordal(g).chordal:
        raise NoContextualityError()
    parts = multipartite_partition(g)
    if parts is None:
        return ScenarioClass(ScenarioLabel.NON_MULTIPARTITE)
    independent = all(not any(g.adjacent(u, v) for u, v in itertools.combinations(p, 2)) for p in parts)
    label = ScenarioLabel.BELL if independent else ScenarioLabel.MULTIPARTITE_INTRA
    return ScenarioClass(label, parts)


# ---------------------------------------------------------------------------
# relevance filter

FILTER_MODES = ("induced", "any")
DEFAULT_FILTER_MODE = "induced"


def _normalize_mode(mode: str) -> str:
    m = {"induced_cycle": "induced", "any_cycle": "any"}.get(mode, mode)
    if m not in FILTER_MODES:
        raise ValueError(f"unknown filter mode {mode!r}")
    return m


def vertex_on_induced_cycle(g: CompatibilityGraph, v: int) -> bool:
    return next(_induced_cycles_through(g, v), None) is not None


def biconnected_blocks(g: CompatibilityGraph) -> list[set]:
    """Vertex sets of the biconnected components (Hopcroft-Tarjan)."""
    disc = [-1] * g.n
    low = [0] * g.n
    blocks = []
    edge_stack = []
    counter = [0]

    def dfs(u, parent):
        disc[u] = low[u] = counter[0]
        counter[0] += 1
        for w in sorted(g.neighbors(u)):
            if disc[w] == -1:
                edge_stack.append((u, w))
                dfs(w, u)
                low[u] = min(low[u], low[w])
                if low[w] >= disc[u]:
                    block = set()
                    while True:
                        e = edge_stack.pop()
                        block.update(e)
                        if e == (u, w):
                            break
                    blocks.append(block)
            elif w != parent and disc[w] < disc[u]:
                edge_stack.append((u, w))
                low[u] = min(low[u], disc[w])

    for s in range(g.n):
        if disc[s] == -1:
            dfs(s, -1)
    return blocks


def vertex_on_long_cycle(g: CompatibilityGraph, v: int) -> bool:
    # a vertex of a 2-connected block with >= 4 vertices lies on a cycle of length >= 4
    return any(v in b and len(b) >= 4 for b in biconnected_blocks(g))


def relevance_filter(g: CompatibilityGraph, mode: str = DEFAULT_FILTER_MODE) -> bool:
    """True iff every vertex lies on a (mode ``any``) cycle or (mode ``induced``)
    chordless cycle of length at least four."""
    mode = _normalize_mode(mode)
    if mode == "induced":
        return all(vertex_on_induced_cycle(g, v) for v in range(g.n))
    blocks = biconnected_blocks(g)
    return all(any(v in b and len(b) >= 4 for b in blocks) for v in range(g.n))


# ---------------------------------------------------------------------------
# canonical form and enumeration

MAX_CANONICAL_N = 8


@lru_cache(maxsize=None)
def _perm_table(n: int):
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8).reshape(-1, n)
    iu, ju = np.triu_indices(n, 1)
    weights = (1 << np.arange(len(iu))[::-1]).astype(np.int64)
    return perms, iu, ju, weights


def canonical_labeling(g: CompatibilityGraph) -> tuple[str, tuple]:
    """Return ``(code, perm)`` where ``code`` is the minimum upper-triangle
    adjacency bit string over all vertex permutations and ``perm[i]`` is the
    original vertex placed at position ``i`` in the minimising order."""
    if g.n > MAX_CANONICAL_N:
        raise ValueError(f"canonical form limited to n <= {MAX_CANONICAL_N}, got {g.n}")
    if g.n == 1:
        return "1:", (0,)
    perms, iu, ju, weights = _perm_table(g.n)
    adj = g.adjacency_matrix()
    bits = adj[perms[:, iu], perms[:, ju]]
    codes = bits.astype(np.int64) @ weights
    k = int(np.argmin(codes))
    npairs = len(iu)
    return f"{g.n}:" + format(int(codes[k]), f"0{npairs}b"), tuple(int(x) for x in perms[k])


def canonical_form(g: CompatibilityGraph) -> str:
    """Isomorphism-invariant encoding (brute force over all ``n!`` relabelings, n <= 8)."""
    return canonical_labeling(g)[0]


def canonical_graph(g: CompatibilityGraph) -> CompatibilityGraph:
    _, perm = canonical_labeling(g)
    inv = [0] * g.n
    for pos, v in enumerate(perm):
        inv[v] = pos
    return g.relabel(inv)


@dataclass(frozen=True)
class ScenarioRecord:
    graph: CompatibilityGraph
    canonical_form: str
    scenario_class: ScenarioClass
    certificate: ChordalityCertificate

    def to_dict(self) -> dict:
        d = {
            "graph": {"n": self.graph.n, "edges": [list(e) for e in self.graph.sorted_edges()]},
            "canonical_form": self.canonical_form,
        }
        d.update(self.scenario_class.to_dict())
        d["certificate"] = self.certificate.to_dict()
        return d


MAX_ENUMERATION_N = 7


def graph_classes(n_max: int) -> dict[int, list[CompatibilityGraph]]:
    """Canonical representatives of all isomorphism classes with 1..n_max vertices,
    grown by vertex augmentation."""
    classes = {1: [CompatibilityGraph(1)]}
    for n in range(2, n_max + 1):
        seen = {}
        for g in classes[n - 1]:
            for mask in range(1 << (n - 1)):
                h = g.add_vertex(i for i in range(n - 1) if mask >> i & 1)
                code, _ = canonical_labeling(h)
                if code not in seen:
                    seen[code] = canonical_graph(h)
        classes[n] = [seen[c] for c in sorted(seen)]
    return classes


def enumerate_scenarios(n_max: int, mode: str = DEFAULT_FILTER_MODE) -> list[ScenarioRecord]:
    """All nonchordal, relevance-filtered isomorphism classes with 4..n_max vertices."""
    if n_max > MAX_ENUMERATION_N:
        raise ValueError(f"n_max must be <= {MAX_ENUMERATION_N}")
    mode = _normalize_mode(mode)
    if n_max < 4:
        return []
    records = []
    for n, graphs in graph_classes(n_max).items():
        if n < 4:
            continue
        for g in graphs:
            cert = is_chordal(g)
            if cert.chordal or not relevance_filter(g, mode):
                continue
            records.append(ScenarioRecord(g, canonical_form(g), classify(g), cert))
    records.sort(key=lambda r: (r.graph.n, r.canonical_form))
    return records


def census(records: Iterable[ScenarioRecord]) -> dict[str, int]:
    counts = {lab.value: 0 for lab in ScenarioLabel}
    for r in records:
        counts[r.scenario_class.label.value] += 1
    return counts
