"""See-saw lower bounds on the quantum value of a witness with a fixed compatibility graph.

Each restart runs in three phases.

1. Penalised ascent: the state is always the top eigenvector of the witness
   operator; measurements move along their unitary orbits (so projectors
   stay exact) to increase the top eigenvalue minus a commutator penalty on
   the graph's edges, with the penalty weight ramped up.
2. Repair: vertices are visited once and each is replaced by the nearest
   projective measurement inside the commutant of its already-repaired
   neighbours, which makes every edge an exact commutation relation.
3. Polish: exact see-saw. The measurement step updates one vertex inside the
   commutant of its neighbours, where the optimum for a pair of outcomes is
   a spectral projection; every step is a block-exact maximisation, so the
   value is nondecreasing.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graphs import CompatibilityGraph

_EIG_CUT = 1e-12


@dataclass
class SeesawResult:
    value: float
    converged: bool
    state: np.ndarray
    projectors: list  # per vertex, list of dense projectors
    history: list = field(default_factory=list)
    restarts: list = field(default_factory=list)  # best value of every restart


def commutant_basis(ops: Sequence[np.ndarray], dim: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of ``{X : [X, A] = 0 for A in ops}``
    as rows of vectorised matrices."""
    ops = [a for a in ops if np.abs(a @ a - a).max() < 1e-8 and not _is_scalar(a)]
    if not ops:
        return np.eye(dim * dim, dtype=complex)
    eye = np.eye(dim)
    # row-major vec: vec(A X) = (A (x) I) vec X, vec(X A) = (I (x) A^T) vec X
    lin = np.vstack([np.kron(a, eye) - np.kron(eye, a.T) for a in ops])
    _, s, vh = np.linalg.svd(lin)
    rank = int((s > 1e-9 * max(1.0, s[0])).sum())
    return vh[rank:].conj()


def _is_scalar(a: np.ndarray) -> bool:
    return np.allclose(a, a[0, 0] * np.eye(len(a)), atol=1e-12)


def _project(basis: np.ndarray, h: np.ndarray) -> np.ndarray:
    v = h.reshape(-1)
    out = (basis.T @ (basis.conj() @ v)).reshape(h.shape)
    return (out + out.conj().T) / 2


def _spectral_split(y: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(y)
    pos = v[:, w > _EIG_CUT]
    pa = pos @ pos.conj().T
    return pa, q - pa


class _Problem:
    def __init__(self, coeffs: Mapping, g: CompatibilityGraph, sizes: Sequence[int], dim: int):
        self.g = g
        self.dim = dim
        self.sizes = list(sizes)
        self.coeffs = {tuple(sorted(c)): np.asarray(t, dtype=float) for c, t in coeffs.items()}
        for c in self.coeffs:
            if not g.is_clique(c):
                raise ValueError(f"witness clique {c} is not a clique of the graph")

    def operator(self, proj) -> np.ndarray:
        w = np.zeros((self.dim, self.dim), dtype=complex)
        for clique, t in self.coeffs.items():
            for cell in itertools.product(*(range(self.sizes[v]) for v in clique)):
                c = t[cell]
                if c == 0:
                    continue
                prod = np.eye(self.dim, dtype=complex)
                for v, a in zip(clique, cell):
                    prod = prod @ proj[v][a]
                w += c * prod
        return (w + w.conj().T) / 2

    def local_terms(self, i: int, proj, rho: np.ndarray) -> list[np.ndarray]:
        """``H_a`` with objective ``sum_a tr(P_{i,a} H_a)`` for fixed state and neighbours."""
        hs = [np.zeros((self.dim, self.dim), dtype=complex) for _ in range(self.sizes[i])]
        for clique, t in self.coeffs.items():
            if i not in clique:
                continue
            k = clique.index(i)
            others = [v for v in clique if v != i]
            for cell in itertools.product(*(range(self.sizes[v]) for v in clique)):
                c = t[cell]
                if c == 0:
                    continue
                n = np.eye(self.dim, dtype=complex)
                for v in others:
                    n = n @ proj[v][cell[clique.index(v)]]
                hs[cell[k]] += c * (n @ rho + rho @ n) / 2
        return hs

    def update_vertex(self, i: int, proj, rho: np.ndarray) -> None:
        nbr_ops = [p for j in self.g.neighbors(i) for p in proj[j]]
        basis = commutant_basis(nbr_ops, self.dim)
        hs = [_project(basis, h) for h in self.local_terms(i, proj, rho)]
        k = self.sizes[i]
        for a, b in itertools.combinations(range(k), 2):
            q = proj[i][a] + proj[i][b]
            y = q @ (hs[a] - hs[b]) @ q
            proj[i][a], proj[i][b] = _spectral_split((y + y.conj().T) / 2, q)

    def random_start(self, rng: np.random.Generator):
        proj = [[np.eye(self.dim, dtype=complex)] + [np.zeros((self.dim, self.dim), complex)] * (k - 1)
                for k in self.sizes]
        for i in rng.permutation(self.g.n):
            nbr_ops = [p for j in self.g.neighbors(i) for p in proj[j]]
            basis = commutant_basis(nbr_ops, self.dim)
            h = rng.normal(size=(self.dim, self.dim)) + 1j * rng.normal(size=(self.dim, self.dim))
            h = _project(basis, h + h.conj().T)
            w, v = np.linalg.eigh(h)
            groups = np.sort(rng.integers(0, self.sizes[i], size=self.dim))
            proj[i] = [v[:, groups == a] @ v[:, groups == a].conj().T for a in range(self.sizes[i])]
        return proj


def _orbit_step(p: list, m: np.ndarray, eta: float) -> list:
    """``P -> e^{-eta M} P e^{eta M}`` for anti-Hermitian ``M``."""
    w, v = np.linalg.eigh(1j * m)  # 1j*M is Hermitian
    u = (v * np.exp(1j * eta * w)) @ v.conj().T  # = exp(-eta M)
    return [u @ x @ u.conj().T for x in p]


def _penalty(prob: _Problem, proj) -> float:
    total = 0.0
    for i, j in prob.g.edges:
        for a in proj[i]:
            for b in proj[j]:
                c = a @ b - b @ a
                total += float(np.real(np.vdot(c, c)))
    return total


def _penalised_value(prob: _Problem, proj, mu: float) -> float:
    return float(np.linalg.eigvalsh(prob.operator(proj))[-1]) - mu * _penalty(prob, proj)


def _ascent(prob: _Problem, proj, mu: float, steps: int, rng) -> list:
    eta = 0.1
    f = _penalised_value(prob, proj, mu)
    for _ in range(steps):
        w, v = np.linalg.eigh(prob.operator(proj))
        rho = np.outer(v[:, -1], v[:, -1].conj())
        dirs = []
        for i in range(prob.g.n):
            gs = prob.local_terms(i, proj, rho)
            for a in range(prob.sizes[i]):
                pa = proj[i][a]
                for j in prob.g.neighbors(i):
                    for q in proj[j]:
                        gs[a] = gs[a] - mu * (2 * (pa @ q + q @ pa) - 4 * q @ pa @ q)
            dirs.append(sum(proj[i][a] @ gs[a] - gs[a] @ proj[i][a] for a in range(prob.sizes[i])))
        size = max(np.abs(d).max() for d in dirs)
        if size < 1e-12:
            break
        while eta > 1e-12:
            trial = [_orbit_step(proj[i], dirs[i], eta) for i in range(prob.g.n)]
            ft = _penalised_value(prob, trial, mu)
            if ft > f:
                proj, f = trial, ft
                eta *= 1.5
                break
            eta *= 0.5
        else:
            break
    return proj


def _repair(prob: _Problem, proj, order) -> list:
    proj = [list(p) for p in proj]
    done = []
    for i in order:
        nbr_ops = [q for j in prob.g.neighbors(i) if j in done for q in proj[j]]
        basis = commutant_basis(nbr_ops, prob.dim)
        # nearest PVM in the algebra: greedy spectral rounding of the projected outcomes
        remaining = np.eye(prob.dim, dtype=complex)
        new = []
        for a in range(prob.sizes[i] - 1):
            y = remaining @ _project(basis, proj[i][a]) @ remaining
            w, v = np.linalg.eigh((y + y.conj().T) / 2)
            keep = v[:, w > 0.5]
            pa = keep @ keep.conj().T
            new.append(pa)
            remaining = remaining - pa
        new.append(remaining)
        proj[i] = new
        done.append(i)
    return proj


def _polish(prob: _Problem, proj, iters: int, tol: float):
    history = []
    converged = False
    for _ in range(iters):
        w, v = np.linalg.eigh(prob.operator(proj))
        rho = np.outer(v[:, -1], v[:, -1].conj())
        history.append(float(w[-1]))
        for i in range(prob.g.n):
            prob.update_vertex(i, proj, rho)
        if len(history) > 3 and history[-1] - history[-3] < tol:
            converged = True
            break
    w, v = np.linalg.eigh(prob.operator(proj))
    history.append(float(w[-1]))
    return proj, v[:, -1], history, converged


def max_edge_commutator(g: CompatibilityGraph, proj) -> float:
    worst = 0.0
    for i, j in g.edges:
        for a in proj[i]:
            for b in proj[j]:
                worst = max(worst, float(np.linalg.norm(a @ b - b @ a, 2)))
    return worst


def _haar_unitary(d: int, rng) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_cuts(k: int, d: int, rng) -> list[int]:
    if k > d:
        return np.sort(rng.integers(0, d + 1, size=k - 1)).tolist()
    if rng.random() < 0.5:  # as even as possible
        blocks = rng.permutation([d // k + (a < d % k) for a in range(k)])
        return np.cumsum(blocks)[:-1].tolist()
    return np.sort(rng.choice(np.arange(1, d), size=k - 1, replace=False)).tolist()


def _random_pvms(prob: _Problem, rng) -> list:
    """Haar-random bases split into outcome blocks. Half the starts share one
    block pattern across all vertices with the same number of outcomes, since
    optimal configurations are often rank-homogeneous."""
    shared = {} if rng.random() < 0.5 else None
    proj = []
    for k in prob.sizes:
        if shared is None:
            cuts = _random_cuts(k, prob.dim, rng)
        else:
            cuts = shared.setdefault(k, _random_cuts(k, prob.dim, rng))
        u = _haar_unitary(prob.dim, rng)
        edges = [0, *cuts, prob.dim]
        proj.append([u[:, edges[a]:edges[a + 1]] @ u[:, edges[a]:edges[a + 1]].conj().T for a in range(k)])
    return proj


PENALTY_SCHEDULE = (1.0, 10.0, 100.0, 1000.0)


def seesaw_max(
    coeffs: Mapping,
    g: CompatibilityGraph,
    dim: int,
    restarts: int = 20,
    budget: int = 200,
    tol: float = 1e-12,
    seed: int | None = 0,
    sizes: Sequence[int] | None = None,
) -> SeesawResult:
    """Best witness value found over ``restarts`` random starts.

    ``coeffs`` maps cliques of ``g`` to coefficient tables (as for
    ``classical_bound``). ``budget`` bounds the iterations of each phase.
    The returned configuration satisfies every edge commutation exactly (to
    numerical precision); ``converged`` is False if any restart ran out of
    budget in the exact phase, in which case the best value so far is still
    returned.
    """
    if dim > 8:
        raise ValueError("see-saw is meant for dimension <= 8")
    if sizes is None:
        sizes = [2] * g.n
        for c, t in coeffs.items():
            for v, k in zip(sorted(c), np.shape(t)):
                sizes[v] = k
    prob = _Problem(coeffs, g, sizes, dim)
    rng = np.random.default_rng(seed)
    if not any(np.any(np.asarray(t) != 0) for t in coeffs.values()):
        proj = _random_pvms(prob, rng)
        proj = _repair(prob, proj, range(g.n))
        return SeesawResult(0.0, True, np.eye(dim, dtype=complex)[:, 0], proj, [0.0], [0.0])
    best = None
    all_converged = True
    per_restart = []
    for _ in range(restarts):
        proj = _random_pvms(prob, rng)
        for mu in PENALTY_SCHEDULE:
            proj = _ascent(prob, proj, mu, budget, rng)
        proj = _repair(prob, proj, rng.permutation(g.n))
        proj, psi, history, converged = _polish(prob, proj, budget, tol)
        all_converged &= converged
        per_restart.append(history[-1])
        if best is None or history[-1] > best.value:
            best = SeesawResult(history[-1], converged, psi, proj, history)
    best.converged = all_converged
    best.restarts = per_restart
    return best
