"""Operators stored as sums of tensor products over a fixed register layout.

``TensorOp`` holds terms ``coef * (X_0 (x) X_1 (x) ... )`` with one small
matrix per register. Products, traces against product states, commutators
and norms are computed register by register; dense Kronecker assembly is
only used on the registers where terms actually differ, and never above
``MAX_DENSE_DIM``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

MAX_DENSE_DIM = 2**12
_MERGE_ATOL = 1e-13


class DenseLimitError(ValueError):
    pass


def _close(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and np.allclose(a, b, rtol=0, atol=_MERGE_ATOL)


@dataclass(frozen=True)
class TensorOp:
    dims: tuple
    terms: tuple  # ((coef, (factor, ...)), ...)

    @classmethod
    def product(cls, factors: Sequence[np.ndarray], coef: complex = 1.0) -> "TensorOp":
        factors = tuple(np.asarray(f, dtype=complex) for f in factors)
        return cls(tuple(f.shape[0] for f in factors), ((complex(coef), factors),))

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "TensorOp":
        return cls.product([np.eye(d) for d in dims])

    @classmethod
    def zero(cls, dims: Sequence[int]) -> "TensorOp":
        return cls(tuple(dims), ())

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=object))

    @property
    def is_product(self) -> bool:
        return len(self.terms) == 1

    def _check(self, other: "TensorOp"):
        if self.dims != other.dims:
            raise ValueError(f"register layouts differ: {self.dims} vs {other.dims}")

    def __add__(self, other: "TensorOp") -> "TensorOp":
        self._check(other)
        return TensorOp(self.dims, self.terms + other.terms)

    def __neg__(self) -> "TensorOp":
        return TensorOp(self.dims, tuple((-c, fs) for c, fs in self.terms))

    def __sub__(self, other: "TensorOp") -> "TensorOp":
        return self + (-other)

    def scale(self, s: complex) -> "TensorOp":
        return TensorOp(self.dims, tuple((c * s, fs) for c, fs in self.terms))

    def __matmul__(self, other: "TensorOp") -> "TensorOp":
        self._check(other)
        terms = tuple(
            (c1 * c2, tuple(a @ b for a, b in zip(f1, f2)))
            for (c1, f1), (c2, f2) in itertools.product(self.terms, other.terms)
        )
        return TensorOp(self.dims, terms)

    def dagger(self) -> "TensorOp":
        return TensorOp(self.dims, tuple((np.conj(c), tuple(f.conj().T for f in fs)) for c, fs in self.terms))

    def tensor(self, other: "TensorOp") -> "TensorOp":
        """Append ``other``'s registers after this operator's registers."""
        terms = tuple(
            (c1 * c2, f1 + f2) for (c1, f1), (c2, f2) in itertools.product(self.terms, other.terms)
        )
        return TensorOp(self.dims + other.dims, terms)

    def dense(self, max_dim: int = MAX_DENSE_DIM) -> np.ndarray:
        if self.total_dim > max_dim:
            raise DenseLimitError(f"refusing to assemble dimension {self.total_dim} > {max_dim}")
        out = np.zeros((self.total_dim, self.total_dim), dtype=complex)
        for c, fs in self.terms:
            out += c * reduce(np.kron, fs, np.eye(1))
        return out

    def expectation(self, state: "TensorOp") -> complex:
        """``tr(state @ self)`` for a product ``state``."""
        self._check(state)
        total = 0j
        for cs, fs in state.terms:
            for c, xs in self.terms:
                val = cs * c
                for r, x in zip(fs, xs):
                    val *= np.trace(r @ x)
                    if val == 0:
                        break
                total += val
        return total

    def simplify(self) -> "TensorOp":
        """Merge terms: equal factor lists add coefficients; terms differing in a
        single register are combined there. Zero terms are dropped."""
        terms = [t for t in (_normalize_term(c, fs) for c, fs in self.terms) if t is not None]
        merged_any = True
        while merged_any:
            merged_any = False
            for i, j in itertools.combinations(range(len(terms)), 2):
                ci, fi = terms[i]
                cj, fj = terms[j]
                diff = [r for r in range(len(fi)) if not _close(fi[r], fj[r])]
                if len(diff) > 1:
                    continue
                if not diff:
                    merged = _normalize_term(ci + cj, fi)
                else:
                    nf = list(fi)
                    nf[diff[0]] = ci * fi[diff[0]] + cj * fj[diff[0]]
                    merged = _normalize_term(1.0, nf)
                terms = [t for k, t in enumerate(terms) if k not in (i, j)]
                if merged is not None:
                    terms.append(merged)
                merged_any = True
                break
        return TensorOp(self.dims, tuple(terms))

    def norm(self) -> float:
        """Operator (spectral) norm, computed on the registers where terms differ."""
        op = self.simplify()
        if not op.terms:
            return 0.0
        nreg = len(op.dims)
        first = op.terms[0][1]
        shared = [r for r in range(nreg) if all(_close(fs[r], first[r]) for _, fs in op.terms[1:])]
        rest = [r for r in range(nreg) if r not in shared]
        scale = 1.0
        for r in shared:
            scale *= np.linalg.norm(first[r], 2)
        if not rest:
            return abs(sum(c for c, _ in op.terms)) * scale
        sub_dim = int(np.prod([op.dims[r] for r in rest], dtype=object))
        if sub_dim > MAX_DENSE_DIM:
            raise DenseLimitError(f"norm needs a dense block of dimension {sub_dim}")
        block = np.zeros((sub_dim, sub_dim), dtype=complex)
        for c, fs in op.terms:
            block += c * reduce(np.kron, [fs[r] for r in rest], np.eye(1))
        return float(np.linalg.norm(block, 2)) * scale


def _normalize_term(coef, factors):
    """Rescale factors so their first significant entry is exactly 1; ``None`` if the term vanishes."""
    if abs(coef) < 1e-300:
        return None
    out = []
    for f in factors:
        mag = np.abs(f)
        top = mag.max()
        if top <= _MERGE_ATOL:
            return None
        k = int(np.argmax(mag.reshape(-1) > 1e-6 * top))
        piv = f.reshape(-1)[k]
        out.append(f / piv)
        coef = coef * piv
    if abs(coef) <= _MERGE_ATOL:
        return None
    return complex(coef), tuple(out)


def commutator(a: TensorOp, b: TensorOp) -> TensorOp:
    return a @ b - b @ a


def embed_dense(mat: np.ndarray) -> TensorOp:
    """Single-register operator."""
    return TensorOp.product([mat])
