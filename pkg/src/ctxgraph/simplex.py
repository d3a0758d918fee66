"""Phase-one simplex for ``A x = b, x >= 0`` over exact rationals or floats.

The same tableau code runs on ``object`` arrays of ``Fraction`` (exact
pivots, zero tolerance) and on ``float64`` arrays (tolerance-based). Beyond
a feasible point it returns the simplex multipliers of the final basis,
which form a Farkas certificate when the system is infeasible.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FLOAT_TOL = 1e-8
_PIVOT_TOL = 1e-11


class SolverError(RuntimeError):
    """The LP solver stopped without an answer (iteration cap or numerical breakdown)."""


@dataclass
class FeasibilityResult:
    feasible: bool
    objective: object  # sum of artificials at the optimum
    x: np.ndarray  # primal point (meaningful when feasible)
    y: np.ndarray  # multipliers: y @ A <= 0 and y @ b == objective
    iterations: int


def _to_exact(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    return np.vectorize(Fraction, otypes=[object])(a) if a.size else a


def solve_feasibility(A, b, exact: bool = False, tol: float = FLOAT_TOL, max_iter: int = 100_000) -> FeasibilityResult:
    """Minimise the total artificial slack of ``A x + s = b`` over ``x, s >= 0``.

    The system is feasible iff the optimum is 0 (``<= tol`` in floating point).
    """
    if exact:
        A = _to_exact(A)
        b = _to_exact(b)
        zero, one, eps, piv_eps = Fraction(0), Fraction(1), Fraction(0), Fraction(0)
    else:
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        zero, one, eps, piv_eps = 0.0, 1.0, _PIVOT_TOL, 1e-9
    m, n = A.shape
    flip = np.array([x < 0 for x in b])
    sign = np.where(flip, -1, 1)
    A = A * sign[:, None]
    b = b * sign

    dtype = object if exact else float
    T = np.empty((m + 1, n + m + 1), dtype=dtype)
    T[:m, :n] = A
    T[:m, n:n + m] = zero
    for i in range(m):
        T[i, n + i] = one
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0) if m else zero
    T[m, n:n + m] = zero
    T[m, -1] = -b.sum() if m else zero
    basis = list(range(n, n + m))

    bland = False
    degenerate_run = 0
    it = 0
    while True:
        r = T[m, :-1]
        if bland:
            cand = [j for j in range(n + m) if r[j] < -eps]
            if not cand:
                break
            j = cand[0]
        else:
            j = int(np.argmin(r.astype(float)) if exact else np.argmin(r))
            if not r[j] < -eps:
                break
        col = T[:m, j]
        rows = [i for i in range(m) if col[i] > piv_eps]
        if not rows:  # pragma: no cover - phase one is bounded below by 0
            raise SolverError("unbounded phase-one problem")
        ratios = [(T[i, -1] / col[i], basis[i], i) for i in rows]
        best = min(rt for rt, _, _ in ratios)
        if exact:
            ties = [(bi, i) for rt, bi, i in ratios if rt == best]
        else:
            ties = [(bi, i) for rt, bi, i in ratios if rt <= best + 1e-12]
        _, i = min(ties)
        degenerate_run = degenerate_run + 1 if best == 0 or (not exact and best < 1e-14) else 0
        if degenerate_run > 50:
            bland = True
        _pivot(T, i, j)
        basis[i] = j
        it += 1
        if it > max_iter:
            raise SolverError(f"simplex exceeded {max_iter} iterations")

    objective = -T[m, -1]
    x = np.zeros(n, dtype=dtype)
    if exact:
        x[:] = zero
    for i, bj in enumerate(basis):
        if bj < n:
            x[bj] = T[i, -1]
    y = np.array([one - T[m, n + i] for i in range(m)], dtype=dtype) * sign
    if not exact and not np.isfinite(T.astype(float)).all():  # pragma: no cover
        raise SolverError("numerical breakdown in simplex")
    feasible = objective == 0 if exact else float(objective) <= tol
    return FeasibilityResult(bool(feasible), objective, x, y, it)


def _pivot(T: np.ndarray, i: int, j: int) -> None:
    T[i] = T[i] / T[i, j]
    col = T[:, j].copy()
    col[i] = 0
    nz = np.nonzero(col != 0)[0]
    if len(nz):
        T[nz] -= np.outer(col[nz], T[i])
        T[nz, j] = 0
