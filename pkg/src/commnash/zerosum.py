"""Zero-sum game solver: dense tableau simplex with a minimax certificate.

The maximizer picks rows of `A`, the minimizer picks columns. After shifting
`A` to be strictly positive, the minimizer's problem

    max 1^T u   s.t.  A u <= 1,  u >= 0

starts from a feasible slack basis, so no phase one is needed. The optimal
dual gives the maximizer's strategy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import MixedStrategy

DEFAULT_TOL = 1e-9
_PIVOT_EPS = 1e-12
_DEGENERATE_STREAK = 50


@dataclass(frozen=True)
class ZeroSumSolution:
    max_strategy: MixedStrategy
    min_strategy: MixedStrategy
    value: float
    certificate_gap: float
    pivots: int = 0


class ZeroSumError(RuntimeError):
    """Raised when the simplex hits its pivot cap or cannot certify a solution.

    `best` holds the best solution found so far (possibly None).
    """

    def __init__(self, message: str, best: ZeroSumSolution | None = None):
        super().__init__(message)
        self.best = best


def certificate(A: np.ndarray, x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """(best maximizer reply to y, worst payoff guaranteed by x)."""
    return float((A @ y).max()), float((x @ A).min())


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _simplex(P: np.ndarray, max_pivots: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Run the simplex on strictly positive `P`; return (u, dual w, pivots)."""
    m, n = P.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = P
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :n] = -1.0
    basis = list(range(n, n + m))

    pivots = 0
    degenerate = 0
    while True:
        reduced = T[m, :-1]
        if reduced.min() >= -_PIVOT_EPS:
            break
        if pivots >= max_pivots:
            raise ZeroSumError(f"simplex did not converge within {max_pivots} pivots")
        if degenerate < _DEGENERATE_STREAK:
            col = int(np.argmin(reduced))
        else:
            # Bland's rule once a degenerate streak suggests cycling
            col = int(np.flatnonzero(reduced < -_PIVOT_EPS)[0])
        column = T[:m, col]
        ok = column > _PIVOT_EPS
        ratios = np.full(m, np.inf)
        ratios[ok] = T[:m, -1][ok] / column[ok]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-15)
        row = int(min(ties, key=lambda r: basis[r]))
        degenerate = degenerate + 1 if best <= _PIVOT_EPS else 0
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1

    # re-solve on the final basis; the tableau accumulates rounding
    full = np.hstack([P, np.eye(m)])
    B = full[:, basis]
    cost = np.array([1.0 if j < n else 0.0 for j in basis])
    try:
        u_basic = np.linalg.solve(B, np.ones(m))
        w = np.linalg.solve(B.T, cost)
    except np.linalg.LinAlgError:
        u_basic = T[:m, -1].copy()
        w = T[m, n:n + m].copy()
    u = np.zeros(n + m)
    u[basis] = u_basic
    return u[:n], w, pivots


def _normalise(v: np.ndarray) -> np.ndarray:
    v = np.where(v > 0.0, v, 0.0)
    return v / v.sum()


def solve_matrix(A, tol: float = DEFAULT_TOL, max_pivots: int | None = None) -> ZeroSumSolution:
    """Solve the zero-sum game on any finite real (possibly rectangular) matrix."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise ValueError(f"expected a non-empty matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    m, n = A.shape
    lo, hi = A.min(), A.max()
    if hi == lo:
        return ZeroSumSolution(MixedStrategy.uniform(m), MixedStrategy.uniform(n), float(lo), 0.0)
    if max_pivots is None:
        max_pivots = 10 * max(m, n) ** 2

    # pivot count scales with the constraint count, so keep that side short
    transposed = m > n
    work = (hi - A.T) if transposed else (A - lo)
    P = work / (hi - lo) + 1.0
    u, w, pivots = _simplex(P, max_pivots)
    p_min, p_max = _normalise(u), _normalise(w)
    x, y = (p_min, p_max) if transposed else (p_max, p_min)

    upper, lower = certificate(A, x, y)
    gap = upper - lower
    sol = ZeroSumSolution(MixedStrategy(x), MixedStrategy(y), 0.5 * (upper + lower), max(gap, 0.0), pivots)
    if gap > tol * (hi - lo if hi - lo > 1.0 else 1.0):
        raise ZeroSumError(f"minimax certificate gap {gap:.3g} exceeds tolerance {tol:.3g}", best=sol)
    return sol


def solve_zero_sum(A, tol: float = DEFAULT_TOL, max_pivots: int | None = None) -> ZeroSumSolution:
    """Maximin/minimax strategies and value of the game where rows maximize `A`.

    Entries must lie in [0, 1]. The returned value v satisfies
    ``max_i (A y*)_i <= v + tol`` and ``min_j (x*^T A)_j >= v - tol``.
    """
    A = np.asarray(A, dtype=float)
    if A.size and (not np.all(np.isfinite(A)) or A.min() < 0.0 or A.max() > 1.0):
        raise ValueError("zero-sum payoffs must lie in [0, 1]")
    return solve_matrix(A, tol=tol, max_pivots=max_pivots)


def value_exceeds(sol: ZeroSumSolution, threshold: float) -> bool:
    return sol.value > threshold
