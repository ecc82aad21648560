"""Bimatrix games, mixed strategies and the two regret measures.

Pure strategies are 0-based everywhere in code and in every file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

SUPPORT_THRESHOLD = 1e-9
SUM_TOLERANCE = 1e-12


class Role(str, Enum):
    ROW = "row"
    COL = "col"

    @property
    def other(self) -> "Role":
        return Role.COL if self is Role.ROW else Role.ROW


class DimensionError(ValueError):
    pass


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BimatrixGame:
    """Square two-player game with payoffs in [0, 1].

    Entries outside [0, 1] are rejected rather than clamped.
    """

    R: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        R, C = _frozen(self.R), _frozen(self.C)
        for name, M in (("R", R), ("C", C)):
            if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
                raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
            if not np.all(np.isfinite(M)) or M.min() < 0.0 or M.max() > 1.0:
                raise ValueError(f"entries of {name} must lie in [0, 1]")
        if R.shape != C.shape:
            raise DimensionError(f"R has shape {R.shape} but C has shape {C.shape}")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "C", C)

    @property
    def n(self) -> int:
        return self.R.shape[0]

    def matrix(self, who: Role) -> np.ndarray:
        return self.R if Role(who) is Role.ROW else self.C

    def __eq__(self, other):
        if not isinstance(other, BimatrixGame):
            return NotImplemented
        return np.array_equal(self.R, other.R) and np.array_equal(self.C, other.C)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MixedStrategy:
    """Probability vector over pure strategies.

    Construction rescales by the sum so the entries add to one; negative
    entries are an error.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.size == 0:
            raise DimensionError("a mixed strategy needs at least one pure strategy")
        if not np.all(np.isfinite(p)) or p.min() < 0.0:
            raise ValueError("probabilities must be finite and non-negative")
        total = p.sum()
        if total <= 0.0:
            raise ValueError("probabilities must not all be zero")
        if abs(total - 1.0) > SUM_TOLERANCE:
            p = p / total
        object.__setattr__(self, "probs", _frozen(p))

    @classmethod
    def pure(cls, n: int, i: int) -> "MixedStrategy":
        if not 0 <= i < n:
            raise IndexError(f"pure strategy {i} out of range for n={n}")
        p = np.zeros(n)
        p[i] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls, n: int) -> "MixedStrategy":
        return cls(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
        return np.flatnonzero(self.probs > threshold)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, MixedStrategy):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    __hash__ = None


@dataclass(frozen=True)
class StrategyProfile:
    row: MixedStrategy
    col: MixedStrategy

    def check(self, n: int) -> None:
        if self.row.n != n or self.col.n != n:
            raise DimensionError(
                f"profile dimensions ({self.row.n}, {self.col.n}) do not match n={n}")


@dataclass(frozen=True)
class RegretReport:
    row_regret: float
    col_regret: float
    eps_wsne: float
    eps_ne: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eps_ne", max(self.row_regret, self.col_regret))


def _as_probs(s) -> np.ndarray:
    return s.probs if isinstance(s, MixedStrategy) else np.asarray(s, dtype=float)


def payoff(game: BimatrixGame, profile: StrategyProfile, who: Role) -> float:
    """Expected payoff x^T M y of player `who` at `profile`."""
    profile.check(game.n)
    M = game.matrix(who)
    return float(profile.row.probs @ M @ profile.col.probs)


def response_payoffs(payoff_matrix, opponent, who: Role) -> np.ndarray:
    """Expected payoff of each pure strategy of `who` against `opponent`.

    `payoff_matrix` is indexed [row, col] as in the game, so a row player's
    responses are M @ y and a column player's are x @ M. Works for
    rectangular matrices.
    """
    M = np.asarray(payoff_matrix, dtype=float)
    q = _as_probs(opponent)
    if Role(who) is Role.ROW:
        if q.shape[0] != M.shape[1]:
            raise DimensionError(f"opponent has {q.shape[0]} strategies, matrix has {M.shape[1]} columns")
        return M @ q
    if q.shape[0] != M.shape[0]:
        raise DimensionError(f"opponent has {q.shape[0]} strategies, matrix has {M.shape[0]} rows")
    return q @ M


def best_response(payoff_matrix, opponent, who: Role) -> tuple[int, float]:
    """Pure best response of `who` to `opponent`; ties go to the lowest index."""
    values = response_payoffs(payoff_matrix, opponent, who)
    idx = int(np.argmax(values))
    return idx, float(values[idx])


def player_regrets(payoff_matrix, own, opponent, who: Role) -> tuple[float, float]:
    """(NE regret, WSNE regret) of one player, for any matrix shape."""
    values = response_payoffs(payoff_matrix, opponent, who)
    p = _as_probs(own)
    if p.shape[0] != values.shape[0]:
        raise DimensionError(f"own strategy has {p.shape[0]} entries, expected {values.shape[0]}")
    best = values.max()
    ne = max(0.0, float(best - p @ values))
    supp = p > SUPPORT_THRESHOLD
    ws = max(0.0, float(best - values[supp].min())) if supp.any() else 0.0
    return ne, ws


def regret_report(game: BimatrixGame, profile: StrategyProfile) -> RegretReport:
    profile.check(game.n)
    x, y = profile.row, profile.col
    r_ne, r_ws = player_regrets(game.R, x, y, Role.ROW)
    c_ne, c_ws = player_regrets(game.C, y, x, Role.COL)
    # mass below the support threshold can leave the WSNE figure a hair under
    # the NE one; an eps-WSNE is always an eps-NE so report the larger
    wsne = max(r_ws, c_ws, r_ne, c_ne)
    return RegretReport(row_regret=r_ne, col_regret=c_ne, eps_wsne=wsne)


def total_variation(a: MixedStrategy, b: MixedStrategy) -> float:
    pa, pb = _as_probs(a), _as_probs(b)
    if pa.shape != pb.shape:
        raise DimensionError(f"cannot compare strategies of sizes {pa.shape[0]} and {pb.shape[0]}")
    return 0.5 * float(np.abs(pa - pb).sum())
