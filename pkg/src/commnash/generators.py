"""Game families: the k-subset matrix M_n, column indicators, the padded M_n
embedding, the 2x2 one-way WSNE game and seeded random games.

Column and row indices are 0-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .game import BimatrixGame, MixedStrategy
from .zerosum import solve_matrix

DEFAULT_ROW_CAP = 10 ** 6
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class MnMatrix:
    """All 0/1 rows of length n with exactly k = floor(sqrt n) ones, in
    lexicographic order of their support sets."""

    n: int
    k: int
    matrix: np.ndarray

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PaddedMnGame:
    host_rows: tuple
    host_cols: tuple
    embedded: MnMatrix
    R: np.ndarray


def mn_rows(n: int) -> int:
    return math.comb(n, math.isqrt(n))


def make_mn(n: int, row_cap: int = DEFAULT_ROW_CAP) -> MnMatrix:
    if n < 1:
        raise ValueError("M_n needs n >= 1")
    k = math.isqrt(n)
    rows = math.comb(n, k)
    if rows > row_cap:
        raise ValueError(f"M_{n} has {rows} rows, above the cap of {row_cap}")
    M = np.zeros((rows, n))
    for r, cols in enumerate(itertools.combinations(range(n), k)):
        M[r, list(cols)] = 1.0
    M.setflags(write=False)
    return MnMatrix(n, k, M)


def make_column_indicator(n: int, ell: int) -> np.ndarray:
    """n x n matrix paying 1 in column `ell` and 0 elsewhere."""
    if not 0 <= ell < n:
        raise IndexError(f"column {ell} out of range for n={n}")
    C = np.zeros((n, n))
    C[:, ell] = 1.0
    return C


def make_wsne_oneway_game(j: int) -> BimatrixGame:
    """Identity for the row player against the indicator of column `j` (0 or 1)."""
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    return BimatrixGame(np.eye(2), make_column_indicator(2, j))


def make_padded_mn(n: int, host_rows, host_cols, n_rows: int | None = None,
                   row_cap: int = DEFAULT_ROW_CAP) -> PaddedMnGame:
    """Embed M_{n'} (n' = len(host_cols)) at the given rows and columns.

    Rows outside `host_rows` pay 0 everywhere; host rows pay 1 on every
    column outside `host_cols`. The matrix is ``n_rows x n`` (square by
    default). `host_rows` must have exactly binom(n', floor(sqrt n')) entries.
    """
    n_rows = n if n_rows is None else n_rows
    host_rows = tuple(int(i) for i in host_rows)
    host_cols = tuple(int(j) for j in host_cols)
    for name, idx, size in (("row", host_rows, n_rows), ("column", host_cols, n)):
        if len(set(idx)) != len(idx) or any(not 0 <= i < size for i in idx):
            raise ValueError(f"host {name}s must be distinct indices below {size}")
    if not host_cols:
        raise ValueError("need at least one host column")
    embedded = make_mn(len(host_cols), row_cap)
    if embedded.rows != len(host_rows):
        raise ValueError(
            f"M_{len(host_cols)} has {embedded.rows} rows but {len(host_rows)} host rows were given")
    R = np.zeros((n_rows, n))
    others = [j for j in range(n) if j not in set(host_cols)]
    rows = np.array(host_rows)
    R[np.ix_(rows, np.array(host_cols))] = embedded.matrix
    if others:
        R[np.ix_(rows, np.array(others))] = 1.0
    R.setflags(write=False)
    return PaddedMnGame(host_rows, host_cols, embedded, R)


def column_mass(M, x) -> np.ndarray:
    """Probability that a row drawn from x has a 1 in each column."""
    M = M.matrix if isinstance(M, MnMatrix) else np.asarray(M)
    p = x.probs if isinstance(x, MixedStrategy) else np.asarray(x, dtype=float)
    if p.shape[0] != M.shape[0]:
        raise ValueError(f"strategy has {p.shape[0]} entries but M has {M.shape[0]} rows")
    return p @ M


def worst_column(M, x) -> tuple[int, float]:
    """Column least likely to hold a 1 under x (lowest index on ties), with that probability.

    Columns within TIE_TOLERANCE of the minimum count as tied, so summation
    noise does not decide the pick.
    """
    phi = column_mass(M, x)
    m = int(np.flatnonzero(phi <= phi.min() + TIE_TOLERANCE)[0])
    return m, float(phi[m])


def least_row_regret(M, x, ell: int, mass: float) -> float:
    """Smallest row regret a column strategy with y[ell] >= mass can leave x with.

    Writing y = mass*e_ell + (1-mass)*z, the regret max_i (My)_i - x^T M y
    is max_i (B z)_i for a fixed matrix B, so the minimum over z is the value
    of the zero-sum game B.
    """
    M = M.matrix if isinstance(M, MnMatrix) else np.asarray(M, dtype=float)
    u = column_mass(M, x)
    B = mass * (M[:, [ell]] - u[ell]) + (1.0 - mass) * (M - u)
    return solve_matrix(B).value


def random_game(n: int, seed) -> BimatrixGame:
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    return BimatrixGame(rng.random((n, n)), rng.random((n, n)))


# --- named families for the harness ----------------------------------------

def _largest_embeddable(n: int) -> int:
    m = 1
    while m + 1 <= n and mn_rows(m + 1) <= n:
        m += 1
    return m


def family_game(family: str, n: int, seed: int = 0, **opts) -> BimatrixGame:
    """Square game from a named family.

    random       uniform [0, 1] entries
    indicator    random R, C = indicator of column ``ell`` (default seed mod n)
    wsne2x2      the 2x2 identity/indicator game, ``j`` default seed mod 2; n must be 2
    padded-mn    R embeds M_m (``m`` default: largest that fits) at seeded host rows
                 and columns; C indicates a host column
    mn           M_n with padding columns, size binom(n, floor(sqrt n)); C indicates
                 column ``ell``
    """
    rng = np.random.default_rng(seed)
    if family == "random":
        return random_game(n, seed)
    if family == "indicator":
        R = rng.random((n, n))
        return BimatrixGame(R, make_column_indicator(n, int(opts.get("ell", seed % n))))
    if family == "wsne2x2":
        if n != 2:
            raise ValueError("the wsne2x2 family only exists for n=2")
        return make_wsne_oneway_game(int(opts.get("j", seed % 2)))
    if family == "padded-mn":
        m = int(opts.get("m", _largest_embeddable(n)))
        if m > n or mn_rows(m) > n:
            raise ValueError(f"M_{m} does not fit in a {n}x{n} game")
        rows = np.sort(rng.choice(n, mn_rows(m), replace=False))
        cols = np.sort(rng.choice(n, m, replace=False))
        padded = make_padded_mn(n, rows, cols)
        ell = int(opts.get("ell", cols[seed % m]))
        return BimatrixGame(padded.R, make_column_indicator(n, ell))
    if family == "mn":
        size = mn_rows(n)
        padded = make_padded_mn(size, range(size), range(n), n_rows=size)
        ell = int(opts.get("ell", seed % n))
        return BimatrixGame(padded.R, make_column_indicator(size, ell))
    raise ValueError(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")


FAMILIES = ("random", "indicator", "wsne2x2", "padded-mn", "mn")


def family_size(family: str, n: int) -> int:
    """Number of pure strategies of the game `family_game` builds for parameter n."""
    return mn_rows(n) if family == "mn" else n
