"""The four communication-bounded protocols and the strategy-sampling subroutine.

Registered names: ``no-comm``, ``dmp-oneway``, ``polylog-ne``, ``polylog-wsne``.

Inside a machine every matrix is "oriented": the player's own pure strategies
index the rows (the column player works with C transposed), so both roles
share one code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .engine import RECEIVE, ProtocolError, ProtocolDef, PlayerView, Send, Transcript, register
from .game import MixedStrategy, Role
from .zerosum import DEFAULT_TOL, solve_zero_sum

ALPHA_NE = (5.0 - math.sqrt(17.0)) / 2.0
ALPHA_WSNE = math.sqrt(3.0) - 1.0


@dataclass(frozen=True)
class ProtocolParams:
    """Tunables for the polylog protocols.

    ``alpha=None`` means the protocol's own constant (ALPHA_NE or ALPHA_WSNE).
    ``tol`` is the zero-sum solver tolerance.
    """

    alpha: float | None = None
    delta: float = 0.05
    resample_cap: int = 100
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.resample_cap < 1:
            raise ValueError("resample_cap must be at least 1")

    def alpha_for(self, protocol: str) -> float:
        if self.alpha is not None:
            return self.alpha
        return ALPHA_WSNE if protocol == "polylog-wsne" else ALPHA_NE


class SamplingError(ProtocolError):
    pass


def index_width(n: int) -> int:
    """Bits for one pure-strategy index: ceil(log2 n), zero when n == 1."""
    return (n - 1).bit_length()


def sample_size(n: int, delta: float) -> int:
    return max(1, math.ceil(math.log(n) / delta ** 2))


def encode_indices(indices, width: int) -> str:
    return "".join(format(int(i), f"0{width}b") for i in indices)


def decode_indices(bits: str, width: int) -> list[int]:
    if len(bits) % width:
        raise ProtocolError(f"payload of {len(bits)} bits is not a multiple of {width}")
    return [int(bits[p:p + width], 2) for p in range(0, len(bits), width)]


def empirical(indices, n: int) -> MixedStrategy:
    counts = np.bincount(np.asarray(indices, dtype=int), minlength=n)
    return MixedStrategy(counts / counts.sum())


def draw_sample(source: MixedStrategy, k: int, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(source.n, size=k, p=source.probs)


def deviation(source: MixedStrategy, sample: MixedStrategy, own_matrix, check_strategy, direction: int) -> float:
    """Signed change in the quantity the sampling check protects.

    ``own_matrix`` is oriented (own pure strategies on rows). For
    ``direction=+1`` the strategies are the player's own and the value is the
    player's payoff, so a drop is bad; the return is ``sampled - source``.
    For ``direction=-1`` the strategies are the opponent's and the value is
    the player's own payoff against them, so a rise is bad; the return is
    ``source - sampled``. Either way the check accepts iff the result is
    ``>= -delta``.

    With a ``check_strategy`` the payoff is measured against it; without
    one, against the worst case (the security level for +1, the
    best-response value for -1).
    """
    A = np.asarray(own_matrix, dtype=float)
    p, q = source.probs, sample.probs
    if direction > 0:
        if check_strategy is None:
            return float((q @ A).min() - (p @ A).min())
        c = check_strategy.probs
        return float(q @ A @ c - p @ A @ c)
    if check_strategy is None:
        return float((A @ p).max() - (A @ q).max())
    c = check_strategy.probs
    return float(c @ A @ p - c @ A @ q)


class Sample(NamedTuple):
    empirical: MixedStrategy
    bits: int
    indices: tuple
    attempts: int


def sample_and_send(source: MixedStrategy, own_matrix, check_strategy, direction: int,
                    params: ProtocolParams, rng: np.random.Generator) -> Sample:
    """Replace `source` by the empirical distribution of k = ceil(ln n / delta^2) draws.

    Resamples until the payoff check in :func:`deviation` passes, at most
    ``params.resample_cap`` times. The bit cost is that of sending k indices.
    """
    n = source.n
    k = sample_size(n, params.delta)
    for attempt in range(1, params.resample_cap + 1):
        idx = draw_sample(source, k, rng)
        x = empirical(idx, n)
        if deviation(source, x, own_matrix, check_strategy, direction) >= -params.delta:
            return Sample(x, k * index_width(n), tuple(int(i) for i in idx), attempt)
    raise SamplingError(f"no acceptable sample of size {k} in {params.resample_cap} attempts")


def shift_lowest(probs, payoffs, amount: float, target: int) -> tuple[np.ndarray, float]:
    """Move `amount` of mass from the lowest-paying strategies onto `target`.

    Strategies are drained in ascending payoff order, lowest index first among
    ties; the last one drained may be drained partially.
    """
    out = np.array(probs, dtype=float)
    remaining = amount
    for i in np.argsort(payoffs, kind="stable"):
        if remaining <= 0.0:
            break
        take = min(out[i], remaining)
        out[i] -= take
        remaining -= take
    moved = amount - remaining
    out[target] += moved
    return out, moved


def shift_below(probs, payoffs, cutoff: float, target: int) -> tuple[np.ndarray, float]:
    """Move all mass on strategies paying less than `cutoff` onto `target`."""
    out = np.array(probs, dtype=float)
    low = np.asarray(payoffs) < cutoff
    low[target] = False
    moved = float(out[low].sum())
    out[low] = 0.0
    out[target] += moved
    return out, moved


# --- machines -------------------------------------------------------------

def _send_indices(indices, width: int):
    if width:
        yield Send(encode_indices(indices, width))


def _recv_indices(count: int, width: int):
    if not width:
        return [0] * count
    bits = yield RECEIVE
    return decode_indices(bits, width)


def _half_and_half(n: int, first: int, second: int) -> MixedStrategy:
    p = np.zeros(n)
    p[first] += 0.5
    p[second] += 0.5
    return MixedStrategy(p)


def no_comm_machine(view: PlayerView, params=None):
    A = view.oriented()
    i = int(np.argmax(A[:, 0]))
    return _half_and_half(view.n, 0, i)
    yield  # unreachable; keeps this a generator like the other machines


def dmp_col_machine(view: PlayerView, params=None):
    A = view.oriented()
    j = int(np.argmax(A[:, 0]))
    yield from _send_indices([j], index_width(view.n))
    return MixedStrategy.pure(view.n, j)


def dmp_row_machine(view: PlayerView, params=None):
    (j,) = yield from _recv_indices(1, index_width(view.n))
    k = int(np.argmax(view.own_matrix[:, j]))
    return _half_and_half(view.n, 0, k)


def _polylog_machine(variant: str):
    def machine(view: PlayerView, params: ProtocolParams | None = None):
        params = params or ProtocolParams()
        alpha = params.alpha_for(variant)
        margin = params.delta if variant == "polylog-wsne" else 0.0
        A = view.oriented()
        n, width = view.n, index_width(view.n)
        k = sample_size(n, params.delta)
        rng = view.rng()
        me = view.role

        sol = solve_zero_sum(A, tol=params.tol)
        mine = sol.value > alpha + margin
        yield Send("1" if mine else "0")
        theirs = (yield RECEIVE) == "1"
        flags = {me: mine, me.other: theirs}

        if not (flags[Role.ROW] or flags[Role.COL]):
            # both values low: send a sample of the strategy holding my payoff down
            s = sample_and_send(sol.min_strategy, A, None, -1, params, rng)
            yield from _send_indices(s.indices, width)
            got = yield from _recv_indices(k, width)
            return empirical(got, n)

        flagged = Role.ROW if flags[Role.ROW] else Role.COL
        if flagged is not me:
            got = yield from _recv_indices(k, width)
            j = int(np.argmax(A @ empirical(got, n).probs))
            yield from _send_indices([j], width)
            return MixedStrategy.pure(n, j)

        s = sample_and_send(sol.max_strategy, A, None, +1, params, rng)
        yield from _send_indices(s.indices, width)
        (j,) = yield from _recv_indices(1, width)
        payoffs = A[:, j]
        best = int(np.argmax(payoffs))
        if variant == "polylog-wsne":
            probs, _ = shift_below(s.empirical.probs, payoffs, payoffs[best] - alpha, best)
        else:
            probs, _ = shift_lowest(s.empirical.probs, payoffs, alpha / 2.0, best)
        return MixedStrategy(probs)

    machine.__name__ = f"{variant.replace('-', '_')}_machine"
    return machine


def polylog_case(transcript: Transcript) -> str:
    row_flag, col_flag = (m.payload for m in transcript.messages[:2])
    if row_flag == "1":
        return "case2-row"
    if col_flag == "1":
        return "case2-col"
    return "case1"


def expected_bits(protocol: str, n: int, delta: float = 0.05, case: str | None = None) -> int:
    """Exact bit count of a run; for the polylog protocols `case` selects the branch
    and ``None`` gives the upper bound over branches."""
    b = index_width(n)
    if protocol == "no-comm":
        return 0
    if protocol == "dmp-oneway":
        return b
    k = sample_size(n, delta)
    if case == "case1":
        return 2 + 2 * k * b
    if case in ("case2-row", "case2-col"):
        return 2 + k * b + b
    return 2 + 2 * k * b + 2 * b


polylog_ne_machine = _polylog_machine("polylog-ne")
polylog_wsne_machine = _polylog_machine("polylog-wsne")

register(ProtocolDef("no-comm", no_comm_machine, no_comm_machine, frozenset(), lambda t: "no-comm"))
register(ProtocolDef("dmp-oneway", dmp_row_machine, dmp_col_machine, frozenset({Role.COL}), lambda t: "dmp"))
register(ProtocolDef("polylog-ne", polylog_ne_machine, polylog_ne_machine,
                      frozenset({Role.ROW, Role.COL}), polylog_case))
register(ProtocolDef("polylog-wsne", polylog_wsne_machine, polylog_wsne_machine,
                      frozenset({Role.ROW, Role.COL}), polylog_case))

PROTOCOLS = ("no-comm", "dmp-oneway", "polylog-ne", "polylog-wsne")


def default_policy(protocol: str):
    from .engine import ChannelPolicy

    if protocol == "no-comm":
        return ChannelPolicy.none()
    if protocol == "dmp-oneway":
        return ChannelPolicy.one_way(Role.COL)
    return ChannelPolicy.two_way()


def guarantee(protocol: str, params: ProtocolParams | None = None) -> tuple[str, float]:
    """(metric, bound) each protocol promises: eps_ne or eps_wsne."""
    params = params or ProtocolParams()
    if protocol == "no-comm":
        return "eps_ne", 0.75
    if protocol == "dmp-oneway":
        return "eps_ne", 0.5
    bound = params.alpha_for(protocol) + params.delta + 2 * params.tol
    return ("eps_wsne" if protocol == "polylog-wsne" else "eps_ne"), bound
