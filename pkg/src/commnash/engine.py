"""Run two uncoupled player machines over a bit-metered channel.

A player machine is a generator function ``machine(view, params)``. It yields
``Send(bits)`` to transmit a bit string, yields ``RECEIVE`` to block until the
next inbound payload arrives (the payload is the value of the yield), and
returns its output ``MixedStrategy``. A machine is handed nothing but its own
``PlayerView``; the opponent's matrix never crosses into it.

Scheduling is deterministic: the row machine runs until it blocks, then the
column machine, and so on until both have returned.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Generator, Iterable

import numpy as np

from .game import BimatrixGame, MixedStrategy, RegretReport, Role, StrategyProfile, regret_report


class ProtocolError(RuntimeError):
    pass


class PolicyViolation(ProtocolError):
    pass


class BudgetExceeded(PolicyViolation):
    def __init__(self, sender: Role, round: int, used: int, budget: int):
        super().__init__(
            f"{sender.value} player exceeded its {budget}-bit budget in round {round} "
            f"({used} bits would have been sent)")
        self.sender = sender
        self.round = round


@dataclass(frozen=True)
class Send:
    bits: str


class _Receive:
    def __repr__(self):
        return "RECEIVE"


RECEIVE = _Receive()

Machine = Callable[["PlayerView", object], Generator[object, str, MixedStrategy]]


@dataclass(frozen=True, eq=False)
class PlayerView:
    role: Role
    own_matrix: np.ndarray
    rng_seed: int

    @property
    def n(self) -> int:
        return self.own_matrix.shape[0]

    def oriented(self) -> np.ndarray:
        """Own matrix with own pure strategies as rows (C is transposed)."""
        return self.own_matrix if self.role is Role.ROW else self.own_matrix.T

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)


@dataclass(frozen=True)
class Message:
    sender: Role
    payload: str
    round: int

    def __post_init__(self):
        if not self.payload or set(self.payload) - {"0", "1"}:
            raise ValueError(f"payload must be a non-empty bit string, got {self.payload!r}")

    @property
    def bits(self) -> int:
        return len(self.payload)


def _bits_to_hex(bits: str) -> str:
    width = (len(bits) + 3) // 4
    return format(int(bits, 2), f"0{width}x")


def _hex_to_bits(hexstr: str, length: int) -> str:
    return format(int(hexstr, 16), f"0{length}b") if length else ""


@dataclass(frozen=True)
class Transcript:
    messages: tuple[Message, ...] = ()

    def bits_from(self, sender: Role) -> int:
        return sum(m.bits for m in self.messages if m.sender is sender)

    @property
    def bits_row_to_col(self) -> int:
        return self.bits_from(Role.ROW)

    @property
    def bits_col_to_row(self) -> int:
        return self.bits_from(Role.COL)

    @property
    def bits_total(self) -> int:
        return self.bits_row_to_col + self.bits_col_to_row

    def to_dict(self) -> dict:
        return {
            "messages": [
                {"sender": m.sender.value, "round": m.round,
                 "payload": _bits_to_hex(m.payload), "bits": m.bits}
                for m in self.messages
            ],
            "bits_row_to_col": self.bits_row_to_col,
            "bits_col_to_row": self.bits_col_to_row,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Transcript":
        msgs = tuple(
            Message(Role(m["sender"]), _hex_to_bits(m["payload"], int(m["bits"])), int(m["round"]))
            for m in d["messages"]
        )
        t = cls(msgs)
        for key in ("bits_row_to_col", "bits_col_to_row"):
            if key in d and int(d[key]) != getattr(t, key):
                raise ValueError(f"{key}={d[key]} disagrees with the message list")
        return t

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ChannelPolicy:
    """``mode`` is "two-way", "one-way" (only ``sender`` may talk) or "none"."""

    mode: str = "two-way"
    sender: Role | None = None
    budget_bits: int | None = None

    def __post_init__(self):
        if self.mode not in ("two-way", "one-way", "none"):
            raise ValueError(f"unknown channel mode {self.mode!r}")
        if (self.mode == "one-way") != (self.sender is not None):
            raise ValueError("a sender is given exactly for one-way channels")
        if self.budget_bits is not None and self.budget_bits < 0:
            raise ValueError("budget must be non-negative")

    @classmethod
    def two_way(cls, budget_bits: int | None = None) -> "ChannelPolicy":
        return cls("two-way", None, budget_bits)

    @classmethod
    def one_way(cls, sender: Role, budget_bits: int | None = None) -> "ChannelPolicy":
        return cls("one-way", Role(sender), budget_bits)

    @classmethod
    def none(cls) -> "ChannelPolicy":
        return cls("none")

    def allows(self, sender: Role) -> bool:
        if self.mode == "none":
            return False
        return self.mode == "two-way" or self.sender is sender

    def to_dict(self) -> dict:
        return {"mode": self.mode, "sender": self.sender.value if self.sender else None,
                "budget_bits": self.budget_bits}

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelPolicy":
        sender = d.get("sender")
        return cls(d["mode"], Role(sender) if sender else None, d.get("budget_bits"))


@dataclass(frozen=True)
class ProtocolOutcome:
    profile: StrategyProfile
    transcript: Transcript
    report: RegretReport
    case_label: str


@dataclass(frozen=True)
class ProtocolDef:
    """A registered protocol: a machine per role plus what the channel must allow."""

    name: str
    row_machine: Machine
    col_machine: Machine
    senders: frozenset = field(default_factory=frozenset)
    label: Callable[[Transcript], str] = lambda t: ""

    def compatible(self, policy: ChannelPolicy) -> bool:
        return all(policy.allows(s) for s in self.senders)


_REGISTRY: dict[str, ProtocolDef] = {}


def register(proto: ProtocolDef) -> ProtocolDef:
    _REGISTRY[proto.name] = proto
    return proto


def get_protocol(name: str) -> ProtocolDef:
    from . import protocols  # noqa: F401  registers the built-in protocols

    try:
        return _REGISTRY[name]
    except KeyError:
        raise ProtocolError(f"unknown protocol {name!r}; known: {sorted(_REGISTRY)}") from None


def registered() -> list[str]:
    from . import protocols  # noqa: F401

    return sorted(_REGISTRY)


class _Channel:
    def __init__(self, policy: ChannelPolicy):
        self.policy = policy
        self.messages: list[Message] = []
        self.used = {Role.ROW: 0, Role.COL: 0}
        self.inbox = {Role.ROW: deque(), Role.COL: deque()}

    def deliver(self, sender: Role, bits: str) -> None:
        round_ = len(self.messages)
        msg = Message(sender, bits, round_)
        if not self.policy.allows(sender):
            raise PolicyViolation(
                f"{sender.value} player may not send under a {self.policy.mode} channel (round {round_})")
        budget = self.policy.budget_bits
        if budget is not None and self.used[sender] + msg.bits > budget:
            raise BudgetExceeded(sender, round_, self.used[sender] + msg.bits, budget)
        self.used[sender] += msg.bits
        self.messages.append(msg)
        self.inbox[sender.other].append(bits)


def execute(machines: dict[Role, Generator], policy: ChannelPolicy) -> tuple[dict[Role, MixedStrategy], Transcript]:
    """Drive already-instantiated machine generators to completion."""
    channel = _Channel(policy)
    pending: dict[Role, object] = {}
    outputs: dict[Role, MixedStrategy] = {}

    def advance(role: Role, value) -> None:
        try:
            pending[role] = machines[role].send(value)
        except StopIteration as stop:
            pending.pop(role, None)
            outputs[role] = stop.value

    for role in (Role.ROW, Role.COL):
        advance(role, None)

    while len(outputs) < 2:
        progressed = False
        for role in (Role.ROW, Role.COL):
            while role not in outputs:
                request = pending[role]
                if isinstance(request, Send):
                    channel.deliver(role, request.bits)
                    advance(role, None)
                elif request is RECEIVE:
                    if not channel.inbox[role]:
                        break
                    advance(role, channel.inbox[role].popleft())
                else:
                    raise ProtocolError(f"{role.value} machine yielded {request!r}")
                progressed = True
        if not progressed:
            raise ProtocolError("deadlock: both machines are waiting for a message")

    for role in (Role.ROW, Role.COL):
        if channel.inbox[role]:
            raise ProtocolError(f"{role.value} machine finished with unread messages")
        if not isinstance(outputs[role], MixedStrategy):
            raise ProtocolError(f"{role.value} machine returned {type(outputs[role]).__name__}, not a strategy")
    return outputs, Transcript(tuple(channel.messages))


def run_protocol(game: BimatrixGame, protocol: str | ProtocolDef, policy: ChannelPolicy,
                 seeds: tuple[int, int] = (0, 1), params=None) -> ProtocolOutcome:
    proto = get_protocol(protocol) if isinstance(protocol, str) else protocol
    if not proto.compatible(policy):
        raise ProtocolError(f"protocol {proto.name!r} cannot run under a {policy.mode} channel")
    row_seed, col_seed = (int(s) for s in seeds)
    machines = {
        Role.ROW: proto.row_machine(PlayerView(Role.ROW, game.R, row_seed), params),
        Role.COL: proto.col_machine(PlayerView(Role.COL, game.C, col_seed), params),
    }
    outputs, transcript = execute(machines, policy)
    profile = StrategyProfile(outputs[Role.ROW], outputs[Role.COL])
    return ProtocolOutcome(profile, transcript, regret_report(game, profile), proto.label(transcript))


def replay(transcript: Transcript, game: BimatrixGame, protocol, policy: ChannelPolicy,
           seeds: tuple[int, int], params=None) -> bool:
    """True iff re-running the protocol reproduces `transcript` bit for bit."""
    from .zerosum import ZeroSumError

    try:
        again = run_protocol(game, protocol, policy, seeds, params)
    except (ProtocolError, ZeroSumError):
        return False
    return again.transcript == transcript


def derive_seeds(seed: int) -> tuple[int, int]:
    """Independent 64-bit player seeds from one instance seed."""
    row, col = np.random.SeedSequence(int(seed)).spawn(2)
    return int(row.generate_state(1, np.uint64)[0]), int(col.generate_state(1, np.uint64)[0])


def outbound(messages: Iterable[Message], sender: Role) -> list[str]:
    return [m.payload for m in messages if m.sender is sender]
