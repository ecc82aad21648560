"""Protocol x game-family sweeps, summaries and file formats.

Game file (JSON)::

    {"n": 2, "R": [[1, 0], [0, 1]], "C": [[0, 1], [1, 0]]}

Run file (JSON, one per protocol run, written with ``transcripts_dir``)
holds everything ``replay`` needs: protocol, seeds, policy, params, the game
and the transcript.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .engine import ChannelPolicy, Transcript, derive_seeds, replay, run_protocol
from .game import BimatrixGame, MixedStrategy, StrategyProfile, regret_report
from .generators import DEFAULT_ROW_CAP, FAMILIES, family_game, family_size, mn_rows
from .protocols import PROTOCOLS, ProtocolParams, default_policy, guarantee

SLACK = {"no-comm": 1e-9, "dmp-oneway": 1e-9, "polylog-ne": 1e-6, "polylog-wsne": 1e-6}

COLUMNS = (
    "protocol", "family", "n", "size", "seed", "eps_ne", "eps_wsne", "row_regret", "col_regret",
    "bits_total", "bits_row_to_col", "bits_col_to_row", "case_label", "alpha", "delta",
    "bound", "violation", "error", "row_strategy", "col_strategy", "wall_time",
)


class ConfigError(ValueError):
    pass


class GameFileError(ValueError):
    pass


def parse_family(family: str) -> tuple[str, dict]:
    """``"indicator:ell=3,foo=bar"`` -> ``("indicator", {"ell": "3", "foo": "bar"})``."""
    name, _, rest = family.partition(":")
    opts = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"family option {item!r} in {family!r} is not key=value")
        opts[key.strip()] = value.strip()
    return name.strip(), opts


@dataclass
class SweepConfig:
    protocols: list
    families: list
    n_values: list
    base_seed: int = 0
    count: int = 1
    params: ProtocolParams = field(default_factory=ProtocolParams)
    output: str | None = None
    format: str = "csv"
    jobs: int = 1
    transcripts_dir: str | None = None

    def validate(self) -> None:
        if not self.protocols:
            raise ConfigError("no protocols given")
        if not self.families:
            raise ConfigError("no game families given")
        if self.count < 1:
            raise ConfigError("count must be at least 1")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}")
        for p in self.protocols:
            if p not in PROTOCOLS:
                raise ConfigError(f"unknown protocol {p!r}; known: {', '.join(PROTOCOLS)}")
        for family in self.families:
            name, opts = parse_family(family)
            if name == "file":
                if "path" not in opts:
                    raise ConfigError("the file family needs a path option")
                continue
            if name not in FAMILIES:
                raise ConfigError(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")
            for n in self._sizes(family):
                if n < 1:
                    raise ConfigError(f"n must be positive, got {n}")
                if name == "wsne2x2" and n != 2:
                    raise ConfigError("the wsne2x2 family needs n=2 (use wsne2x2:n=2)")
                if name == "mn" and mn_rows(n) > DEFAULT_ROW_CAP:
                    raise ConfigError(f"M_{n} exceeds the row cap")

    def _sizes(self, family: str) -> list:
        _, opts = parse_family(family)
        if "n" in opts:
            return [int(opts["n"])]
        if not self.n_values:
            raise ConfigError(f"no n values for family {family!r}")
        return [int(n) for n in self.n_values]

    def instances(self):
        for family in self.families:
            name, _ = parse_family(family)
            sizes = [0] if name == "file" else self._sizes(family)
            for n in sizes:
                for i in range(self.count):
                    yield family, n, self.base_seed + i

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        params = d.pop("params", {}) or {}
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(params=ProtocolParams(**params), **d)


@dataclass
class SweepRecord:
    protocol: str
    family: str
    n: int
    size: int
    seed: int
    eps_ne: float = math.nan
    eps_wsne: float = math.nan
    row_regret: float = math.nan
    col_regret: float = math.nan
    bits_total: int = 0
    bits_row_to_col: int = 0
    bits_col_to_row: int = 0
    case_label: str = ""
    alpha: float = math.nan
    delta: float = math.nan
    bound: float = math.nan
    violation: bool = False
    error: str = ""
    row_strategy: list = field(default_factory=list)
    col_strategy: list = field(default_factory=list)
    wall_time: float = 0.0

    def sort_key(self):
        return (self.protocol, self.family, self.n, self.seed)

    def profile(self) -> StrategyProfile:
        return StrategyProfile(MixedStrategy(self.row_strategy), MixedStrategy(self.col_strategy))


def is_violation(record: SweepRecord, params: ProtocolParams | None = None) -> bool:
    """Recompute whether a record breaks its protocol's guarantee."""
    if params is None:
        params = ProtocolParams(
            alpha=None if math.isnan(record.alpha) else record.alpha,
            delta=0.05 if math.isnan(record.delta) else record.delta,
        )
    metric, bound = guarantee(record.protocol, params)
    value = getattr(record, metric)
    return bool(value > bound + SLACK.get(record.protocol, 0.0))


def instance_game(family: str, n: int, seed: int) -> BimatrixGame:
    name, opts = parse_family(family)
    if name == "file":
        return load_game(opts["path"])
    opts.pop("n", None)
    return family_game(name, n, seed, **{k: int(v) for k, v in opts.items()})


def _run_file(protocol, family, n, seed, seeds, policy, params, game, transcript) -> dict:
    return {
        "protocol": protocol, "family": family, "n": n, "seed": seed, "seeds": list(seeds),
        "policy": policy.to_dict(), "params": dataclasses.asdict(params),
        "game": game_to_dict(game), "transcript": transcript.to_dict(),
    }


def _run_instance(task) -> list:
    family, n, seed, protocols, params, transcripts_dir = task
    records = []
    try:
        game = instance_game(family, n, seed)
    except Exception as exc:  # failures are data
        return [SweepRecord(p, family, n, family_size(parse_family(family)[0], n) if n else 0, seed,
                            error=f"{type(exc).__name__}: {exc}") for p in protocols]
    for protocol in protocols:
        metric, bound = guarantee(protocol, params)
        rec = SweepRecord(protocol, family, n, game.n, seed,
                          alpha=params.alpha_for(protocol), delta=params.delta, bound=bound)
        policy = default_policy(protocol)
        seeds = derive_seeds(seed)
        start = time.perf_counter()
        try:
            out = run_protocol(game, protocol, policy, seeds, params)
        except Exception as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
        else:
            t = out.transcript
            rec.eps_ne, rec.eps_wsne = out.report.eps_ne, out.report.eps_wsne
            rec.row_regret, rec.col_regret = out.report.row_regret, out.report.col_regret
            rec.bits_total, rec.bits_row_to_col, rec.bits_col_to_row = t.bits_total, t.bits_row_to_col, t.bits_col_to_row
            rec.case_label = out.case_label
            rec.row_strategy = out.profile.row.probs.tolist()
            rec.col_strategy = out.profile.col.probs.tolist()
            rec.violation = is_violation(rec, params)
            if transcripts_dir:
                name = f"{protocol}__{family.replace(':', '_').replace(',', '_').replace('/', '_')}__n{n}__s{seed}.json"
                Path(transcripts_dir, name).write_text(
                    json.dumps(_run_file(protocol, family, n, seed, seeds, policy, params, game, t)))
        rec.wall_time = time.perf_counter() - start
        records.append(rec)
    return records


def run_sweep(config: SweepConfig) -> list:
    config.validate()
    if config.transcripts_dir:
        os.makedirs(config.transcripts_dir, exist_ok=True)
    tasks = [(family, n, seed, list(config.protocols), config.params, config.transcripts_dir)
             for family, n, seed in config.instances()]
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            batches = list(pool.map(_run_instance, tasks))
    else:
        batches = [_run_instance(t) for t in tasks]
    records = sorted((r for b in batches for r in b), key=SweepRecord.sort_key)
    if config.output:
        write_records(records, config.output, config.format)
    return records


def summarize(records) -> dict:
    """Per-protocol max/mean eps, max bits, violation and error counts."""
    records = list(records)
    if not records:
        raise ValueError("nothing to summarize")
    table = {}
    for protocol in sorted({r.protocol for r in records}):
        rows = [r for r in records if r.protocol == protocol]
        ok = [r for r in rows if not r.error]
        ne = [r.eps_ne for r in ok]
        ws = [r.eps_wsne for r in ok]
        table[protocol] = {
            "runs": len(rows),
            "errors": len(rows) - len(ok),
            "max_eps_ne": max(ne, default=math.nan),
            "mean_eps_ne": sum(ne) / len(ne) if ne else math.nan,
            "max_eps_wsne": max(ws, default=math.nan),
            "mean_eps_wsne": sum(ws) / len(ws) if ws else math.nan,
            "max_bits": max((r.bits_total for r in ok), default=0),
            "violations": sum(is_violation(r) for r in ok),
        }
    return table


def format_summary(table: dict) -> str:
    head = f"{'protocol':<14}{'runs':>6}{'err':>5}{'viol':>6}{'max eps_ne':>12}{'mean eps_ne':>13}" \
           f"{'max eps_wsne':>14}{'max bits':>10}"
    lines = [head, "-" * len(head)]
    for p, s in table.items():
        lines.append(f"{p:<14}{s['runs']:>6}{s['errors']:>5}{s['violations']:>6}{s['max_eps_ne']:>12.4f}"
                     f"{s['mean_eps_ne']:>13.4f}{s['max_eps_wsne']:>14.4f}{s['max_bits']:>10}")
    return "\n".join(lines)


def _row(record: SweepRecord) -> dict:
    d = dataclasses.asdict(record)
    d["row_strategy"] = json.dumps(d["row_strategy"])
    d["col_strategy"] = json.dumps(d["col_strategy"])
    return d


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS)
    writer.writeheader()
    for r in records:
        writer.writerow(_row(r))
    return buf.getvalue()


def records_from_csv(text: str) -> list:
    types = {f.name: f.type for f in dataclasses.fields(SweepRecord)}
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        kw = {}
        for key, value in row.items():
            t = types[key]
            if key in ("row_strategy", "col_strategy"):
                kw[key] = json.loads(value)
            elif t == "int":
                kw[key] = int(value)
            elif t == "float":
                kw[key] = float(value)
            elif t == "bool":
                kw[key] = value == "True"
            else:
                kw[key] = value
        out.append(SweepRecord(**kw))
    return out


def write_records(records, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = records_to_csv(records)
    else:
        text = json.dumps([dataclasses.asdict(r) for r in records], indent=1)
    Path(path).write_text(text)


def read_records(path) -> list:
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        return [SweepRecord(**d) for d in json.loads(text)]
    return records_from_csv(text)


# --- game files ---------------------------------------------------------------

def game_to_dict(game: BimatrixGame) -> dict:
    return {"n": game.n, "R": game.R.tolist(), "C": game.C.tolist()}


def game_from_dict(d: dict, where: str = "game") -> BimatrixGame:
    if not isinstance(d, dict):
        raise GameFileError(f"{where}: expected an object with fields n, R, C")
    for key in ("n", "R", "C"):
        if key not in d:
            raise GameFileError(f"{where}: missing field {key!r}")
    n = d["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GameFileError(f"{where}: n must be a positive integer, got {n!r}")
    mats = {}
    for key in ("R", "C"):
        M = d[key]
        if not isinstance(M, list) or len(M) != n:
            raise GameFileError(f"{where}: {key} must have {n} rows")
        for i, row in enumerate(M):
            if not isinstance(row, list) or len(row) != n:
                got = len(row) if isinstance(row, list) else type(row).__name__
                raise GameFileError(f"{where}: {key} row {i} has {got} entries, expected {n}")
            for j, v in enumerate(row):
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise GameFileError(f"{where}: {key}[{i}][{j}] is not a number: {v!r}")
                if not 0.0 <= v <= 1.0:
                    raise GameFileError(f"{where}: {key}[{i}][{j}] = {v} lies outside [0, 1]")
        mats[key] = M
    return BimatrixGame(mats["R"], mats["C"])


def save_game(game: BimatrixGame, path) -> None:
    Path(path).write_text(json.dumps(game_to_dict(game)))


def load_game(path) -> BimatrixGame:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return game_from_dict(d, str(path))


def load_profile(path, n: int) -> StrategyProfile:
    d = json.loads(Path(path).read_text())
    try:
        profile = StrategyProfile(MixedStrategy(d["row"]), MixedStrategy(d["col"]))
    except KeyError as exc:
        raise GameFileError(f"{path}: missing field {exc.args[0]!r}") from None
    profile.check(n)
    return profile


def replay_run_file(path) -> bool:
    d = json.loads(Path(path).read_text())
    return replay(
        Transcript.from_dict(d["transcript"]),
        game_from_dict(d["game"], str(path)),
        d["protocol"],
        ChannelPolicy.from_dict(d["policy"]),
        tuple(d["seeds"]),
        ProtocolParams(**d["params"]),
    )


def recheck(record: SweepRecord, game: BimatrixGame) -> tuple[float, float]:
    rep = regret_report(game, record.profile())
    return rep.eps_ne, rep.eps_wsne
