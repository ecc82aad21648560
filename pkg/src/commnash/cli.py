"""Command line: ``commnash {run,gen,eval,replay}``.

Exit status is 1 when any run breaks its guarantee or errors, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .generators import FAMILIES
from .protocols import PROTOCOLS, ProtocolParams
from .game import regret_report


def _params(args) -> ProtocolParams:
    return ProtocolParams(alpha=args.alpha, delta=args.delta, resample_cap=args.resample_cap)


def cmd_run(args) -> int:
    if args.config:
        cfg = harness.SweepConfig.from_dict(json.loads(Path(args.config).read_text()))
        for key in ("output", "format", "transcripts_dir"):
            value = getattr(args, {"output": "out", "transcripts_dir": "transcripts"}.get(key, key))
            if value is not None:
                setattr(cfg, key, value)
    else:
        families = args.family or ["random"]
        if args.game:
            families = [f"file:path={args.game}"]
        cfg = harness.SweepConfig(
            protocols=args.protocol or list(PROTOCOLS),
            families=families,
            n_values=args.n or [8],
            base_seed=args.seed,
            count=args.count,
            params=_params(args),
            output=args.out,
            format=args.format or "csv",
            jobs=args.jobs,
            transcripts_dir=args.transcripts,
        )
    records = harness.run_sweep(cfg)
    table = harness.summarize(records)
    print(harness.format_summary(table))
    for r in records:
        if r.error:
            print(f"error: {r.protocol} {r.family} n={r.n} seed={r.seed}: {r.error}", file=sys.stderr)
    bad = sum(s["violations"] + s["errors"] for s in table.values())
    return 1 if bad else 0


def cmd_gen(args) -> int:
    game = harness.instance_game(args.family, args.n, args.seed)
    if args.out:
        harness.save_game(game, args.out)
    else:
        print(json.dumps(harness.game_to_dict(game)))
    return 0


def cmd_eval(args) -> int:
    game = harness.load_game(args.game)
    profile = harness.load_profile(args.profile, game.n)
    rep = regret_report(game, profile)
    print(json.dumps({"row_regret": rep.row_regret, "col_regret": rep.col_regret,
                      "eps_ne": rep.eps_ne, "eps_wsne": rep.eps_wsne}))
    return 0


def cmd_replay(args) -> int:
    failed = 0
    for path in args.files:
        ok = harness.replay_run_file(path)
        failed += not ok
        print(f"{'ok  ' if ok else 'FAIL'} {path}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="commnash", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a protocol x family sweep")
    run.add_argument("--config", help="JSON sweep config (flags below override its output settings)")
    run.add_argument("--protocol", action="append", choices=PROTOCOLS)
    run.add_argument("--family", action="append",
                     help=f"family family, e.g. random or indicator:ell=3 (families: {', '.join(FAMILIES)})")
    run.add_argument("--game", help="run on one game file instead of generated families")
    run.add_argument("--n", action="append", type=int)
    run.add_argument("--seed", type=int, default=0, help="base seed")
    run.add_argument("--count", type=int, default=10, help="instances per (family, n)")
    run.add_argument("--alpha", type=float)
    run.add_argument("--delta", type=float, default=0.05)
    run.add_argument("--resample-cap", type=int, default=100)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out")
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument("--transcripts", help="directory for per-run replay files")
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("gen", help="write a generated game to a game file")
    gen.add_argument("--family", default="random")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    ev = sub.add_parser("eval", help="regret report for a game file and a profile file")
    ev.add_argument("game")
    ev.add_argument("profile", help='JSON {"row": [...], "col": [...]}')
    ev.set_defaults(func=cmd_eval)

    rp = sub.add_parser("replay", help="re-run saved runs and check their transcripts")
    rp.add_argument("files", nargs="+")
    rp.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (harness.ConfigError, harness.GameFileError, ValueError, OSError) as exc:
        print(f"commnash: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
