"""Sweep all four protocols over random games and every generator family.

    python3 scripts/sweep_protocols.py --count 50 --out results/sweep.csv

Prints the per-protocol summary and the case mix of the polylog protocols.
"""

import argparse
import collections
from pathlib import Path

from commnash.harness import SweepConfig, format_summary, run_sweep, summarize, write_records
from commnash.protocols import PROTOCOLS, ProtocolParams


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=20, help="seeds per (family, n)")
    ap.add_argument("--n", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/sweep.csv")
    args = ap.parse_args()

    params = ProtocolParams(delta=args.delta)
    configs = [
        SweepConfig(list(PROTOCOLS), ["random", "indicator", "padded-mn"], args.n,
                    count=args.count, params=params, jobs=args.jobs),
        SweepConfig(list(PROTOCOLS), ["wsne2x2:n=2"], [2], count=2, params=params),
        SweepConfig(list(PROTOCOLS), ["mn"], [4, 5, 6], count=args.count, params=params, jobs=args.jobs),
    ]
    records = sorted((r for cfg in configs for r in run_sweep(cfg)), key=lambda r: r.sort_key())

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_records(records, args.out, "json" if args.out.endswith(".json") else "csv")
    print(format_summary(summarize(records)))
    print()
    for protocol in ("polylog-ne", "polylog-wsne"):
        cases = collections.Counter(r.case_label for r in records if r.protocol == protocol and not r.error)
        print(f"{protocol:<14}" + "  ".join(f"{c}={k}" for c, k in sorted(cases.items())))
    print(f"\n{len(records)} records written to {args.out}")


if __name__ == "__main__":
    main()
