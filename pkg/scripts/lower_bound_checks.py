"""Tabulate the regret inequalities behind the lower-bound constructions.

    python3 scripts/lower_bound_checks.py --trials 200

For each construction, reports the smallest observed margin (regret minus
the proven lower bound) over random row strategies; a negative margin
would be a counterexample.
"""

import argparse
import math

import numpy as np

from commnash.game import MixedStrategy, StrategyProfile, regret_report
from commnash.generators import (
    least_row_regret, worst_column, make_mn, make_padded_mn, make_wsne_oneway_game, mn_rows,
)


def row_strategy(rng, rows):
    if rng.random() < 0.5:
        return rng.dirichlet(np.ones(rows))
    x = np.zeros(rows)
    support = rng.choice(rows, size=int(rng.integers(1, min(rows, 8) + 1)), replace=False)
    x[support] = rng.dirichlet(np.ones(len(support)))
    return x


def column_strategy(rng, n, ell, p, others=(), p_others=0.0):
    y = np.zeros(n)
    rest = [j for j in range(n) if j != ell and j not in others]
    if others:
        y[list(others)] = p_others * rng.dirichlet(np.ones(len(others)))
    y[rest] = (1.0 - p - p_others) * rng.dirichlet(np.ones(len(rest)))
    y[ell] = p
    return y


def regret(M, x, y):
    pays = M @ y
    return pays.max() - x @ pays


def check_worst_column(rng, trials):
    print("worst column of M_n:  regret >= (1 - k/n)(p - (1 - p)/k)")
    for n in (9, 16, 25):
        mn = make_mn(n)
        for p in (0.3, 0.5, 0.8):
            bound = (1 - mn.k / n) * (p - (1 - p) / mn.k)
            margins = []
            for _ in range(trials):
                x = row_strategy(rng, mn.rows)
                m, _ = worst_column(mn, x)
                margins.append(regret(mn.matrix, x, column_strategy(rng, n, m, p)) - bound)
            print(f"  n={n:<3} p={p:<4} bound={bound:+.4f}  min margin={min(margins):+.4f}")


def padded(rng, trials):
    print("padded M_n' in a 20x20 game:  regret >= p - 1/k' + p_r p_c")
    n = 20
    for p in (0.3, 0.5):
        for p_r in (0.05, 0.1, 0.2):
            for p_c in (0.05, 0.1, 0.2):
                margins = []
                for t in range(trials):
                    n_host = (4, 5, 6)[t % 3]
                    rows = np.sort(rng.choice(n, mn_rows(n_host), replace=False))
                    cols = np.sort(rng.choice(n, n_host, replace=False))
                    game = make_padded_mn(n, rows, cols)
                    off_rows = [i for i in range(n) if i not in rows]
                    off_cols = [j for j in range(n) if j not in cols]
                    x = np.zeros(n)
                    x[rows] = (1 - p_r) * row_strategy(rng, len(rows))
                    x[off_rows] = p_r * rng.dirichlet(np.ones(len(off_rows)))
                    m, _ = worst_column(game.embedded, x[rows] / (1 - p_r))
                    y = column_strategy(rng, n, int(cols[m]), p, off_cols, p_c)
                    margins.append(regret(game.R, x, y) - (p - 1 / game.embedded.k + p_r * p_c))
                print(f"  p={p} p_r={p_r:<4} p_c={p_c:<4} min margin={min(margins):+.4f}")


def indicator_family(rng, trials):
    print("M_n against column indicators:  best row regret once column regret < 1/2 - 1/sqrt(n)")
    for n in (9, 16):
        mn = make_mn(n)
        q = 0.5 + 1 / math.sqrt(n)
        worst = []
        for _ in range(max(1, trials // 20)):
            x = row_strategy(rng, mn.rows)
            worst.append(max(least_row_regret(mn, x, ell, q) for ell in range(n)))
        print(f"  n={n:<3} smallest forced row regret={min(worst):.4f}  (1/2 - 1/sqrt(n) = {0.5 - 1 / math.sqrt(n):.4f})")


def one_way_wsne(rng, trials):
    games = [make_wsne_oneway_game(j) for j in (0, 1)]
    worst = []
    for _ in range(trials):
        x = MixedStrategy(rng.dirichlet(np.ones(2)))
        worst.append(max(regret_report(g, StrategyProfile(x, MixedStrategy.pure(2, j))).eps_wsne
                         for j, g in enumerate(games)))
    print(f"2x2 one-way WSNE game:  max_j eps_wsne ranges over [{min(worst)}, {max(worst)}]")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    check_worst_column(rng, args.trials)
    padded(rng, args.trials)
    indicator_family(rng, args.trials)
    one_way_wsne(rng, args.trials)


if __name__ == "__main__":
    main()
