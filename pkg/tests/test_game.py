import numpy as np
import pytest
from hypothesis import given, strategies as st

from commnash.game import (
    BimatrixGame, DimensionError, MixedStrategy, Role, StrategyProfile,
    best_response, payoff, regret_report, total_variation,
)
from commnash.generators import make_column_indicator
from conftest import games_with_profile, matrices, prob_vectors
from oracles import brute_regrets, is_nash

PENNIES = BimatrixGame([[1, 0], [0, 1]], [[0, 1], [1, 0]])


def profile(x, y):
    return StrategyProfile(MixedStrategy(x), MixedStrategy(y))


def test_payoff_constant_matrix():
    g = BimatrixGame(np.full((3, 3), 0.5), np.zeros((3, 3)))
    assert payoff(g, profile([0.2, 0.3, 0.5], [1, 0, 0]), Role.ROW) == pytest.approx(0.5)


def test_payoff_pure_lookup():
    g = BimatrixGame(np.eye(2), np.eye(2))
    assert payoff(g, profile([1, 0], [1, 0]), Role.ROW) == 1.0


def test_payoff_uniform_identity():
    # 1/4 * (1 + 0 + 0 + 1)
    g = BimatrixGame(np.eye(2), np.eye(2))
    assert payoff(g, profile([0.5, 0.5], [0.5, 0.5]), Role.ROW) == 0.5


def test_payoff_dimension_mismatch():
    with pytest.raises(DimensionError):
        payoff(PENNIES, profile([1, 0, 0], [1, 0]), Role.ROW)


def test_best_response_identity():
    assert best_response(np.eye(2), MixedStrategy([1, 0]), Role.ROW) == (0, 1.0)


def test_best_response_tie_goes_low():
    # rows give 0.5*0.2 + 0.5*0.8 = 0.5 and 0.5*0.6 + 0.5*0.4 = 0.5
    idx, val = best_response([[0.2, 0.8], [0.6, 0.4]], MixedStrategy([0.5, 0.5]), Role.ROW)
    assert idx == 0
    assert val == pytest.approx(0.5)


def test_best_response_column_indicator():
    C = make_column_indicator(3, 1)
    assert best_response(C, MixedStrategy([0.2, 0.5, 0.3]), Role.COL) == (1, 1.0)


def test_regret_at_equilibrium():
    rep = regret_report(PENNIES, profile([0.5, 0.5], [0.5, 0.5]))
    assert rep.eps_ne == 0.0
    assert rep.eps_wsne == 0.0


def test_regret_pure_profile():
    rep = regret_report(PENNIES, profile([1, 0], [1, 0]))
    assert (rep.row_regret, rep.col_regret, rep.eps_ne, rep.eps_wsne) == (0.0, 1.0, 1.0, 1.0)


def test_regret_mutual_best_response_is_zero():
    R = np.array([[0.9, 0.1], [0.2, 0.3]])
    C = np.array([[0.8, 0.4], [0.1, 0.6]])
    rep = regret_report(BimatrixGame(R, C), profile([1, 0], [1, 0]))
    assert rep.eps_ne == 0.0


def test_total_variation_examples():
    e1, e2 = MixedStrategy([1, 0]), MixedStrategy([0, 1])
    assert total_variation(e1, e1) == 0.0
    assert total_variation(e1, e2) == 1.0
    assert total_variation(MixedStrategy([0.5, 0.5]), e1) == 0.5
    with pytest.raises(DimensionError):
        total_variation(e1, MixedStrategy([1, 0, 0]))


def test_game_validation():
    with pytest.raises(ValueError):
        BimatrixGame([[1.5, 0], [0, 1]], np.eye(2))
    with pytest.raises(DimensionError):
        BimatrixGame(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(DimensionError):
        BimatrixGame(np.eye(2), np.eye(3))


def test_game_is_immutable():
    g = BimatrixGame(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        g.R[0, 0] = 0.3


def test_strategy_normalises_and_rejects_negative():
    assert np.allclose(MixedStrategy([2, 2]).probs, [0.5, 0.5])
    with pytest.raises(ValueError):
        MixedStrategy([1.2, -0.2])


@given(games_with_profile())
def test_regret_matches_brute_force(case):
    R, C, x, y = case
    rep = regret_report(BimatrixGame(R, C), profile(x, y))
    r, c, ws = brute_regrets(R.tolist(), C.tolist(), list(x), list(y))
    assert rep.row_regret == pytest.approx(r, abs=1e-12)
    assert rep.col_regret == pytest.approx(c, abs=1e-12)
    assert rep.eps_wsne >= ws - 1e-12
    assert rep.eps_ne == max(rep.row_regret, rep.col_regret)


@given(games_with_profile())
def test_regret_ordering(case):
    R, C, x, y = case
    rep = regret_report(BimatrixGame(R, C), profile(x, y))
    assert 0.0 <= rep.eps_ne <= rep.eps_wsne + 1e-12 <= 1.0 + 1e-12


@given(games_with_profile())
def test_zero_regret_iff_nash(case):
    R, C, x, y = case
    rep = regret_report(BimatrixGame(R, C), profile(x, y))
    assert (rep.eps_ne <= 1e-9) == is_nash(R.tolist(), C.tolist(), list(x), list(y))


@given(st.integers(1, 32).flatmap(lambda n: st.tuples(matrices(n), prob_vectors(n))))
def test_best_response_dominates_every_pure_strategy(case):
    M, q = case
    for who in (Role.ROW, Role.COL):
        idx, val = best_response(M, q, who)
        pure = M @ q if who is Role.ROW else q @ M
        assert all(val >= v for v in pure)
        assert pure[idx] == val


@given(st.integers(1, 10).flatmap(lambda n: st.tuples(prob_vectors(n), prob_vectors(n), prob_vectors(n))))
def test_total_variation_is_a_metric(case):
    a, b, c = (MixedStrategy(v) for v in case)
    assert total_variation(a, b) == pytest.approx(total_variation(b, a))
    assert total_variation(a, c) <= total_variation(a, b) + total_variation(b, c) + 1e-12
    assert total_variation(a, a) == 0.0
    if not np.array_equal(a.probs, b.probs):
        assert total_variation(a, b) > 0.0
