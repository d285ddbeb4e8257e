import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oco_frugal.adversary import (LISTED_INTERVAL_RATIOS, adversary_respond, common_observation,
                                  exact_min_max_ratio, interval_table, make_game, play_game,
                                  stale_lb_game, sweep_first_action)
from oco_frugal.algorithm import aobd_step, delta_fresh
from oco_frugal.errors import DomainError, ParameterError
from oco_frugal.offline import opt_single_step


def _closed_form_opts(g, M):
    return (3 * g / (2 * M) - 1 / (2 * M), 2 * g / M - 1 / (2 * M), 5 * g / (2 * M) - 1 / (2 * M))


def test_game_boundaries():
    inst = make_game(10.0)
    g, M = inst.grad_mag, inst.M
    assert g == 4.0
    assert inst.boundaries == pytest.approx((g / (2 * M), 3 * g / (2 * M), 13 * g / (6 * M)))
    assert 0 < inst.boundaries[0] < inst.boundaries[1] < inst.boundaries[2] < 1


def test_respond_examples():
    inst = make_game(10.0)
    g, M = inst.grad_mag, inst.M
    assert adversary_respond(0.0, inst).name == "g1"
    assert adversary_respond(g / M, inst).name == "g2"
    assert adversary_respond(1.0, inst).name == "g1"
    assert adversary_respond(2 * g / M, inst).name == "g3"
    # edges belong to the lower interval
    assert adversary_respond(inst.boundaries[0], inst).name == "g1"
    assert adversary_respond(inst.boundaries[1], inst).name == "g2"
    assert adversary_respond(inst.boundaries[2], inst).name == "g3"
    with pytest.raises(DomainError):
        adversary_respond(1.5, inst)


@pytest.mark.parametrize("M", [10.0, 25.0, 50.0, 200.0])
def test_opt_costs_match_closed_forms(M):
    inst = make_game(M)
    for got, want in zip(inst.opt_costs, _closed_form_opts(inst.grad_mag, M)):
        assert got == pytest.approx(want, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(3.01, 40.0), st.floats(1.0, 4.0))
def test_indistinguishable_at_start(g, scale):
    M = 2.5 * g * scale
    inst = make_game(M, g)
    vals = [f.value(0.0) for f in inst.functions]
    grads = [f.grad(0.0) for f in inst.functions]
    assert max(vals) - min(vals) <= 1e-12
    assert max(grads) - min(grads) <= 1e-12
    obs = common_observation(inst)
    assert obs.f_avl == pytest.approx(g * g / M) and obs.grad_avl == pytest.approx(-g)


def test_play_game_aobd_m50():
    M = 50.0
    out = play_game(lambda obs: aobd_step(obs, 0.0, delta_fresh(M)), M, 20.0)
    assert out.ratio >= 20.0 / 45
    assert out.opt_cost == pytest.approx(opt_single_step(make_game(M, 20.0).functions[
        int(out.chosen[1]) - 1], 0.0)[0])
    assert out.ratio == pytest.approx(out.alg_cost / out.opt_cost)


def test_play_game_jump_to_g1_minimizer_is_punished():
    M = 10.0
    inst = make_game(M)
    out = play_game(lambda obs: 1.5 * inst.grad_mag / M, M)
    assert out.chosen in ("g2", "g3")


def test_play_game_clamps():
    out = play_game(lambda obs: 1.7, 10.0)
    assert out.clamped and out.x1 == 1.0


def test_feasibility_boundary():
    inst = make_game(10.0, 4.0)
    assert inst.functions[2].x_star == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        make_game(10.0, 4.5)


def _oracle_min_max(M, n=200001):
    # direct evaluation with closed-form OPT values, independent of the sweep code
    inst = make_game(M)
    g = inst.grad_mag
    opts = _closed_form_opts(g, M)
    xs = np.linspace(0, 1, n)
    b1, b2, b3 = g / (2 * M), 3 * g / (2 * M), 13 * g / (6 * M)
    which = np.where(xs <= b1, 0, np.where(xs <= b2, 1, np.where(xs <= b3, 2, 0)))
    ratio = np.empty(n)
    for k in range(3):
        m = which == k
        ratio[m] = (inst.functions[k].values(xs[m]) + xs[m]) / opts[k]
    return ratio.min()


@pytest.mark.parametrize("M", [10.0, 25.0, 50.0])
def test_sweep_against_oracle_and_exact(M):
    inst = make_game(M)
    r, x = sweep_first_action(inst, 10001)
    exact, xe = exact_min_max_ratio(inst)
    assert exact <= r <= exact + 1e-3
    oracle = _oracle_min_max(M)
    assert exact - 1e-12 <= oracle <= exact + 5e-5
    assert r >= 2 * M / 135
    # the minimum sits in I3 (its right edge belongs to I3)
    assert inst.boundaries[1] < xe <= inst.boundaries[2]


@pytest.mark.parametrize("M", [10.0, 25.0, 50.0])
def test_interval_table_against_listed(M):
    # listed per-interval values are lower estimates; the exact infima sit at or above them
    inst = make_game(M)
    for row, listed in zip(interval_table(inst), LISTED_INTERVAL_RATIOS):
        assert row["listed"] == pytest.approx(listed * inst.grad_mag)
        assert row["ratio"] >= row["listed"]


def test_sweep_grid_precondition():
    with pytest.raises(ParameterError):
        sweep_first_action(make_game(10.0), 50)


def test_stale_game_examples():
    g = stale_lb_game(0.0, 30.0)
    assert g.chosen == "h2" and g.ratio == pytest.approx(30.0) and g.opt_cost == pytest.approx(1.0)
    g = stale_lb_game(0.5, 30.0)
    assert g.chosen == "h1" and g.opt_cost == 0.0 and math.isinf(g.ratio)
    assert stale_lb_game(0.0, 1.0).ratio >= 1.0


@pytest.mark.parametrize("L", [1.0, 5.0, 30.0, 200.0])
def test_stale_game_ratio_at_least_L(L):
    assert all(stale_lb_game(x, L).ratio >= L - 1e-12 for x in np.linspace(0, 1, 1001))
