from fractions import Fraction
from statistics import mean

import pytest

from ipsim.coins import HashCoins, ListCoins
from ipsim.core import validate
from ipsim.engines import ACCEPT, run_trial
from ipsim.provers import constant_prover
from ipsim.transforms.clock import ClockParams, build_poly_clock, walk_end_marks
from ipsim.transforms.tick import (
    RESET, RUNNING, TIMEOUT, TickParams, TickState, expected_ticks, simulate_ticks, tick,
    ticks_to_timeout,
)

SILENT = constant_prover("_")


def test_clock_params_validation():
    with pytest.raises(ValueError):
        ClockParams(0, 1, 3)
    with pytest.raises(ValueError):
        ClockParams(2, 1, 5, eps_premature=0.2)
    assert ClockParams(2, 1, 6, eps_premature=0.2).f(3) == 9


@pytest.mark.parametrize("t, c", [(1, 1), (1, 3), (2, 1), (3, 2)])
def test_clock_is_a_valid_private_coin_machine(t, c):
    m = build_poly_clock(ClockParams(t, c, 4))
    assert validate(m) == []
    assert not m.pub and not m.com and m.space == 0


@pytest.mark.parametrize("n", range(0, 6))
def test_short_inputs_stall_for_f_of_n(n):
    p = ClockParams(1, 2, 6)
    out = run_trial(build_poly_clock(p), SILENT, "0" * n, 1, cutoff=10 ** 5)
    assert out.verdict == ACCEPT
    assert out.steps == n + 2 + p.f(n)


@pytest.mark.parametrize("c", [1, 2, 3])
def test_deterministic_sweep_runtime(c):
    p = ClockParams(1, c, 5)
    m = build_poly_clock(p)
    for n in range(5, 12):
        assert run_trial(m, SILENT, "1" * n, 0, cutoff=10 ** 5).steps == p.sweep_runtime(n)


def test_walk_end_marks_cover_both_endmarkers():
    marks = walk_end_marks(ClockParams(3, 1, 2))
    assert len(marks) == 12 and set(marks.values()) == {0, 1}


def _tick_mean_by_linear_system(p):
    """Expected calls from the two timer states, solved as a linear system."""
    q = Fraction(1, 2 ** p)
    # E_F = 1 + 1/2 (1-q) E_F + 1/2 (q E_F + (1-q) E_T)
    # E_T = 1 + q E_F + (1-q) E_T
    a11, a12 = 1 - Fraction(1, 2) * (1 - q) - Fraction(1, 2) * q, -Fraction(1, 2) * (1 - q)
    a21, a22 = -q, q
    det = a11 * a22 - a12 * a21
    return (a22 - a12) / det


@pytest.mark.parametrize("p", range(1, 7))
def test_expected_ticks_closed_form(p):
    assert expected_ticks(p) == _tick_mean_by_linear_system(p)


@pytest.mark.parametrize("p", [1, 2])
def test_expected_ticks_matches_simulation(p):
    runs = simulate_ticks(p, 11, 20000)
    assert abs(mean(runs) - expected_ticks(p)) < 0.05 * expected_ticks(p)


def test_tick_outcomes():
    state = TickState(2)
    assert tick(state, ListCoins([1, 1, 1])) == TIMEOUT
    assert tick(state, ListCoins([0, 1, 0])) == RUNNING and state.T
    assert tick(state, ListCoins([1, 1, 1])) == RESET and not state.T
    assert state.coins_used == 9


def test_ticks_to_timeout_respects_limit():
    assert ticks_to_timeout(30, HashCoins(0, 0), limit=7) == 7


def test_tick_params():
    assert TickParams(2, 1).p(5) == 10
    with pytest.raises(ValueError):
        TickParams(0, 0).p(3)
