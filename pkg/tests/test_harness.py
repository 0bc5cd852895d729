import csv
import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.stats.proportion import proportion_confint

from ipsim.engines import ACCEPT, CUTOFF, REJECT, run_trial
from ipsim.harness import (
    CSV_COLUMNS, SimulationStats, monte_carlo, stats_to_csv, wilson_interval,
)
from ipsim.provers import constant_prover, echo_public_prover
from ipsim.zoo import coin_verifier, public_verifier, self_loop_verifier

SILENT = constant_prover("_")


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5000), st.floats(0, 1), st.sampled_from([0.9, 0.95, 0.99, 0.999]))
def test_wilson_matches_statsmodels(n, frac, conf):
    k = round(frac * n)
    lo, hi = wilson_interval(k, n, conf)
    ref_lo, ref_hi = proportion_confint(k, n, alpha=1 - conf, method="wilson")
    assert lo == pytest.approx(ref_lo, abs=1e-9)
    assert hi == pytest.approx(ref_hi, abs=1e-9)
    assert lo <= k / n <= hi


def test_wilson_edges_and_errors():
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0
    for bad in ((-1, 3), (4, 3), (0, 0)):
        with pytest.raises(ValueError):
            wilson_interval(*bad)


def test_stats_moments_skip_cutoffs():
    s = SimulationStats()
    for v, t in ((ACCEPT, 2), (REJECT, 4), (CUTOFF, 100)):
        s.add(v, t)
    row = s.row()
    assert (row["trials"], row["cutoff"], row["runtime_mean"], row["runtime_var"]) == (3, 1, 3.0, 2.0)
    assert row["runtime_max"] == 4
    with pytest.raises(ValueError):
        s.add("maybe", 1)


def test_empty_moments_are_nan():
    s = SimulationStats()
    s.add(CUTOFF, 5)
    assert math.isnan(s.row()["runtime_mean"])


def test_error_direction():
    s = SimulationStats()
    for v in (ACCEPT, ACCEPT, REJECT, CUTOFF):
        s.add(v, 1)
    assert s.error(True)[0] == 0.5 and s.error(False)[0] == 0.5
    assert s.accept_rate == 0.5


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([ACCEPT, REJECT, CUTOFF]), st.integers(0, 50)), max_size=20),
       st.lists(st.tuples(st.sampled_from([ACCEPT, REJECT, CUTOFF]), st.integers(0, 50)), max_size=20))
def test_merge_is_commutative_and_additive(xs, ys):
    a, b, both = SimulationStats(), SimulationStats(), SimulationStats()
    for v, t in xs:
        a.add(v, t)
        both.add(v, t)
    for v, t in ys:
        b.add(v, t)
        both.add(v, t)
    assert a.merge(b) == b.merge(a) == both


def test_json_round_trip():
    s = SimulationStats(label="x")
    s.add(ACCEPT, 3, 1, 2)
    assert SimulationStats.from_json(s.to_json()) == s


def test_csv_has_fixed_columns():
    s = SimulationStats(label="a")
    s.add(ACCEPT, 1)
    rows = list(csv.DictReader(io.StringIO(stats_to_csv([s, s]))))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 2


def test_monte_carlo_is_deterministic_and_prefix_stable():
    v = coin_verifier()
    a = monte_carlo(v, SILENT, "0", 500, 10, seed=4)
    b = monte_carlo(v, SILENT, "0", 500, 10, seed=4)
    assert a == b
    head = monte_carlo(v, SILENT, "0", 200, 10, seed=4, fast=False)
    tail = SimulationStats()
    for i in range(200):
        tail.add_outcome(run_trial(v, SILENT, "0", 4, 10, trial=i, record=False))
    assert (head.accept, head.steps_sum) == (tail.accept, tail.steps_sum)


def test_fast_and_reference_paths_agree():
    v = coin_verifier()
    fast = monte_carlo(v, SILENT, "01", 300, 10, seed=2, fast=True)
    slow = monte_carlo(v, SILENT, "01", 300, 10, seed=2, fast=False)
    assert fast == slow


def test_parallel_equals_sequential():
    v = public_verifier()
    p = echo_public_prover({0: "0", 1: "1"}, "_")
    seq = monte_carlo(v, p, "1", 400, 20, seed=8, workers=1)
    par = monte_carlo(v, p, "1", 400, 20, seed=8, workers=3)
    assert seq == par


def test_self_loop_counts_every_cutoff():
    s = monte_carlo(self_loop_verifier(), SILENT, "0", 50, 30, seed=0)
    assert s.cutoff == s.trials == 50


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        monte_carlo(coin_verifier(), SILENT, "", 0, 10, seed=0)
