"""The thirteen end-to-end acceptance checks, one PASS/FAIL line each.

Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import math
import random
import sys
from contextlib import contextmanager
from fractions import Fraction
from itertools import product

import pytest

from ipsim.coins import ListCoins
from ipsim.core import count_configurations, input_tape
from ipsim.engines import ACCEPT, CUTOFF, REJECT, exact_acceptance, run_trial, tafa_accepts
from ipsim.fastpfa import run_fast
from ipsim.harness import wilson_interval
from ipsim.provers import constant_prover, echo_public_prover, optimal_bounded_prover
from ipsim.transforms.clock import ClockParams, build_poly_clock, walk_end_marks
from ipsim.transforms.tick import expected_ticks, simulate_ticks
from ipsim.zoo import all_words

_printer = None


@pytest.fixture(autouse=True)
def _unbuffered(capsys):
    global _printer
    _printer = capsys
    yield
    _printer = None


@contextmanager
def criterion(number: int, title: str):
    def say(line):
        if _printer is None:
            print(line)
        else:
            with _printer.disabled():
                print(line)

    try:
        yield
    except BaseException as exc:
        say(f"FAIL criterion {number:2d}: {title} :: {type(exc).__name__}: {exc}")
        raise
    say(f"PASS criterion {number:2d}: {title}")


# 1 -----------------------------------------------------------------------

def test_criterion_01_clock_determinism():
    with criterion(1, "t=1 clock halts in exactly 2*n0 + c*n + 2 steps"):
        for c in (1, 2):
            params = ClockParams(1, c, 8)
            clock = build_poly_clock(params)
            assert not clock.pri
            for n in range(8, 41):
                words = ["0" * n, "1" * n, "".join(random.Random(n).choice("01") for _ in range(n))]
                for w in words:
                    batch = run_fast(clock, w, seed=n * 31 + c, trials=5, cutoff=10_000)
                    assert set(batch.verdicts.tolist()) == {0}
                    assert set(batch.steps.tolist()) == {params.sweep_runtime(n)}, (c, n, w)


# 2 -----------------------------------------------------------------------

def test_criterion_02_gamblers_ruin_marginal():
    with criterion(2, "random-walk right-end frequency inside 99.9% Wilson interval of 1/(n+1)"):
        for n in (3, 7):
            params = ClockParams(2, 1, n)
            clock = build_poly_clock(params)
            marks = walk_end_marks(params)
            left = right = 0
            trial0 = 0
            while left + right < 100_000:
                batch = run_fast(clock, "0" * n, seed=2024 + n, trials=2000, cutoff=10 ** 7,
                                 trial0=trial0, marks=marks)
                assert not (batch.verdicts == 2).any()
                left += int(batch.counts[:, 0].sum())
                right += int(batch.counts[:, 1].sum())
                trial0 += 2000
            lo, hi = wilson_interval(right, left + right, 0.999)
            assert lo <= 1 / (n + 1) <= hi, (n, right, left + right, lo, hi)


# 3 -----------------------------------------------------------------------

def test_criterion_03_clock_expectation():
    with criterion(3, "t=2 clock mean runtime within 5% of t(n+1)^t(cn+2)+2n0+1"):
        params = ClockParams(2, 1, 4)
        batch = run_fast(build_poly_clock(params), "0000", seed=3, trials=100_000, cutoff=10 ** 7)
        assert not (batch.verdicts == 2).any()
        mean = float(batch.steps.mean())
        target = params.expected_runtime(4)
        assert abs(mean - target) <= 0.05 * target, (mean, target)


# 4 -----------------------------------------------------------------------

def test_criterion_04_premature_halt_bound():
    with criterion(4, "fraction halting before f(n)=n^2 is below eps_premature"):
        params = ClockParams(2, 1, 10, eps_premature=0.11)
        clock = build_poly_clock(params)
        for n in (10, 16):
            batch = run_fast(clock, "0" * n, seed=4 + n, trials=100_000, cutoff=10 ** 7)
            assert not (batch.verdicts == 2).any()
            early = float((batch.steps < params.f(n)).mean())
            assert early < params.eps_premature, (n, early)


# 5 -----------------------------------------------------------------------

def test_criterion_05_tick_lower_bound():
    with criterion(5, "TICK mean ticks-to-timeout at p=2 is at least 0.9 * 64"):
        runs = simulate_ticks(2, seed=5, runs=10_000)
        mean = sum(runs) / len(runs)
        assert mean >= 0.9 * 64, f"mean {mean:.2f}; exact expectation is {expected_ticks(2)}"


# 6 -----------------------------------------------------------------------

def _direct_tm(tm, w):
    out = run_trial(tm, constant_prover("_"), w, 0, cutoff=10 ** 6, record=False)
    assert out.verdict != CUTOFF
    return out.verdict == ACCEPT


def test_criterion_06_hartmanis_equivalence():
    from ipsim.transforms.hartmanis import hartmanis_encode
    from ipsim.zoo import anbn_counter_tm, parity_tm

    with criterion(6, "(c+5)-head encoding agrees with the TM, within the overhead bound, "
                      "auxiliaries at 0"):
        # the counter TM has four work symbols, so it needs c=2 tracks (7 heads);
        # the parity TM has two and runs on the 6-head (c=1) encoding
        for tm, c in ((anbn_counter_tm(), 2), (parity_tm(), 1)):
            enc = hartmanis_encode(tm, c)
            assert enc.heads == c + 5
            for w in all_words("01", 14):
                res = enc.run(w)
                assert res.accepted == _direct_tm(tm, w), w
                assert res.steps <= res.bound, (w, res.steps, res.bound)
                assert res.aux_at_zero, w


# 7 -----------------------------------------------------------------------

def test_criterion_07_tafa_matches_optimal_prover():
    from ipsim.transforms.tafa import constpub_to_2afa
    from ipsim.zoo import even_ones_verifier, last_symbol_verifier

    with criterion(7, "2AFA accepts iff the optimal prover wins with probability > 1/2"):
        for v, r in ((last_symbol_verifier(), 1), (even_ones_verifier(), 2)):
            m = constpub_to_2afa(v, r)
            for w in all_words("01", 5):
                _, value = optimal_bounded_prover(v, w, horizon=30)
                assert tafa_accepts(m, w) == (value > Fraction(1, 2)), (w, value)


# 8 -----------------------------------------------------------------------

def _brute_maj(r):
    seqs = ["".join(p) for k in range(r + 1) for p in product("01", repeat=k)]
    out = set()
    for mask in range(1 << len(seqs)):
        S = frozenset(s for i, s in enumerate(seqs) if mask >> i & 1)
        if any(a != b and b.startswith(a) for a in S for b in S):
            continue
        if sum(Fraction(1, 2 ** len(x)) for x in S) > Fraction(1, 2):
            out.add(S)
    return out


def test_criterion_08_maj_enumeration():
    from ipsim.transforms.tafa import enumerate_maj

    with criterion(8, "Maj_0, Maj_1 exact; Maj_2 equals brute force"):
        assert enumerate_maj(0) == {frozenset({""})}
        assert enumerate_maj(1) == {frozenset({""}), frozenset({"0", "1"})}
        assert enumerate_maj(2) == _brute_maj(2)


# 9 -----------------------------------------------------------------------

def _coin_lists(k):
    return [list(bits) for bits in product((0, 1), repeat=k)]


def test_criterion_09_coin_privatization():
    from ipsim.transforms.privatize import privatize_coins, translate_prover
    from ipsim.zoo import mixed_verifier, public_verifier, two_public_verifier

    cases = [
        (public_verifier(), echo_public_prover({0: "0", 1: "1"}, "_"), ["", "0", "01", "10"]),
        (mixed_verifier(), echo_public_prover({0: "a", 1: "b"}, "_"), ["", "0", "00"]),
        (two_public_verifier(), echo_public_prover({0: "0", 1: "1"}, "_"), ["", "1", "01"]),
        (two_public_verifier(), constant_prover("1"), ["0", "11"]),
    ]
    with criterion(9, "privatize keeps exact acceptance, at most doubles traces, one private "
                      "flip per public flip"):
        for v1, p1, words in cases:
            v2 = privatize_coins(v1)
            assert not v2.pub
            p2 = translate_prover(p1)
            for w in words:
                assert exact_acceptance(v1, p1, w, 200) == exact_acceptance(v2, p2, w, 400), w
                for bits in _coin_lists(6):
                    a = run_trial(v1, p1, w, ListCoins(bits), cutoff=200)
                    b = run_trial(v2, p2, w, ListCoins(bits), cutoff=400)
                    assert a.verdict == b.verdict != CUTOFF
                    assert b.steps <= 2 * a.steps
                    assert b.public_coins_used == 0
                    assert b.private_coins_used - a.private_coins_used == a.public_coins_used


# 10 ----------------------------------------------------------------------

def test_criterion_10_v3_behaviour():
    from ipsim.transforms.v3 import (
        TIMER, MultiheadVerifier, V3Params, build_v3, honest_v3_prover, looping_v3_prover,
        lying_v3_prover,
    )
    from ipsim.zoo import anbn_two_head

    with criterion(10, "V3 mode marginals, completeness bound, head-lying and loop-inducing provers"):
        v2 = MultiheadVerifier.from_knfa(anbn_two_head())
        clock = ClockParams(1, 2, 4, eps_premature=0.3)
        params = V3Params(k=2, r=2, m=3, clock=clock)
        v3 = build_v3(v2, params)
        member, nonmember = "000111", "00111"
        assert v2.run(member)[0] == ACCEPT and v2.run(nonmember)[0] == REJECT
        # the t=1 timer is deterministic; it must outlast the honest simulation
        assert clock.sweep_runtime(len(member)) > v2.run(member)[1]

        honest = honest_v3_prover(v2)
        n_h = 40_000
        accepted, modes = 0, []
        for i in range(n_h):
            o = v3.run_trial(honest, member, 10, cutoff=1000, trial=i)
            accepted += o.verdict == ACCEPT
            modes += o.info["modes"]
        assert len(modes) >= 100_000
        for name, p in (("H1", params.p), ("H2", params.p), (TIMER, params.p_timer)):
            lo, hi = wilson_interval(modes.count(name), len(modes), 0.999)
            assert lo <= p <= hi, (name, modes.count(name) / len(modes))
        bound = params.completeness_bound(clock.eps_premature)
        slack = 4 * math.sqrt(bound * (1 - bound) / n_h)
        assert accepted / n_h >= bound - slack, (accepted / n_h, bound)

        liar = lying_v3_prover(v2, head=1, replacement=">", at_step=6)
        n_l = 30_000
        first_round = rejected = rounds = undetected_h = 0
        for i in range(n_l):
            o = v3.run_trial(liar, nonmember, 11, cutoff=1000, trial=i)
            assert o.verdict != CUTOFF
            rejected += o.verdict == REJECT
            first_round += o.verdict == REJECT and o.info["round"] == 0
            ms = o.info["modes"]
            passed = ms if o.verdict == ACCEPT else ms[:-1]
            rounds += len(ms)
            undetected_h += sum(m != TIMER for m in passed)
        p = params.p
        assert first_round / n_l >= p - 4 * math.sqrt(p * (1 - p) / n_l)
        overall = 1 - (1 - p) ** params.m
        assert rejected / n_l >= overall - 4 * math.sqrt(overall * (1 - overall) / n_l)
        eps_l = (params.k - 1) * p
        assert undetected_h / rounds <= eps_l + 4 * math.sqrt(eps_l * (1 - eps_l) / rounds)
        forced = build_v3(v2, params, force_mode="H2")
        for i in range(200):
            o = forced.run_trial(liar, nonmember, 12, cutoff=1000, trial=i)
            assert o.verdict == REJECT and o.info["round"] == 0
            assert o.info["reason"] == "claim mismatch"

        looper = looping_v3_prover(v2, head=1, symbol="0")
        n_c = 30_000
        cut_modes = set()
        for i in range(n_c):
            o = v3.run_trial(looper, member, 13, cutoff=300, trial=i)
            if o.verdict == CUTOFF:
                cut_modes.add(o.info["cutoff_mode"])
        assert cut_modes and TIMER not in cut_modes, cut_modes
        assert n_h + n_l + n_c == 100_000


# 11 ----------------------------------------------------------------------

def test_criterion_11_v2_behaviour():
    from ipsim.transforms.v2 import LOOPING, V2Params, build_v2, faithful_prover, split_prover
    from ipsim.zoo import coin_or_loop_verifier, guess_coin_verifier

    with criterion(11, "V2 matches the source verifier, catches split answers, labels loops "
                       "at f(n), segments within g(n)"):
        v1 = guess_coin_verifier()
        p1 = constant_prover("1")
        w = "01"
        exact, _, _ = exact_acceptance(v1, p1, w, 100)
        params = V2Params.for_input(v1, len(w), r=1)
        v2 = build_v2(v1, params)
        honest = faithful_prover(p1)
        n = 100_000
        acc = max_segments = 0
        for i in range(n):
            o = v2.run_trial(honest, w, 21, trial=i)
            acc += o.verdict == ACCEPT
            max_segments = max(max_segments, *o.info["segments"])
        se = math.sqrt(float(exact) * (1 - float(exact)) / n)
        assert abs(acc / n - float(exact)) <= 4 * se, (acc / n, exact)
        assert max_segments <= params.g_n

        cheat = split_prover({0: "0", 1: "1"})
        assert all(v2.run_trial(cheat, w, 22, trial=i).verdict == REJECT for i in range(1000))

        loop = coin_or_loop_verifier()
        lp = V2Params.for_input(loop, len(w), r=1)
        o = build_v2(loop, lp).run_trial(constant_prover("_"), w, 23)
        assert o.info["labels"][0] == LOOPING
        assert o.info["loop_at"] == {0: lp.f_n} == {0: count_configurations(loop, len(w), 0)}
        assert max(o.info["segments"]) <= lp.g_n


# 12 ----------------------------------------------------------------------

def naive_tafa_accepts(m, w) -> bool:
    """Iterate the winning-set operator from the empty set until it stops growing."""
    tape = input_tape(w)
    last = len(tape) - 1
    nodes = [(q, p) for q in m.states for p in range(last + 1)]
    won: set = set()
    changed = True
    while changed:
        changed = False
        for q, p in nodes:
            if (q, p) in won or q == m.reject:
                continue
            targets = [(q2, p + d) for q2, d in m.moves(q, tape[p])]
            inside = [t for t in targets if 0 <= t[1] <= last]
            if q == m.accept:
                ok = True
            elif q in m.forall:
                ok = len(inside) == len(targets) and all(t in won for t in inside)
            else:
                ok = any(t in won for t in inside)
            if ok:
                won.add((q, p))
                changed = True
    return (m.initial, 0) in won


def test_criterion_12_engine_cross_validation():
    from ipsim.harness import monte_carlo
    from ipsim.zoo import random_tafa, random_verifier

    with criterion(12, "Monte Carlo agrees with exact propagation; 2AFA fixpoint agrees with "
                       "the naive oracle"):
        rng = random.Random(12)
        for k in range(50):
            v = random_verifier(rng, n_states=3, pri_prob=0.7)
            w = "".join(rng.choice("01") for _ in range(rng.randint(0, 3)))
            acc, _, _ = exact_acceptance(v, constant_prover("_"), w, 20)
            stats = monte_carlo(v, None, w, 100_000, 20, seed=k)
            p = float(acc)
            se = math.sqrt(p * (1 - p) / stats.trials)
            assert abs(stats.accept_rate - p) <= 4 * se, (k, stats.accept_rate, p)
        for k in range(50):
            m = random_tafa(rng, n_states=4)
            for w in all_words("01", 6):
                assert tafa_accepts(m, w) == naive_tafa_accepts(m, w), (k, w)


# 13 ----------------------------------------------------------------------

def layered_oracle(v, n):
    """Breadth-first over all coin and prover choices; unbounded iff a layer past
    the configuration count is still populated."""
    from ipsim.transforms.analyze import successors

    limit = count_configurations(v, n, 0)
    worst = 0
    for letters in product(v.input_alphabet, repeat=n):
        tape = input_tape("".join(letters))
        layer = {(v.initial, 0, v.comm_blank)}
        depth = 0
        while layer and depth <= limit:
            nxt = set()
            for node in layer:
                nxt.update(successors(v, tape, node)[0])
            layer = nxt
            depth += 1
        if layer:
            return None
        worst = max(worst, depth)
    return worst


def test_criterion_13_worst_case_analyzer():
    from ipsim.transforms.analyze import analyze_worst_case
    from ipsim.zoo import random_verifier

    with criterion(13, "worst-case analyzer agrees with the exhaustive path oracle"):
        rng = random.Random(13)
        bounded = unbounded = 0
        for _ in range(100):
            v = random_verifier(rng, n_states=4, comm=("_", "a"), pri_prob=0.4, pub_prob=0.3)
            n = rng.randint(0, 4)
            res = analyze_worst_case(v, n)
            expected = layered_oracle(v, n)
            if expected is None:
                unbounded += 1
                assert not res.bounded
            else:
                bounded += 1
                assert res.bounded and res.max_steps == expected, (res, expected)
        assert bounded and unbounded


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except Exception:
                failed += 1
    sys.exit(1 if failed else 0)
