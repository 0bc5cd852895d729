from fractions import Fraction
from itertools import combinations, product

import pytest

from ipsim.engines import tafa_accepts
from ipsim.provers import optimal_bounded_prover
from ipsim.transforms.tafa import (
    check_constpub, constpub_to_2afa, enumerate_maj, expected_state_count, is_prefix_free, mass,
    prefixes, proper_prefixes,
)
from ipsim.zoo import all_words, coin_verifier, even_ones_verifier, last_symbol_verifier


def _brute_maj(r):
    seqs = ["".join(b) for k in range(r + 1) for b in product("01", repeat=k)]
    out = set()
    for size in range(len(seqs) + 1):
        for S in combinations(seqs, size):
            if is_prefix_free(S) and mass(S) > Fraction(1, 2):
                out.add(frozenset(S))
    return out


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_maj_matches_subset_enumeration(r):
    assert enumerate_maj(r) == _brute_maj(r)


def test_maj_members_are_majorities():
    for S in enumerate_maj(3):
        assert is_prefix_free(S) and mass(S) > Fraction(1, 2)
    assert frozenset({""}) in enumerate_maj(0)
    with pytest.raises(ValueError):
        enumerate_maj(9)


def test_prefix_helpers():
    S = {"01", "1"}
    assert prefixes(S) == {"", "0", "01", "1"}
    assert proper_prefixes(S) == {"", "0"}


@pytest.mark.parametrize("v, r", [(last_symbol_verifier(), 1), (even_ones_verifier(), 2)])
def test_state_count(v, r):
    a = constpub_to_2afa(v, r)
    assert len(a.states) == expected_state_count(v, r)


@pytest.mark.parametrize("v, r", [(last_symbol_verifier(), 1), (even_ones_verifier(), 2)])
def test_2afa_accepts_iff_prover_wins_majority(v, r):
    a = constpub_to_2afa(v, r)
    for w in all_words(v.input_alphabet, 5):
        _, value = optimal_bounded_prover(v, w, 40)
        assert tafa_accepts(a, w) == (value > Fraction(1, 2)), w


def test_private_coins_are_refused():
    with pytest.raises(ValueError):
        check_constpub(coin_verifier())
