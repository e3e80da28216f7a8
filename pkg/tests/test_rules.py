import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import tsmr_by_definition
from test_core import elections
from tsmr import (
    Agenda,
    Election,
    PreconditionError,
    amendment_winner,
    condorcet_winner,
    successive_winner,
    tally,
    tsmr_winner,
    weak_condorcet_winners,
    winner,
)
from tsmr.rules import tsmr_winner_counts, tsmr_winner_positions

A, B, C, D = range(4)


def test_example1_tsmr(example1):
    assert tsmr_winner(example1, Agenda((A, B, C, D))) == A
    assert tsmr_winner(example1, Agenda((D, C, B, A))) == B


def test_example1_successive(example1):
    assert successive_winner(example1, Agenda((A, B, C, D))) == D


def test_example1_amendment(example1):
    # a beats b, loses to c; c loses to d
    assert amendment_winner(example1, Agenda((A, B, C, D))) == D


def test_example1_no_condorcet(example1):
    assert condorcet_winner(example1) is None
    assert weak_condorcet_winners(example1) == set()


def test_winner_dispatch(example1):
    a = Agenda((A, B, C, D))
    assert [winner(r, example1, a) for r in ("tsmr", "successive", "amendment")] == [A, D, D]


def test_amendment_tie_advances_challenger():
    e = Election.from_rankings("ab", ["ab", "ba"])
    assert amendment_winner(e, Agenda((0, 1))) == 1
    assert amendment_winner(e, Agenda((1, 0))) == 0


def test_successive_strict_majority_even_n():
    # a is above b on exactly half the ballots, which is not enough.
    e = Election.from_rankings("ab", ["ab", "ba"])
    assert successive_winner(e, Agenda((0, 1))) == 1


def test_successive_rejects_no_votes():
    with pytest.raises(PreconditionError, match="no votes"):
        successive_winner(Election(("a", "b")), Agenda((0, 1)))


def test_empty_profile_tsmr_and_amendment_pick_last():
    e = Election(("a", "b", "c"))
    assert tsmr_winner(e, Agenda((2, 0, 1))) == 1
    assert amendment_winner(e, Agenda((2, 0, 1))) == 1


def test_single_candidate():
    e = Election.from_rankings("a", ["a"])
    assert tsmr_winner(e, Agenda((0,))) == 0


def test_vectorised_positions_match(example1):
    counts = tally(example1)
    for order in itertools.permutations(range(4)):
        w = tsmr_winner(example1, Agenda(order))
        assert tsmr_winner_counts(counts, order) == w
        assert order[int(tsmr_winner_positions(counts[None], order)[0])] == w


def test_counts_restricted_to_order(example1):
    # On {b, c, d} with agenda (b, c, d): b beats c and d, so b wins.
    assert tsmr_winner_counts(tally(example1), (B, C, D)) == B


@settings(max_examples=300, deadline=None)
@given(elections(max_m=5), st.data())
def test_tsmr_matches_definition(e, data):
    order = tuple(data.draw(st.permutations(range(e.m))))
    assert tsmr_winner(e, Agenda(order)) == tsmr_by_definition(e.expanded(), order, e.m)


# Relations between the three rules and Condorcet winners, ties allowed.


def _all_agendas(e):
    return (Agenda(o) for o in itertools.permutations(range(e.m)))


@settings(max_examples=150, deadline=None)
@given(elections(max_m=4, max_n=7))
def test_first_is_amendment_winner_iff_condorcet(e):
    cw = condorcet_winner(e)
    for a in _all_agendas(e):
        assert (amendment_winner(e, a) == a.order[0]) == (cw == a.order[0])


@settings(max_examples=150, deadline=None)
@given(elections(max_m=4, max_n=7))
def test_last_is_tsmr_winner_iff_weak_condorcet(e):
    weak = weak_condorcet_winners(e)
    for a in _all_agendas(e):
        assert (tsmr_winner(e, a) == a.order[-1]) == (a.order[-1] in weak)


@settings(max_examples=150, deadline=None)
@given(elections(max_m=4, max_n=7).filter(lambda e: e.n > 0))
def test_successive_first_implies_condorcet(e):
    cw = condorcet_winner(e)
    for a in _all_agendas(e):
        if successive_winner(e, a) == a.order[0]:
            assert cw == a.order[0]


@settings(max_examples=150, deadline=None)
@given(elections(max_m=4, max_n=7))
def test_condorcet_first_implies_tsmr(e):
    cw = condorcet_winner(e)
    for a in _all_agendas(e):
        if cw == a.order[0]:
            assert tsmr_winner(e, a) == cw


@settings(max_examples=150, deadline=None)
@given(elections(max_m=4, max_n=7).filter(lambda e: e.n > 0))
def test_weak_condorcet_last_implies_successive_and_amendment(e):
    weak = weak_condorcet_winners(e)
    for a in _all_agendas(e):
        if a.order[-1] in weak:
            assert successive_winner(e, a) == a.order[-1]
            assert amendment_winner(e, a) == a.order[-1]


# The one-way implications above do not reverse. Witnesses found by exhaustive search.


def test_condorcet_first_need_not_win_successive():
    e = Election.from_rankings("abc", ["abc", "bac", "cab"])
    a = Agenda((A, B, C))
    assert condorcet_winner(e) == A
    assert successive_winner(e, a) == B


def test_tsmr_first_need_not_be_condorcet():
    e = Election.from_rankings("abc", ["abc", "bca", "cab"])
    assert tsmr_winner(e, Agenda((A, B, C))) == A
    assert condorcet_winner(e) is None


def test_last_winning_both_rules_need_not_be_weak_condorcet():
    e = Election.from_rankings("abc", ["abc", "bca", "cab"])
    a = Agenda((A, C, B))
    assert successive_winner(e, a) == B
    assert amendment_winner(e, a) == B
    assert B not in weak_condorcet_winners(e)


def test_converse_five_with_ties():
    e = Election.from_rankings("abc", ["abc", "bca"])
    a = Agenda((B, A, C))
    assert successive_winner(e, a) == C
    assert amendment_winner(e, a) == C
    assert C not in weak_condorcet_winners(e)


def test_positions_on_random_stack():
    rng = np.random.default_rng(7)
    stack = rng.integers(0, 5, size=(50, 4, 4))
    for t in range(50):
        order = tuple(int(x) for x in rng.permutation(4))
        pos = tsmr_winner_positions(stack, order)[t]
        assert order[int(pos)] == tsmr_winner_counts(stack[t], order)
