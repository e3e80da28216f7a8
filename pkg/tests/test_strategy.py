import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import agenda_control_brute
from test_core import elections
from tsmr import Agenda, CapExceeded, Election, PreconditionError, Vote, tsmr_winner
from tsmr.strategy import (
    agenda_control,
    agenda_control_oracle,
    canonical_ballot,
    coalition_manipulation,
    manipulation_oracle,
)

A, B, C, D = range(4)


def test_example1_agenda_control_witness(example1):
    ans = agenda_control(example1, A)
    assert ans.feasible
    assert ans.witness.order == (B, D, A, C)
    assert tsmr_winner(example1, ans.witness) == A


def test_example1_every_candidate_controllable(example1):
    # frozen from enumerating all 24 agendas
    assert [agenda_control_oracle(example1, c) for c in range(4)] == [True, True, True, True]
    assert all(agenda_control(example1, c).feasible for c in range(4))


def test_three_cycle():
    e = Election.from_rankings("abc", ["abc", "bca", "cab"])
    ans = agenda_control(e, A)
    assert ans.witness.order == (B, A, C)


def test_condorcet_winner_takes_everyone_first():
    e = Election.from_rankings("abc", ["cab"])
    ans = agenda_control(e, C)
    assert ans.witness.order == (A, B, C)


def test_infeasible_when_beaten_by_everyone():
    e = Election.from_rankings("abc", ["abc"])
    assert not agenda_control(e, C).feasible
    assert not agenda_control_oracle(e, C)


def test_oracle_edge_cases():
    assert agenda_control_oracle(Election.from_rankings("a", ["a"]), 0)
    big = Election(tuple("abcdefghi"))
    with pytest.raises(CapExceeded, match="enumeration cap"):
        agenda_control_oracle(big, 0)


def test_canonical_ballot():
    assert canonical_ballot(2, Agenda((3, 0, 2, 1))) == (2, 3, 0, 1)


def test_two_candidate_manipulation():
    p, q = 0, 1
    one = Election(("p", "q"), (Vote((q, p)),))
    ans = coalition_manipulation(one, p, Agenda((q, p)), 1)
    assert ans.feasible and ans.ballot == (p, q)
    assert ans.witness == (Vote((p, q), 1),)
    three = Election(("p", "q"), (Vote((q, p), 3),))
    assert not coalition_manipulation(three, p, Agenda((q, p)), 1).feasible
    assert not manipulation_oracle(three, p, Agenda((q, p)), 1)


def test_manipulation_rejects_empty_coalition(example1):
    with pytest.raises(PreconditionError):
        coalition_manipulation(example1, A, Agenda((A, B, C, D)), 0)


def test_manipulation_oracle_cap(example1):
    with pytest.raises(CapExceeded):
        manipulation_oracle(example1, A, Agenda((A, B, C, D)), 5)


def test_existing_winner_stays(example1):
    a = Agenda((A, B, C, D))
    for k in (1, 2, 5):
        assert coalition_manipulation(example1, A, a, k).feasible


@settings(max_examples=200, deadline=None)
@given(elections(max_m=5, max_n=9), st.data())
def test_agenda_control_matches_brute(e, data):
    p = data.draw(st.integers(0, e.m - 1))
    ans = agenda_control(e, p)
    assert ans.feasible == agenda_control_brute(e.expanded(), e.m, p)
    if ans.feasible:
        assert tsmr_winner(e, ans.witness) == p


@settings(max_examples=100, deadline=None)
@given(elections(max_m=3, max_n=6), st.data())
def test_manipulation_matches_oracle(e, data):
    p = data.draw(st.integers(0, e.m - 1))
    a = Agenda(tuple(data.draw(st.permutations(range(e.m)))))
    k = data.draw(st.integers(1, 2))
    assert coalition_manipulation(e, p, a, k).feasible == manipulation_oracle(e, p, a, k)
