"""Agenda control and coalition manipulation for TSMR.

Both problems are polynomial: agenda control by layering the beaters of the
target behind the candidates it can afford to face, manipulation by a single
canonical ballot copied ``k`` times. Brute-force oracles for both live here
too, so the fast paths can be cross-checked.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

from tsmr.core import Agenda, Election, Vote, majority_graph
from tsmr.errors import CapExceeded, PreconditionError
from tsmr.rules import tsmr_winner

AGENDA_ENUMERATION_CAP = 8
MANIPULATION_CAP = 10**6


@dataclass(frozen=True)
class AgendaControlAnswer:
    feasible: bool
    witness: Optional[Agenda] = None


@dataclass(frozen=True)
class ManipulationAnswer:
    feasible: bool
    ballot: tuple[int, ...]
    witness: Optional[tuple[Vote, ...]] = None


def agenda_control(e: Election, p: int) -> AgendaControlAnswer:
    g = majority_graph(e)
    beaters = g.in_neighbors(p)
    placed = [c for c in range(e.m) if c != p and c not in beaters]
    order = placed + [p]
    reached = set(placed)
    while True:
        layer = sorted(g.out_of(reached) - {p})
        if not layer:
            break
        order.extend(layer)
        reached.update(layer)
    if len(order) < e.m:
        return AgendaControlAnswer(False)
    agenda = Agenda(tuple(order))
    assert tsmr_winner(e, agenda) == p
    return AgendaControlAnswer(True, agenda)


def agenda_control_oracle(e: Election, p: int, cap: int = AGENDA_ENUMERATION_CAP) -> bool:
    """Try every agenda."""
    if e.m > cap:
        raise CapExceeded(f"enumeration cap: {e.m} candidates > {cap}", e.m, cap)
    return any(tsmr_winner(e, Agenda(o)) == p for o in itertools.permutations(range(e.m)))


def canonical_ballot(p: int, a: Agenda) -> tuple[int, ...]:
    """``p`` first, then its agenda predecessors, then its successors, both in agenda order."""
    return (p,) + a.predecessors(p) + a.successors(p)


def coalition_manipulation(e: Election, p: int, a: Agenda, k: int) -> ManipulationAnswer:
    if k < 1:
        raise PreconditionError("coalition size k must be positive")
    a.check(e.m)
    ballot = canonical_ballot(p, a)
    extra = Vote(ballot, k)
    if tsmr_winner(e.with_votes(e.votes + (extra,)), a) == p:
        return ManipulationAnswer(True, ballot, (extra,))
    return ManipulationAnswer(False, ballot)


def manipulation_oracle(e: Election, p: int, a: Agenda, k: int, cap: int = MANIPULATION_CAP) -> bool:
    """Try every multiset of ``k`` ballots."""
    size = math.factorial(e.m) ** k
    if size > cap:
        raise CapExceeded(f"enumeration cap: (m!)^k = {size} > {cap}", size, cap)
    orders = list(itertools.permutations(range(e.m)))
    for combo in itertools.combinations_with_replacement(orders, k):
        extra = tuple(Vote(o) for o in combo)
        if tsmr_winner(e.with_votes(e.votes + extra), a) == p:
            return True
    return False
