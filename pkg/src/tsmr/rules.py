"""Winner determination for the sequential rules and Condorcet diagnostics."""

from __future__ import annotations

import enum
from typing import Optional, Sequence

import numpy as np

from tsmr.core import Agenda, Election, forward_graph, majority_graph, tally
from tsmr.errors import PreconditionError


class Rule(str, enum.Enum):
    TSMR = "tsmr"
    SUCCESSIVE = "successive"
    AMENDMENT = "amendment"


def _check(e: Election, a: Agenda) -> None:
    if e.m == 0:
        raise PreconditionError("empty roster")
    a.check(e.m)


def tsmr_winner(e: Election, a: Agenda) -> int:
    """Two-stage majoritarian winner.

    Keep the majority arcs pointing forward along the agenda; among the
    candidates with no incoming forward arc, the one latest in the agenda
    wins. The first agenda candidate always qualifies, so a winner exists.
    """
    _check(e, a)
    fwd = forward_graph(majority_graph(e), a)
    has_in = {b for _, b in fwd.arcs}
    unbeaten = [c for c in a.order if c not in has_in]
    return unbeaten[-1]


def tsmr_winner_counts(counts: np.ndarray, order: Sequence[int]) -> int:
    """TSMR winner straight from a tally, restricted to the ids in ``order``."""
    idx = list(order)
    sub = counts[np.ix_(idx, idx)]
    fwd = np.triu(sub > sub.T, 1)
    unbeaten = ~fwd.any(axis=0)
    return idx[int(np.flatnonzero(unbeaten)[-1])]


def tsmr_winner_positions(tallies: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Vectorised TSMR over a stack of tallies.

    ``tallies`` has shape ``(N, M, M)`` over some roster; ``order`` lists the
    participating ids in agenda order. Returns, per tally, the agenda
    position (index into ``order``) of the winner.
    """
    idx = np.asarray(order)
    sub = tallies[:, idx][:, :, idx]
    k = len(idx)
    fwd = (sub > sub.transpose(0, 2, 1)) & np.triu(np.ones((k, k), dtype=bool), 1)
    unbeaten = ~fwd.any(axis=1)
    return k - 1 - np.argmax(unbeaten[:, ::-1], axis=1)


def successive_winner(e: Election, a: Agenda) -> int:
    """First agenda candidate ranked above all of its successors by a strict majority."""
    _check(e, a)
    n = e.n
    if n == 0:
        raise PreconditionError("no votes")
    for i, c in enumerate(a.order):
        rest = set(a.order[i + 1 :])
        support = 0
        for v in e.votes:
            pos = v.ranking.index(c)
            if rest.isdisjoint(v.ranking[:pos]):
                support += v.count
        if 2 * support > n:
            return c
    raise AssertionError("last agenda candidate must beat the empty set")


def amendment_winner(e: Election, a: Agenda) -> int:
    """Pairwise knockout; the incumbent survives only by strictly beating the challenger."""
    _check(e, a)
    counts = tally(e)
    current = a.order[0]
    for challenger in a.order[1:]:
        if not counts[current, challenger] > counts[challenger, current]:
            current = challenger
    return current


def winner(rule: Rule | str, e: Election, a: Agenda) -> int:
    rule = Rule(rule)
    if rule is Rule.TSMR:
        return tsmr_winner(e, a)
    if rule is Rule.SUCCESSIVE:
        return successive_winner(e, a)
    return amendment_winner(e, a)


def condorcet_winner(e: Election) -> Optional[int]:
    counts = tally(e)
    for c in range(e.m):
        if all(counts[c, d] > counts[d, c] for d in range(e.m) if d != c):
            return c
    return None


def weak_condorcet_winners(e: Election) -> set[int]:
    counts = tally(e)
    beaten = counts.T > counts
    return {c for c in range(e.m) if not beaten[c].any()}
