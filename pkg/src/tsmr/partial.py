"""Possible and necessary TSMR winners under partial votes and a partial agenda."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from tsmr.core import (
    Agenda,
    Election,
    PartialAgenda,
    PartialElection,
    Vote,
    ranking_matrix,
    tally,
    transitive_closure,
)
from tsmr.errors import CapExceeded, PreconditionError
from tsmr.rules import tsmr_winner_positions

Pair = tuple[int, int]


@dataclass(frozen=True)
class CompletionBudget:
    max_completions: int = 10**6

    def __post_init__(self):
        if self.max_completions < 1:
            raise PreconditionError("completion budget must be at least 1")


def _pred_masks(m: int, constraints: Iterable[Pair]) -> list[int]:
    preds = [0] * m
    for a, b in constraints:
        preds[b] |= 1 << a
    return preds


def linear_extensions(m: int, constraints: Iterable[Pair]) -> Iterator[tuple[int, ...]]:
    """All linear extensions, smallest available id tried first."""
    preds = _pred_masks(m, constraints)
    order: list[int] = []

    def rec(placed: int) -> Iterator[tuple[int, ...]]:
        if len(order) == m:
            yield tuple(order)
            return
        for c in range(m):
            if not placed >> c & 1 and preds[c] & ~placed == 0:
                order.append(c)
                yield from rec(placed | 1 << c)
                order.pop()

    yield from rec(0)


def count_linear_extensions(m: int, constraints: Iterable[Pair]) -> int:
    preds = _pred_masks(m, constraints)
    ways = [0] * (1 << m)
    ways[0] = 1
    for mask in range(1 << m):
        if ways[mask]:
            for c in range(m):
                if not mask >> c & 1 and preds[c] & ~mask == 0:
                    ways[mask | 1 << c] += ways[mask]
    return ways[(1 << m) - 1]


def _first_extension(m: int, constraints: Iterable[Pair], lead: Sequence[int] = ()) -> tuple[int, ...]:
    """Smallest-id-first extension, preferring ids in ``lead`` (in that order) whenever available."""
    preds = _pred_masks(m, constraints)
    placed = 0
    out: list[int] = []
    while len(out) < m:
        ready = [c for c in range(m) if not placed >> c & 1 and preds[c] & ~placed == 0]
        pick = next((c for c in lead if c in ready), ready[0])
        out.append(pick)
        placed |= 1 << pick
    return tuple(out)


def complete_above(m: int, constraints: frozenset[Pair], c: int, d: int) -> tuple[int, ...]:
    """A completion ranking ``c`` before ``d`` unless the vote forces the opposite."""
    if (d, c) not in constraints:
        constraints = transitive_closure(constraints | {(c, d)}, m)
    return _first_extension(m, constraints)


def complete_high(m: int, constraints: frozenset[Pair], c: int) -> tuple[int, ...]:
    """A completion placing ``c`` right below its forced superiors and above everyone else."""
    ancestors = sorted(x for x, y in constraints if y == c)
    ext = _first_extension(m, constraints, lead=ancestors + [c])
    assert ext.index(c) == len(ancestors)
    return ext


def _complete(pe: PartialElection, fill) -> Election:
    return Election(pe.candidates, tuple(Vote(fill(v.constraints), v.count) for v in pe.votes))


def necessary_winner(pe: PartialElection, pa: PartialAgenda, p: int) -> bool:
    """Does ``p`` win every completion of the votes and the agenda?

    ``p`` loses some completion iff either a candidate that may precede it
    can be made to beat it, or a candidate that may follow it can be left
    unbeaten by everything the agenda forces in front of it. Each case is
    decided by one greedy completion per candidate.
    """
    m = pe.m
    agenda = pa.constraints
    for c in range(m):
        if c == p or (p, c) in agenda:
            continue
        counts = tally(_complete(pe, lambda cons: complete_above(m, cons, c, p)))
        if counts[c, p] > counts[p, c]:
            return False
    for c in range(m):
        if c == p or (c, p) in agenda:
            continue
        # With p placed before c, c is preceded by its own forced predecessors,
        # by p, and by p's forced predecessors.
        front = {x for x, y in agenda if y == c or y == p} | {p}
        counts = tally(_complete(pe, lambda cons: complete_high(m, cons, c)))
        if not any(counts[x, c] > counts[c, x] for x in front):
            return False
    return True


def completion_count(pe: PartialElection, pa: PartialAgenda) -> int:
    total = count_linear_extensions(pe.m, pa.constraints)
    for v in pe.votes:
        total *= count_linear_extensions(pe.m, v.constraints) ** v.count
    return total


def reachable_tallies(pe: PartialElection) -> np.ndarray:
    """Every distinct tally some completion of ``pe`` produces, shape ``(R, m, m)``.

    Completions are enumerated vote by vote; completions that agree on the
    running tally are merged, which keeps the enumeration exact. Only the
    upper-triangle pair counts are tracked. Each is packed as one digit of a
    mixed-radix integer whenever the radices fit in 63 bits.
    """
    m, n = pe.m, pe.n
    iu = np.triu_indices(m, 1)
    groups: dict[frozenset, int] = {}
    for v in pe.votes:
        groups[v.constraints] = groups.get(v.constraints, 0) + v.count
    exts = []
    for cons, count in groups.items():
        rows = np.array([ranking_matrix(r, m)[iu] for r in linear_extensions(m, cons)], dtype=np.int64)
        exts.append((np.unique(rows, axis=0), count))
    exts.sort(key=lambda x: len(x[0]))
    base = sum((count * ext.min(axis=0) for ext, count in exts), np.zeros(len(iu[0]), dtype=np.int64))
    spans = sum((count * (ext.max(axis=0) - ext.min(axis=0)) for ext, count in exts), np.zeros_like(base))
    radix = spans + 1
    packed = float(np.prod(radix.astype(float))) < 2.0**62
    if packed:
        weights = np.concatenate(([1], np.cumprod(radix[:-1])))[: len(radix)].astype(np.int64)
        reach = np.zeros(1, dtype=np.int64)
        for ext, count in exts:
            if len(ext) == 1:
                continue
            keys = (ext - ext.min(axis=0)) @ weights
            for _ in range(count):
                reach = np.unique((reach[:, None] + keys[None, :]).ravel())
        upper = base + (reach[:, None] // weights) % radix
    else:
        upper = base[None, :]
        for ext, count in exts:
            if len(ext) == 1:
                continue
            low = ext - ext.min(axis=0)
            for _ in range(count):
                upper = np.unique((upper[:, None, :] + low[None, :, :]).reshape(-1, len(base)), axis=0)
    out = np.zeros((len(upper), m, m), dtype=np.int64)
    out[:, iu[0], iu[1]] = upper
    out[:, iu[1], iu[0]] = n - upper
    return out


def _checked(pe: PartialElection, pa: PartialAgenda, budget: Optional[CompletionBudget]) -> None:
    budget = budget or CompletionBudget()
    size = completion_count(pe, pa)
    if size > budget.max_completions:
        raise CapExceeded(
            f"completion budget exceeded: {size} completions > {budget.max_completions}",
            size,
            budget.max_completions,
        )


def completion_winners(
    pe: PartialElection, pa: PartialAgenda, budget: Optional[CompletionBudget] = None
) -> set[int]:
    """Winners over all (vote completion, agenda extension) pairs."""
    _checked(pe, pa, budget)
    reach = reachable_tallies(pe)
    winners: set[int] = set()
    for order in linear_extensions(pe.m, pa.constraints):
        pos = tsmr_winner_positions(reach, order)
        winners.update(order[i] for i in np.unique(pos))
    return winners


def possible_winner_exact(
    pe: PartialElection, pa: PartialAgenda, p: int, budget: Optional[CompletionBudget] = None
) -> bool:
    _checked(pe, pa, budget)
    reach = reachable_tallies(pe)
    for order in linear_extensions(pe.m, pa.constraints):
        if (tsmr_winner_positions(reach, order) == order.index(p)).any():
            return True
    return False


def possible_winner_p_last(pe: PartialElection, a: Agenda | PartialAgenda, p: int) -> bool:
    """Possible winner for a complete agenda ending at ``p``.

    ``p`` then wins iff it is a weak Condorcet winner, and lifting ``p`` as
    high as each vote allows minimises every rival's support against it at
    once.
    """
    if isinstance(a, PartialAgenda):
        if not a.is_total(pe.m):
            raise PreconditionError("agenda must be complete")
        a = a.as_agenda(pe.m)
    a.check(pe.m)
    if a.order[-1] != p:
        raise PreconditionError("precondition: p last")
    counts = tally(_complete(pe, lambda cons: complete_high(pe.m, cons, p)))
    return not any(counts[c, p] > counts[p, c] for c in range(pe.m) if c != p)
