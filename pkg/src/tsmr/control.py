"""Multimode election control under TSMR.

:func:`solve_exact` searches every budget-respecting modification; identical
ballots are interchangeable, so it enumerates how many copies of each
distinct ballot to touch and evaluates the resulting tallies in numpy
batches. The polynomial routines cover CCDC, DCDC, DCAC and, with the
distinguished candidate last, DCAV/DCDV.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Optional, Sequence

import numpy as np

from tsmr.core import Agenda, Election, Vote, ranking_matrix, restrict, restrict_agenda, tally
from tsmr.errors import CapExceeded, PreconditionError
from tsmr.rules import tsmr_winner, tsmr_winner_counts, tsmr_winner_positions

EXACT_CAP = 10**7
IMMUNITY_CAP = 12
_CHUNK = 4096


class Mode(str, enum.Enum):
    CONSTRUCTIVE = "constructive"
    DESTRUCTIVE = "destructive"


class Variant(str, enum.Enum):
    CCAV = "ccav"
    CCDV = "ccdv"
    CCAC = "ccac"
    CCDC = "ccdc"
    DCAV = "dcav"
    DCDV = "dcdv"
    DCAC = "dcac"
    DCDC = "dcdc"

    @property
    def mode(self) -> Mode:
        return Mode.CONSTRUCTIVE if self.value.startswith("cc") else Mode.DESTRUCTIVE

    @property
    def action(self) -> str:
        """Budget key: one of ``av``, ``dv``, ``ac``, ``dc``."""
        return self.value[2:]


@dataclass(frozen=True)
class ControlInstance:
    """Registered/unregistered candidates and votes plus four budgets.

    ``candidates`` is the full roster ``C ∪ D``; ids in ``unregistered`` form
    ``D``. Both vote lists rank the full roster and the agenda orders it.
    """

    candidates: tuple[str, ...]
    votes: tuple[Vote, ...]
    p: int
    agenda: Agenda
    unregistered: frozenset[int] = frozenset()
    unregistered_votes: tuple[Vote, ...] = ()
    k_av: int = 0
    k_dv: int = 0
    k_ac: int = 0
    k_dc: int = 0
    mode: Mode = Mode.CONSTRUCTIVE

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "votes", tuple(self.votes))
        object.__setattr__(self, "unregistered_votes", tuple(self.unregistered_votes))
        object.__setattr__(self, "unregistered", frozenset(self.unregistered))
        object.__setattr__(self, "mode", Mode(self.mode))
        m = len(self.candidates)
        # Election validates labels and that every ballot permutes C ∪ D.
        Election(self.candidates, self.votes + self.unregistered_votes)
        self.agenda.check(m)
        if not self.unregistered <= set(range(m)):
            raise PreconditionError("unregistered candidate id outside roster")
        if not 0 <= self.p < m or self.p in self.unregistered:
            raise PreconditionError("distinguished candidate must be registered")
        for name in ("k_av", "k_dv", "k_ac", "k_dc"):
            if getattr(self, name) < 0:
                raise PreconditionError(f"{name} must be non-negative")
        if self.k_av > self.n_unregistered_votes:
            raise PreconditionError("k_AV exceeds the number of unregistered votes")
        if self.k_dv > self.n_votes:
            raise PreconditionError("k_DV exceeds the number of registered votes")
        if self.k_ac > len(self.unregistered):
            raise PreconditionError("k_AC exceeds the number of unregistered candidates")
        if self.k_dc > len(self.registered):
            raise PreconditionError("k_DC exceeds the number of registered candidates")

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def registered(self) -> tuple[int, ...]:
        return tuple(c for c in range(self.m) if c not in self.unregistered)

    @property
    def n_votes(self) -> int:
        return sum(v.count for v in self.votes)

    @property
    def n_unregistered_votes(self) -> int:
        return sum(v.count for v in self.unregistered_votes)

    def budget(self, action: str) -> int:
        return getattr(self, "k_" + action)

    def matches(self, variant: Variant | str) -> bool:
        """Whether the instance has the zero-budget pattern of ``variant``."""
        variant = Variant(variant)
        if variant.mode is not self.mode:
            return False
        others = [a for a in ("av", "dv", "ac", "dc") if a != variant.action]
        if any(self.budget(a) for a in others):
            return False
        if variant.action != "ac" and self.unregistered:
            return False
        if variant.action != "av" and self.unregistered_votes:
            return False
        return True

    @property
    def variant(self) -> Optional[Variant]:
        """The single standard variant this instance fits, if exactly one does."""
        hits = [v for v in Variant if self.matches(v)]
        return hits[0] if len(hits) == 1 else None

    def base_election(self) -> Election:
        return restrict(Election(self.candidates, self.votes), self.registered)

    def base_agenda(self) -> Agenda:
        return restrict_agenda(self.agenda, self.registered)

    @classmethod
    def from_election(
        cls, e: Election, p: int, a: Agenda, variant: Variant | str, k: int
    ) -> ControlInstance:
        """Pure deletion instance (DV or DC) over an ordinary election."""
        variant = Variant(variant)
        if variant.action not in ("dv", "dc"):
            raise PreconditionError(f"{variant.value} needs unregistered votes or candidates")
        return cls(
            e.candidates, e.votes, p, a, mode=variant.mode, **{"k_" + variant.action: k}
        )


@dataclass(frozen=True)
class ControlSolution:
    """Indices of touched ballots (multiplicities unrolled) and candidate ids."""

    deleted_votes: tuple[int, ...] = ()
    added_votes: tuple[int, ...] = ()
    deleted_candidates: tuple[int, ...] = ()
    added_candidates: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return (
            len(self.deleted_votes)
            + len(self.added_votes)
            + len(self.deleted_candidates)
            + len(self.added_candidates)
        )


def _expand(votes: Sequence[Vote]) -> list[tuple[int, ...]]:
    return [v.ranking for v in votes for _ in range(v.count)]


def apply_solution(inst: ControlInstance, sol: ControlSolution) -> tuple[Election, Agenda, tuple[int, ...]]:
    """Modified election, restricted agenda, and the new-to-old id map."""
    registered = _expand(inst.votes)
    unregistered = _expand(inst.unregistered_votes)
    gone = set(sol.deleted_votes)
    ballots = [r for i, r in enumerate(registered) if i not in gone]
    ballots += [unregistered[i] for i in sol.added_votes]
    keep = (set(inst.registered) - set(sol.deleted_candidates)) | set(sol.added_candidates)
    full = Election(inst.candidates, tuple(Vote(r) for r in ballots))
    kept = tuple(sorted(keep))
    return restrict(full, keep), restrict_agenda(inst.agenda, keep), kept


def outcome_winner(inst: ControlInstance, sol: ControlSolution) -> int:
    """Winner (original id) after applying ``sol``."""
    e, a, kept = apply_solution(inst, sol)
    return kept[tsmr_winner(e, a)]


def verify_solution(inst: ControlInstance, sol: ControlSolution) -> bool:
    """Budgets, index ranges, and the mode's goal, all re-checked from scratch."""
    n_v, n_w = inst.n_votes, inst.n_unregistered_votes
    parts = (sol.deleted_votes, sol.added_votes, sol.deleted_candidates, sol.added_candidates)
    if any(len(set(x)) != len(x) for x in parts):
        return False
    if len(sol.deleted_votes) > inst.k_dv or len(sol.added_votes) > inst.k_av:
        return False
    if len(sol.deleted_candidates) > inst.k_dc or len(sol.added_candidates) > inst.k_ac:
        return False
    if not all(0 <= i < n_v for i in sol.deleted_votes):
        return False
    if not all(0 <= i < n_w for i in sol.added_votes):
        return False
    registered = set(inst.registered)
    if inst.p in sol.deleted_candidates or not set(sol.deleted_candidates) <= registered:
        return False
    if not set(sol.added_candidates) <= inst.unregistered:
        return False
    won = outcome_winner(inst, sol) == inst.p
    return won if inst.mode is Mode.CONSTRUCTIVE else not won


# -- exact search -----------------------------------------------------------


def _subset_count(n: int, k: int) -> int:
    return sum(comb(n, i) for i in range(min(n, k) + 1))


def search_space(inst: ControlInstance) -> int:
    """Number of (V', W', C', D') combinations within budget, ballots counted individually."""
    return (
        _subset_count(inst.n_votes, inst.k_dv)
        * _subset_count(inst.n_unregistered_votes, inst.k_av)
        * _subset_count(len(inst.registered) - 1, inst.k_dc)
        * _subset_count(len(inst.unregistered), inst.k_ac)
    )


def _group(votes: Sequence[Vote]) -> tuple[list[tuple[int, ...]], list[list[int]]]:
    """Distinct rankings with the unrolled indices of their copies."""
    rankings: list[tuple[int, ...]] = []
    members: dict[tuple[int, ...], list[int]] = {}
    i = 0
    for v in votes:
        if v.ranking not in members:
            members[v.ranking] = []
            rankings.append(v.ranking)
        members[v.ranking].extend(range(i, i + v.count))
        i += v.count
    return rankings, [members[r] for r in rankings]


def _count_vectors(mults: Sequence[int], limit: int) -> Iterator[tuple[int, ...]]:
    if not mults:
        yield ()
        return
    for c in range(min(mults[0], limit) + 1):
        for rest in _count_vectors(mults[1:], limit - c):
            yield (c,) + rest


def _choices(votes: Sequence[Vote], limit: int) -> tuple[list[tuple[int, ...]], np.ndarray, list]:
    """Canonical ballot selections of size <= limit.

    Copies of one ranking are interchangeable, so only the earliest copies are
    ever taken; the returned index tuples are the lexicographically smallest
    representatives.
    """
    rankings, members = _group(votes)
    vecs = list(_count_vectors([len(x) for x in members], limit))
    picked = [tuple(sorted(i for g, c in enumerate(vec) for i in members[g][:c])) for vec in vecs]
    return picked, np.array(vecs, dtype=np.int64).reshape(len(vecs), len(rankings)), rankings


def _subsets(items: Sequence[int], limit: int) -> Iterator[tuple[int, ...]]:
    for size in range(min(limit, len(items)) + 1):
        yield from itertools.combinations(items, size)


def solve_exact(inst: ControlInstance, cap: int = EXACT_CAP) -> Optional[ControlSolution]:
    """Exhaustive multimode control.

    Returns the canonical solution (fewest modifications, then
    lexicographically smallest deleted votes, added votes, deleted
    candidates, added candidates), or None when no solution exists.
    """
    size = search_space(inst)
    if size > cap:
        raise CapExceeded(f"instance too large for exact solver: {size} > {cap}", size, cap)
    m = inst.m
    dv_idx, dv_vec, dv_rank = _choices(inst.votes, inst.k_dv)
    av_idx, av_vec, av_rank = _choices(inst.unregistered_votes, inst.k_av)
    pv = np.array([ranking_matrix(r, m).ravel() for r in dv_rank], dtype=np.int64).reshape(-1, m * m)
    pw = np.array([ranking_matrix(r, m).ravel() for r in av_rank], dtype=np.int64).reshape(-1, m * m)

    combos = sorted(
        itertools.product(range(len(dv_idx)), range(len(av_idx))),
        key=lambda ij: (len(dv_idx[ij[0]]) + len(av_idx[ij[1]]), dv_idx[ij[0]], av_idx[ij[1]]),
    )
    ci = np.array([i for i, _ in combos], dtype=np.int64)
    cj = np.array([j for _, j in combos], dtype=np.int64)
    sizes = np.array([len(dv_idx[i]) + len(av_idx[j]) for i, j in combos], dtype=np.int64)
    base = tally(Election(inst.candidates, inst.votes)).ravel()

    deletable = [c for c in inst.registered if c != inst.p]
    cand_choices = sorted(
        itertools.product(_subsets(deletable, inst.k_dc), _subsets(sorted(inst.unregistered), inst.k_ac)),
        key=lambda x: (len(x[0]) + len(x[1]), x[0], x[1]),
    )
    constructive = inst.mode is Mode.CONSTRUCTIVE
    best = None
    for dc, ac in cand_choices:
        extra = len(dc) + len(ac)
        if best is not None and extra > best[0][0]:
            break
        active = (set(inst.registered) - set(dc)) | set(ac)
        order = [c for c in inst.agenda.order if c in active]
        p_pos = order.index(inst.p)
        for start in range(0, len(combos), _CHUNK):
            if best is not None and extra + sizes[start] > best[0][0]:
                break
            sl = slice(start, start + _CHUNK)
            flat = base - dv_vec[ci[sl]] @ pv + av_vec[cj[sl]] @ pw
            pos = tsmr_winner_positions(flat.reshape(-1, m, m), order)
            hit = (pos == p_pos) if constructive else (pos != p_pos)
            if hit.any():
                t = start + int(np.argmax(hit))
                i, j = combos[t]
                key = (extra + int(sizes[t]), dv_idx[i], av_idx[j], dc, ac)
                if best is None or key < best[0]:
                    best = (key, ControlSolution(dv_idx[i], av_idx[j], dc, ac))
                break
    return None if best is None else best[1]


# -- polynomial algorithms --------------------------------------------------


def _forced_deletions(counts: np.ndarray, c: int, a: Agenda) -> list[int]:
    """Candidates that every deletion set making ``c`` win must contain."""
    beats = counts > counts.T
    preds = a.predecessors(c)
    deleted = [x for x in preds if beats[x, c]]
    kept = [x for x in preds if not beats[x, c]] + [c]
    for s in a.successors(c):
        if any(beats[x, s] for x in kept):
            kept.append(s)
        else:
            deleted.append(s)
    return deleted


def ccdc_greedy(e: Election, p: int, a: Agenda, k: int) -> Optional[ControlSolution]:
    """Delete p's beaters among its predecessors, then every successor left unbeaten.

    Each deletion is forced, so the resulting set is the unique minimum.
    """
    a.check(e.m)
    deleted = _forced_deletions(tally(e), p, a)
    if len(deleted) > k:
        return None
    return ControlSolution(deleted_candidates=tuple(sorted(deleted)))


def dcdc(e: Election, p: int, a: Agenda, k: int) -> Optional[ControlSolution]:
    """Make some rival win by deleting at most ``k`` candidates other than ``p``.

    The minimal deletion set for rival ``c`` is forced (see
    :func:`ccdc_greedy`); a rival whose forced set contains ``p`` cannot win.
    """
    a.check(e.m)
    counts = tally(e)
    if tsmr_winner_counts(counts, a.order) != p:
        return ControlSolution()
    best = None
    for c in range(e.m):
        if c == p:
            continue
        forced = _forced_deletions(counts, c, a)
        if p in forced or len(forced) > k:
            continue
        if best is None or len(forced) < len(best):
            best = forced
    return None if best is None else ControlSolution(deleted_candidates=tuple(sorted(best)))


def _require(inst: ControlInstance, *variants: Variant) -> Variant:
    for v in variants:
        if inst.matches(v):
            return v
    names = "/".join(v.value for v in variants)
    raise PreconditionError(f"instance is not a {names} instance")


def dcac(inst: ControlInstance) -> Optional[ControlSolution]:
    """Destructive control by adding candidates; one added candidate always suffices."""
    _require(inst, Variant.DCAC)
    counts = tally(Election(inst.candidates, inst.votes))
    registered = inst.registered
    base_order = [c for c in inst.agenda.order if c in set(registered)]
    if tsmr_winner_counts(counts, base_order) != inst.p:
        return ControlSolution()
    if inst.k_ac == 0:
        return None
    beats = counts > counts.T
    pos = inst.agenda.position
    p = inst.p
    for c in sorted(inst.unregistered):
        if pos[c] < pos[p]:
            if beats[c, p]:
                return ControlSolution(added_candidates=(c,))
        elif not any(beats[x, c] for x in registered if pos[x] < pos[c]):
            return ControlSolution(added_candidates=(c,))
    return None


def destructive_votes_p_last(inst: ControlInstance) -> Optional[ControlSolution]:
    """DCAV/DCDV when ``p`` closes the agenda.

    Then ``p`` wins exactly when no rival beats it, so the cheapest rival to
    push past ``p`` decides: each added ballot ranking the rival over ``p``
    (or deleted ballot ranking ``p`` over the rival) moves the margin by one.
    """
    variant = _require(inst, Variant.DCAV, Variant.DCDV)
    if inst.agenda.order[-1] != inst.p:
        raise PreconditionError("precondition: p last")
    p = inst.p
    counts = tally(Election(inst.candidates, inst.votes))
    if tsmr_winner_counts(counts, inst.agenda.order) != p:
        return ControlSolution()
    adding = variant is Variant.DCAV
    pool = _expand(inst.unregistered_votes if adding else inst.votes)
    budget = inst.k_av if adding else inst.k_dv
    best = None
    for c in range(inst.m):
        if c == p:
            continue
        need = int(counts[p, c] - counts[c, p]) + 1
        if adding:
            usable = [i for i, r in enumerate(pool) if r.index(c) < r.index(p)]
        else:
            usable = [i for i, r in enumerate(pool) if r.index(p) < r.index(c)]
        if need <= budget and need <= len(usable):
            if best is None or need < len(best):
                best = tuple(usable[:need])
    if best is None:
        return None
    return ControlSolution(added_votes=best) if adding else ControlSolution(deleted_votes=best)


def ccac_immunity_check(inst: ControlInstance, cap: int = IMMUNITY_CAP) -> bool:
    """True iff no set of added candidates turns a losing ``p`` into the winner."""
    if inst.agenda.order[-1] != inst.p:
        raise PreconditionError("precondition: p last")
    if len(inst.unregistered) > cap:
        raise CapExceeded(f"|D| = {len(inst.unregistered)} > {cap}", len(inst.unregistered), cap)
    counts = tally(Election(inst.candidates, inst.votes))
    registered = set(inst.registered)

    def wins(extra: tuple[int, ...]) -> bool:
        active = registered | set(extra)
        return tsmr_winner_counts(counts, [c for c in inst.agenda.order if c in active]) == inst.p

    if wins(()):
        return True
    return not any(wins(d) for d in _subsets(sorted(inst.unregistered), len(inst.unregistered)))


POLYNOMIAL = (Variant.CCDC, Variant.DCDC, Variant.DCAC)


def solve(inst: ControlInstance, variant: Variant | str | None = None, exact: bool = False,
          cap: int = EXACT_CAP) -> Optional[ControlSolution]:
    """Dispatch to a polynomial algorithm when one applies, else the exact search."""
    if variant is not None:
        variant = Variant(variant)
        if not inst.matches(variant):
            raise PreconditionError(f"instance budgets do not match variant {variant.value}")
    else:
        variant = inst.variant
    if exact or variant is None:
        return solve_exact(inst, cap)
    if variant is Variant.CCDC:
        return ccdc_greedy(inst.base_election(), *_registered_view(inst), inst.k_dc)
    if variant is Variant.DCDC:
        return dcdc(inst.base_election(), *_registered_view(inst), inst.k_dc)
    if variant is Variant.DCAC:
        return dcac(inst)
    if variant in (Variant.DCAV, Variant.DCDV) and inst.agenda.order[-1] == inst.p:
        return destructive_votes_p_last(inst)
    return solve_exact(inst, cap)


def _registered_view(inst: ControlInstance) -> tuple[int, Agenda]:
    """Distinguished id and agenda in the registered-only roster (identity when D is empty)."""
    if inst.unregistered:
        raise PreconditionError("candidate-deletion variants take no unregistered candidates")
    return inst.p, inst.agenda
