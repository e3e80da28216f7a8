"""Election, agenda and tally data model.

Candidates are dense integer ids ``0..m-1``; labels only matter at the I/O
boundary. Every value here is immutable once built.

Wherever an arbitrary but fixed order over a candidate subset is needed
(``->S`` in ballot templates), the library uses ascending candidate id and
its reverse for ``<-S``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from tsmr.errors import PreconditionError

Pair = tuple[int, int]


def transitive_closure(pairs: Iterable[Pair], m: int) -> frozenset[Pair]:
    """Close a strict order relation over ``range(m)``.

    Raises PreconditionError when the relation contains a cycle (including
    a self-loop) or mentions an id outside the roster.
    """
    succ: list[set[int]] = [set() for _ in range(m)]
    for a, b in pairs:
        if not (0 <= a < m and 0 <= b < m):
            raise PreconditionError(f"constraint ({a}, {b}) outside roster of size {m}")
        if a == b:
            raise PreconditionError(f"reflexive constraint on candidate {a}")
        succ[a].add(b)
    closed: set[Pair] = set()
    for a in range(m):
        seen: set[int] = set()
        stack = list(succ[a])
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            stack.extend(succ[b])
        if a in seen:
            raise PreconditionError(f"cyclic constraints through candidate {a}")
        closed.update((a, b) for b in seen)
    return frozenset(closed)


def ranking_matrix(ranking: Sequence[int], m: int) -> np.ndarray:
    """0/1 matrix with ``M[a, b] = 1`` iff ``a`` precedes ``b`` in ``ranking``."""
    pos = np.empty(m, dtype=np.int64)
    pos[list(ranking)] = np.arange(m)
    return (pos[:, None] < pos[None, :]).astype(np.int64)


@dataclass(frozen=True)
class Vote:
    """A complete ranking, most preferred first, cast ``count`` times."""

    ranking: tuple[int, ...]
    count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(int(c) for c in self.ranking))
        if self.count < 1:
            raise PreconditionError(f"vote multiplicity must be positive, got {self.count}")

    def prefers(self, a: int, b: int) -> bool:
        return self.ranking.index(a) < self.ranking.index(b)


@dataclass(frozen=True)
class Election:
    candidates: tuple[str, ...]
    votes: tuple[Vote, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "votes", tuple(self.votes))
        if len(set(self.candidates)) != len(self.candidates):
            raise PreconditionError("candidate labels must be unique")
        full = set(range(len(self.candidates)))
        for v in self.votes:
            if len(v.ranking) != len(full) or set(v.ranking) != full:
                raise PreconditionError(f"vote {v.ranking} is not a permutation of the roster")

    @classmethod
    def from_rankings(cls, candidates: Sequence[str], rankings: Iterable[Sequence]) -> Election:
        """Build from label (or id) rankings, one entry per ballot."""
        candidates = tuple(candidates)
        index = {c: i for i, c in enumerate(candidates)}
        votes = []
        for r in rankings:
            votes.append(Vote(tuple(index[c] if isinstance(c, str) else c for c in r)))
        return cls(candidates, tuple(votes))

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return sum(v.count for v in self.votes)

    def index(self, label: str) -> int:
        try:
            return self.candidates.index(label)
        except ValueError:
            raise PreconditionError(f"unknown candidate {label!r}") from None

    def label(self, c: int) -> str:
        return self.candidates[c]

    def expanded(self) -> list[tuple[int, ...]]:
        """One ranking per ballot, multiplicities unrolled in file order."""
        return [v.ranking for v in self.votes for _ in range(v.count)]

    def with_votes(self, votes: Iterable[Vote]) -> Election:
        return Election(self.candidates, tuple(votes))


@dataclass(frozen=True)
class Agenda:
    """A linear priority order; earlier entries are predecessors."""

    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(c) for c in self.order))
        if len(set(self.order)) != len(self.order):
            raise PreconditionError(f"agenda {self.order} repeats a candidate")

    @classmethod
    def from_labels(cls, election: Election, labels: Iterable[str]) -> Agenda:
        return cls(tuple(election.index(x) for x in labels))

    @cached_property
    def position(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.order)}

    def __len__(self) -> int:
        return len(self.order)

    def predecessors(self, c: int) -> tuple[int, ...]:
        return self.order[: self.position[c]]

    def successors(self, c: int) -> tuple[int, ...]:
        return self.order[self.position[c] + 1 :]

    def check(self, m: int) -> None:
        if sorted(self.order) != list(range(m)):
            raise PreconditionError(f"agenda {self.order} is not a permutation of {m} candidates")


@dataclass(frozen=True)
class MajorityGraph:
    """Oriented graph with an arc ``a -> b`` iff ``a`` beats ``b``."""

    m: int
    arcs: frozenset[Pair] = field(default_factory=frozenset)

    @classmethod
    def from_counts(cls, counts: np.ndarray) -> MajorityGraph:
        beats = counts > counts.T
        return cls(counts.shape[0], frozenset((int(a), int(b)) for a, b in zip(*np.nonzero(beats))))

    def beats(self, a: int, b: int) -> bool:
        return (a, b) in self.arcs

    def in_neighbors(self, c: int) -> set[int]:
        return {a for a, b in self.arcs if b == c}

    def out_neighbors(self, c: int) -> set[int]:
        return {b for a, b in self.arcs if a == c}

    def out_of(self, s: Iterable[int]) -> set[int]:
        """Out-neighbours of a vertex set, excluding the set itself."""
        s = set(s)
        return {b for a, b in self.arcs if a in s} - s


def tally(e: Election) -> np.ndarray:
    """Pairwise counts: ``counts[a, b]`` ballots rank ``a`` before ``b``."""
    counts = np.zeros((e.m, e.m), dtype=np.int64)
    for v in e.votes:
        counts += v.count * ranking_matrix(v.ranking, e.m)
    return counts


def majority_graph(e: Election) -> MajorityGraph:
    return MajorityGraph.from_counts(tally(e))


def forward_graph(g: MajorityGraph, a: Agenda) -> MajorityGraph:
    """Keep only the arcs whose tail precedes their head in ``a``."""
    if len(a) != g.m:
        raise PreconditionError(f"agenda covers {len(a)} candidates, graph has {g.m}")
    a.check(g.m)
    pos = a.position
    return MajorityGraph(g.m, frozenset((x, y) for x, y in g.arcs if pos[x] < pos[y]))


def tied_pairs(e: Election) -> list[Pair]:
    counts = tally(e)
    return [(a, b) for a in range(e.m) for b in range(a + 1, e.m) if counts[a, b] == counts[b, a]]


def restriction_map(keep: Iterable[int]) -> tuple[int, ...]:
    """Old ids of the restricted roster; new id ``i`` is old id ``result[i]``."""
    kept = tuple(sorted(set(keep)))
    if not kept:
        raise PreconditionError("empty restriction")
    return kept


def restrict(e: Election, keep: Iterable[int]) -> Election:
    """Drop candidates outside ``keep``; ballots keep their relative order."""
    kept = restriction_map(keep)
    new_id = {old: new for new, old in enumerate(kept)}
    votes = tuple(
        Vote(tuple(new_id[c] for c in v.ranking if c in new_id), v.count) for v in e.votes
    )
    return Election(tuple(e.candidates[c] for c in kept), votes)


def restrict_agenda(a: Agenda, keep: Iterable[int]) -> Agenda:
    """Same re-indexing as :func:`restrict`."""
    kept = restriction_map(keep)
    new_id = {old: new for new, old in enumerate(kept)}
    return Agenda(tuple(new_id[c] for c in a.order if c in new_id))


@dataclass(frozen=True)
class PartialVote:
    """A strict partial order stored transitively closed."""

    constraints: frozenset[Pair]
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise PreconditionError(f"vote multiplicity must be positive, got {self.count}")

    @classmethod
    def build(cls, m: int, pairs: Iterable[Pair] = (), count: int = 1) -> PartialVote:
        return cls(transitive_closure(pairs, m), count)

    @classmethod
    def from_chains(cls, m: int, chains: Iterable[Sequence[int]], count: int = 1) -> PartialVote:
        pairs = [(ch[i], ch[i + 1]) for ch in chains for i in range(len(ch) - 1)]
        return cls.build(m, pairs, count)

    @classmethod
    def from_ranking(cls, ranking: Sequence[int], count: int = 1) -> PartialVote:
        return cls.from_chains(len(ranking), [ranking], count)

    def is_complete(self, m: int) -> bool:
        return len(self.constraints) == m * (m - 1) // 2


@dataclass(frozen=True)
class PartialElection:
    candidates: tuple[str, ...]
    votes: tuple[PartialVote, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "votes", tuple(self.votes))
        m = len(self.candidates)
        for v in self.votes:
            for a, b in v.constraints:
                if not (0 <= a < m and 0 <= b < m):
                    raise PreconditionError(f"constraint ({a}, {b}) outside roster")

    @classmethod
    def from_election(cls, e: Election) -> PartialElection:
        return cls(e.candidates, tuple(PartialVote.from_ranking(v.ranking, v.count) for v in e.votes))

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return sum(v.count for v in self.votes)

    def index(self, label: str) -> int:
        try:
            return self.candidates.index(label)
        except ValueError:
            raise PreconditionError(f"unknown candidate {label!r}") from None


@dataclass(frozen=True)
class PartialAgenda:
    constraints: frozenset[Pair] = frozenset()

    @classmethod
    def build(cls, m: int, pairs: Iterable[Pair] = ()) -> PartialAgenda:
        return cls(transitive_closure(pairs, m))

    @classmethod
    def from_agenda(cls, a: Agenda) -> PartialAgenda:
        o = a.order
        return cls(frozenset((o[i], o[j]) for i in range(len(o)) for j in range(i + 1, len(o))))

    def is_total(self, m: int) -> bool:
        return len(self.constraints) == m * (m - 1) // 2

    def as_agenda(self, m: int) -> Agenda:
        """The unique linear extension of a total order."""
        if not self.is_total(m):
            raise PreconditionError("partial agenda is not a total order")
        preds = [0] * m
        for a, b in self.constraints:
            preds[b] += 1
        return Agenda(tuple(sorted(range(m), key=lambda c: preds[c])))
