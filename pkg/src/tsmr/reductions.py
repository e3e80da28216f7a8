"""Red-Blue Dominating Set instances and the compilers that turn them into
TSMR control and possible-winner instances.

Each compiler emits the exact candidate set, agenda, ballots and budget of
one hardness construction, together with a certificate map sending a
dominating blue set to the matching solution of the target instance.
:func:`verify_reduction` checks yes/no equivalence exhaustively on small
graphs.
"""

from __future__ import annotations

import enum
import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from tsmr.control import ControlInstance, ControlSolution, Mode, solve_exact, verify_solution
from tsmr.core import (
    Agenda,
    Election,
    PartialAgenda,
    PartialElection,
    PartialVote,
    Vote,
)
from tsmr.errors import CapExceeded, PreconditionError
from tsmr.partial import CompletionBudget, possible_winner_exact
from tsmr.rules import tsmr_winner

RBDS_CAP = 20


@dataclass(frozen=True)
class RbdsInstance:
    """Bipartite graph on red and blue vertices; ``edges`` holds (blue, red) index pairs."""

    red: tuple[str, ...]
    blue: tuple[str, ...]
    edges: frozenset[tuple[int, int]]
    kappa: int

    def __post_init__(self):
        object.__setattr__(self, "red", tuple(self.red))
        object.__setattr__(self, "blue", tuple(self.blue))
        object.__setattr__(self, "edges", frozenset(self.edges))
        if len(set(self.red) | set(self.blue)) != len(self.red) + len(self.blue):
            raise PreconditionError("vertex labels must be unique")
        for b, r in self.edges:
            if not (0 <= b < len(self.blue) and 0 <= r < len(self.red)):
                raise PreconditionError(f"edge ({b}, {r}) must join a blue vertex to a red vertex")
        if not 1 <= self.kappa <= len(self.blue):
            raise PreconditionError(f"kappa must satisfy 1 <= kappa <= |B|, got {self.kappa}")

    @classmethod
    def from_labels(cls, red, blue, edges: Iterable[tuple[str, str]], kappa: int) -> RbdsInstance:
        red, blue = tuple(red), tuple(blue)
        bi = {b: i for i, b in enumerate(blue)}
        ri = {r: i for i, r in enumerate(red)}
        try:
            pairs = frozenset((bi[b], ri[r]) for b, r in edges)
        except KeyError as exc:
            raise PreconditionError(f"edge mentions unknown or wrong-coloured vertex {exc}") from None
        return cls(red, blue, pairs, kappa)

    def neighbors(self, b: int) -> frozenset[int]:
        return frozenset(r for x, r in self.edges if x == b)

    def red_degree(self, r: int) -> int:
        return sum(1 for _, y in self.edges if y == r)

    def blue_degree(self, b: int) -> int:
        return sum(1 for x, _ in self.edges if x == b)

    def has_isolated(self) -> bool:
        return any(self.red_degree(r) == 0 for r in range(len(self.red))) or any(
            self.blue_degree(b) == 0 for b in range(len(self.blue))
        )

    def red_regularity(self) -> Optional[int]:
        """Common red degree, or None when red degrees differ."""
        degrees = {self.red_degree(r) for r in range(len(self.red))}
        return degrees.pop() if len(degrees) == 1 else None

    def dominates(self, blues: Iterable[int]) -> bool:
        covered = {r for b, r in self.edges if b in set(blues)}
        return len(covered) == len(self.red)


def rbds_brute(inst: RbdsInstance, cap: int = RBDS_CAP) -> Optional[tuple[int, ...]]:
    """Lexicographically first dominating blue subset of size kappa."""
    if len(inst.blue) > cap:
        raise CapExceeded(f"|B| = {len(inst.blue)} > {cap}", len(inst.blue), cap)
    for subset in itertools.combinations(range(len(inst.blue)), inst.kappa):
        if inst.dominates(subset):
            return subset
    return None


def normalize_rbds(inst: RbdsInstance) -> RbdsInstance:
    """Pad low-degree red vertices with fresh pendant blue vertices.

    Afterwards every red vertex has the maximum red degree. Fresh blues never
    help a minimum dominating set, so the yes/no answer is unchanged.
    """
    degrees = [inst.red_degree(r) for r in range(len(inst.red))]
    if any(d == 0 for d in degrees):
        raise PreconditionError("unsatisfiable red vertex: isolated red vertices have no dominator")
    top = max(degrees, default=0)
    blue = list(inst.blue)
    edges = set(inst.edges)
    taken = set(inst.red) | set(inst.blue)
    for r, d in enumerate(degrees):
        for j in range(top - d):
            label = f"{inst.red[r]}.pad{j + 1}"
            while label in taken:
                label += "_"
            taken.add(label)
            blue.append(label)
            edges.add((len(blue) - 1, r))
    return RbdsInstance(inst.red, tuple(blue), frozenset(edges), inst.kappa)


def mcgarvey(candidates: Sequence[str], arcs: Iterable[tuple[int, int]]) -> Election:
    """Ballots whose majority graph is exactly ``arcs``.

    Each arc ``a -> b`` contributes ``a b rest`` and ``reversed(rest) a b``,
    which gives ``a`` a 2-0 edge over ``b`` and cancels on every other pair.
    """
    m = len(candidates)
    arcs = sorted(set(arcs))
    seen = set(arcs)
    rankings = []
    for a, b in arcs:
        if a == b or (b, a) in seen:
            raise PreconditionError(f"arc set must be antisymmetric and irreflexive; offending pair ({a}, {b})")
        rest = [c for c in range(m) if c not in (a, b)]
        rankings.append((a, b, *rest))
        rankings.append((*reversed(rest), a, b))
    return Election(tuple(candidates), tuple(Vote(r) for r in rankings))


# -- reduction compilers ----------------------------------------------------


class ReductionId(str, enum.Enum):
    CCAV_FIRST = "ccav-first"
    CCAV_LAST = "ccav-last"
    CCDV_FIRST_K = "ccdv-first-k"
    CCDV_FIRST_DUAL = "ccdv-first-dual"
    CCDV_LAST_K = "ccdv-last-k"
    CCDV_LAST_DUAL = "ccdv-last-dual"
    CCAC_FIRST = "ccac-first"
    DCAV_NONLAST = "dcav-nonlast"
    DCDV_K = "dcdv-k"
    DCDV_DUAL = "dcdv-dual"
    PW_FIRST = "pw-first"
    PW_PENULTIMATE = "pw-penultimate"

    @property
    def theorem(self) -> str:
        return _THEOREMS[self]

    @property
    def needs_regular(self) -> bool:
        return self in _REGULAR

    @property
    def min_kappa(self) -> int:
        return 4 if self in (ReductionId.CCDV_FIRST_K, ReductionId.CCDV_LAST_K, ReductionId.DCDV_K) else 1

    @property
    def is_partial(self) -> bool:
        return self in (ReductionId.PW_FIRST, ReductionId.PW_PENULTIMATE)


_THEOREMS = {
    ReductionId.CCAV_FIRST: "ccav-hard",
    ReductionId.CCAV_LAST: "ccav-hard-last",
    ReductionId.CCDV_FIRST_K: "ccdv-hard-deleted-first",
    ReductionId.CCDV_FIRST_DUAL: "ccdv-hard-first",
    ReductionId.CCDV_LAST_K: "ccdv-hard",
    ReductionId.CCDV_LAST_DUAL: "ccdv-wbh-not-deleted-last",
    ReductionId.CCAC_FIRST: "ccac-hard",
    ReductionId.DCAV_NONLAST: "dcav-hard-first",
    ReductionId.DCDV_K: "dcdv-hard-deleted-first",
    ReductionId.DCDV_DUAL: "dcdv-wbh-not-deleted-first",
    ReductionId.PW_FIRST: "possible-hard",
    ReductionId.PW_PENULTIMATE: "possible-hard-second-last",
}

_REGULAR = {
    ReductionId.CCDV_FIRST_K,
    ReductionId.CCDV_FIRST_DUAL,
    ReductionId.CCDV_LAST_K,
    ReductionId.DCDV_K,
    ReductionId.PW_FIRST,
    ReductionId.PW_PENULTIMATE,
}


@dataclass(frozen=True)
class PartialInstance:
    """Possible-winner input: partial votes, a partial agenda, a distinguished candidate."""

    election: PartialElection
    agenda: PartialAgenda
    p: int


Certificate = Callable[[Sequence[int]], Union[ControlSolution, Election]]


@dataclass(frozen=True)
class ReductionOutput:
    which: ReductionId
    source: RbdsInstance
    instance: Union[ControlInstance, PartialInstance]
    certificate: Certificate = field(compare=False, repr=False)

    def certify(self, blues: Sequence[int]) -> bool:
        """Does the image of a blue set solve the target instance?"""
        image = self.certificate(tuple(blues))
        if isinstance(self.instance, ControlInstance):
            return verify_solution(self.instance, image)
        return completes(self.instance.election, image) and (
            tsmr_winner(image, self.instance.agenda.as_agenda(image.m)) == self.instance.p
        )


def completes(pe: PartialElection, e: Election) -> bool:
    """Is ``e`` a completion of ``pe``, vote for vote?"""
    if e.candidates != pe.candidates or len(e.votes) != len(pe.votes):
        return False
    for pv, v in zip(pe.votes, e.votes):
        pos = {c: i for i, c in enumerate(v.ranking)}
        if v.count != pv.count or any(pos[a] > pos[b] for a, b in pv.constraints):
            return False
    return True


def check_preconditions(r: RbdsInstance, which: ReductionId | str) -> None:
    which = ReductionId(which)
    if r.has_isolated():
        raise PreconditionError(f"{which.theorem}: the graph must have no isolated vertices")
    if r.kappa < which.min_kappa:
        raise PreconditionError(f"{which.theorem}: requires kappa >= {which.min_kappa}")
    if which.needs_regular and r.red_regularity() is None:
        raise PreconditionError(
            f"{which.theorem}: every red vertex must have the same degree (apply normalize_rbds first)"
        )


class _Build:
    """Roster and ballot helpers shared by the compilers.

    Special candidates come first, then red vertices, then blue vertices, so
    ascending id order on R and B follows the input order.
    """

    def __init__(self, r: RbdsInstance, specials: Sequence[str], with_blue: bool = False):
        self.r = r
        clash = set(specials) & (set(r.red) | set(r.blue))
        red = [f"R.{x}" for x in r.red] if clash else list(r.red)
        blue = [f"B.{x}" for x in r.blue] if clash else list(r.blue)
        self.labels = tuple(specials) + tuple(red) + (tuple(blue) if with_blue else ())
        self.id = {s: i for i, s in enumerate(specials)}
        base = len(specials)
        self.R = list(range(base, base + len(r.red)))
        self.B = list(range(base + len(r.red), base + len(r.red) + len(r.blue))) if with_blue else []
        self.ell = r.red_regularity() or 0
        self.kappa = r.kappa
        self.votes: list[Vote] = []
        self.offsets: dict[str, int] = {}
        self._n = 0

    def __getitem__(self, name: str) -> int:
        return self.id[name]

    def N(self, b: int) -> set[int]:
        return {self.R[x] for x in self.r.neighbors(b)}

    def fwd(self, subset=None) -> list[int]:
        return [c for c in self.R if subset is None or c in subset]

    def bwd(self, subset=None) -> list[int]:
        return self.fwd(subset)[::-1]

    def fwd_minus(self, exclude) -> list[int]:
        return [c for c in self.R if c not in exclude]

    def bwd_minus(self, exclude) -> list[int]:
        return self.fwd_minus(exclude)[::-1]

    def ranking(self, *parts) -> tuple[int, ...]:
        out: list[int] = []
        for part in parts:
            if isinstance(part, str):
                out.append(self.id[part])
            elif isinstance(part, int):
                out.append(part)
            else:
                out.extend(part)
        assert sorted(out) == list(range(len(self.labels))), out
        return tuple(out)

    def add(self, count: int, *parts, tag: Optional[str] = None) -> None:
        if tag is not None:
            self.offsets[tag] = self._n
        if count > 0:
            self.votes.append(Vote(self.ranking(*parts), count))
            self._n += count

    def agenda(self, *parts) -> Agenda:
        return Agenda(self.ranking(*parts))


def _blue_votes(n_blue: int, offset: int, chosen: Sequence[int], complement: bool) -> tuple[int, ...]:
    chosen = set(chosen)
    picked = [b for b in range(n_blue) if (b not in chosen) == complement]
    return tuple(offset + b for b in picked)


def _ccav_first(r: RbdsInstance) -> ReductionOutput:
    s = _Build(r, ["p"], with_blue=True)
    k = r.kappa
    s.add(k, s.B[::-1], s.bwd(), "p")
    s.add(1, s.bwd(), "p", s.B[::-1])
    w = []
    for b in range(len(r.blue)):
        nb = s.N(b)
        w.append(Vote(s.ranking("p", s.bwd_minus(nb), s.B[b], s.bwd(nb), [x for x in s.B[::-1] if x != s.B[b]])))
    inst = ControlInstance(
        s.labels, tuple(s.votes), s["p"], s.agenda("p", s.B, s.R), unregistered_votes=tuple(w), k_av=k
    )
    return ReductionOutput(
        ReductionId.CCAV_FIRST, r, inst, lambda bs: ControlSolution(added_votes=tuple(sorted(bs)))
    )


def _ccav_last(r: RbdsInstance) -> ReductionOutput:
    s = _Build(r, ["p", "q"])
    k = r.kappa
    s.add(k - 1, "q", "p", s.fwd())
    s.add(1, "q", s.fwd(), "p")
    w = [Vote(s.ranking(s.fwd_minus(s.N(b)), "p", s.fwd(s.N(b)), "q")) for b in range(len(r.blue))]
    inst = ControlInstance(
        s.labels, tuple(s.votes), s["p"], s.agenda(s.R, "q", "p"), unregistered_votes=tuple(w), k_av=k
    )
    return ReductionOutput(
        ReductionId.CCAV_LAST, r, inst, lambda bs: ControlSolution(added_votes=tuple(sorted(bs)))
    )


def _ccdv_first_k(r: RbdsInstance) -> ReductionOutput:
    s = _Build(r, ["p", "q", "q'"])
    k, ell, nb = r.kappa, s.ell, len(r.blue)
    s.add(ell + 1, "q'", "p", "q", s.bwd())
    s.add(k + ell - 2, "q", "p", s.bwd(), "q'")
    s.add(nb - k + 1, s.bwd(), "p", "q", "q'")
    s.add(1, s.bwd(), "q", "p", "q'")
    s.add(k - 2, s.bwd(), "q'", "p", "q")
    s.offsets["blue"] = s._n
    for b in range(nb):
        s.add(1, "q", "q'", s.bwd(s.N(b)), "p", s.bwd_minus(s.N(b)))
    inst = ControlInstance(s.labels, tuple(s.votes), s["p"], s.agenda("p", "q'", s.R, "q"), k_dv=k)
    off = s.offsets["blue"]
    return ReductionOutput(
        ReductionId.CCDV_FIRST_K, r, inst,
        lambda bs: ControlSolution(deleted_votes=_blue_votes(nb, off, bs, complement=False)),
    )


def _ccdv_first_dual(r: RbdsInstance) -> ReductionOutput:
    s = _Build(r, ["p", "q"])
    k, nb = r.kappa, len(r.blue)
    s.add(k, "p", "q", s.bwd())
    s.add(1, s.bwd(), "p", "q")
    s.offsets["blue"] = s._n
    for b in range(nb):
        s.add(1, "q", s.bwd_minus(s.N(b)), "p", s.bwd(s.N(b)))
    inst = ControlInstance(s.labels, tuple(s.votes), s["p"], s.agenda("p", s.R, "q"), k_dv=nb - k)
    off = s.offsets["blue"]
    return ReductionOutput(
        ReductionId.CCDV_FIRST_DUAL, r, inst,
        lambda bs: ControlSolution(deleted_votes=_blue_votes(nb, off, bs, complement=True)),
    )


def _ccdv_last_k(r: RbdsInstance, which=ReductionId.CCDV_LAST_K) -> ReductionOutput:
    s = _Build(r, ["p", "q"])
    k, ell, nb = r.kappa, s.ell, len(r.blue)
    s.add(nb + 1, s.bwd(), "p", "q")
    s.add(ell + k, "q", "p", s.bwd())
    s.add(ell - 1, "p", "q", s.bwd())
    s.offsets["blue"] = s._n
    for b in range(nb):
        s.add(1, "q", s.bwd(s.N(b)), "p", s.bwd_minus(s.N(b)))
    destructive = which is ReductionId.DCDV_K
    inst = ControlInstance(
        s.labels, tuple(s.votes), s["q"] if destructive else s["p"], s.agenda(s.R, "q", "p"), k_dv=k,
        mode=Mode.DESTRUCTIVE if destructive else Mode.CONSTRUCTIVE,
    )
    off = s.offsets["blue"]
    return ReductionOutput(
        which, r, inst, lambda bs: ControlSolution(deleted_votes=_blue_votes(nb, off, bs, complement=False))
    )


def _ccdv_last_dual(r: RbdsInstance, which=ReductionId.CCDV_LAST_DUAL) -> ReductionOutput:
    s = _Build(r, ["p", "q"])
    k, nb = r.kappa, len(r.blue)
    s.add(k - 1, "p", "q", s.fwd())
    s.add(1, s.fwd(), "p", "q")
    s.offsets["blue"] = s._n
    for b in range(nb):
        s.add(1, "q", s.fwd_minus(s.N(b)), "p", s.fwd(s.N(b)))
    destructive = which is ReductionId.DCDV_DUAL
    inst = ControlInstance(
        s.labels, tuple(s.votes), s["q"] if destructive else s["p"], s.agenda(s.R, "q", "p"), k_dv=nb - k,
        mode=Mode.DESTRUCTIVE if destructive else Mode.CONSTRUCTIVE,
    )
    off = s.offsets["blue"]
    return ReductionOutput(
        which, r, inst, lambda bs: ControlSolution(deleted_votes=_blue_votes(nb, off, bs, complement=True))
    )


def _ccac_first(r: RbdsInstance) -> ReductionOutput:
    s = _Build(r, ["p"], with_blue=True)
    p = s["p"]
    arcs = {(s.R[j], s.R[i]) for j in range(len(s.R)) for i in range(j)}
    arcs |= {(x, p) for x in s.R}
    arcs |= {(p, b) for b in s.B}
    for bi, b in enumerate(s.B):
        nb = s.N(bi)
        arcs |= {(b, x) if x in nb else (x, b) for x in s.R}
    e = mcgarvey(s.labels, arcs)
    inst = ControlInstance(
        s.labels, e.votes, p, s.agenda("p", s.B, s.R), unregistered=frozenset(s.B), k_ac=r.kappa
    )
    blue_ids = s.B
    return ReductionOutput(
        ReductionId.CCAC_FIRST, r, inst,
        lambda bs: ControlSolution(added_candidates=tuple(sorted(blue_ids[b] for b in bs))),
    )


def _dcav_nonlast(r: RbdsInstance) -> ReductionOutput:
    s = _Build(r, ["p", "q"])
    k = r.kappa
    s.add(k - 1, "p", "q", s.fwd())
    s.add(2, "p", s.fwd(), "q")
    s.add(1, "q", "p", s.fwd())
    w = [Vote(s.ranking(s.fwd_minus(s.N(b)), "q", "p", s.fwd(s.N(b)))) for b in range(len(r.blue))]
    inst = ControlInstance(
        s.labels, tuple(s.votes), s["p"], s.agenda("p", s.R, "q"), unregistered_votes=tuple(w), k_av=k,
        mode=Mode.DESTRUCTIVE,
    )
    return ReductionOutput(
        ReductionId.DCAV_NONLAST, r, inst, lambda bs: ControlSolution(added_votes=tuple(sorted(bs)))
    )


def _pw_first(r: RbdsInstance) -> ReductionOutput:
    s = _Build(r, ["p", "q"])
    k, ell, nb = r.kappa, s.ell, len(r.blue)
    m = len(s.labels)
    partial = [
        PartialVote.from_chains(
            m, [s.bwd(s.N(b)) + [s["p"]] + s.bwd_minus(s.N(b)), [s["q"]] + s.bwd_minus(s.N(b))]
        )
        for b in range(nb)
    ]
    s.add(nb, s.bwd(), "q", "p")
    s.add(2 * ell + k, "q", s.bwd(), "p")
    s.add(ell + 2 * k + 1, s.bwd(), "p", "q")
    s.add(ell + k, "p", "q", s.bwd())
    fixed = tuple(PartialVote.from_ranking(v.ranking, v.count) for v in s.votes)
    pe = PartialElection(s.labels, tuple(partial) + fixed)
    pa = PartialAgenda.from_agenda(s.agenda("p", "q", s.R))

    def certificate(bs):
        chosen = set(bs)
        out = []
        for b in range(nb):
            nbh = s.N(b)
            if b in chosen:
                out.append(Vote(s.ranking("q", s.bwd(nbh), "p", s.bwd_minus(nbh))))
            else:
                out.append(Vote(s.ranking(s.bwd(nbh), "p", "q", s.bwd_minus(nbh))))
        return Election(s.labels, tuple(out) + tuple(s.votes))

    return ReductionOutput(ReductionId.PW_FIRST, r, PartialInstance(pe, pa, s["p"]), certificate)


def _pw_penultimate(r: RbdsInstance) -> ReductionOutput:
    s = _Build(r, ["p", "q", "q'"])
    k, nb = r.kappa, len(r.blue)
    m = len(s.labels)
    partial = [
        PartialVote.from_chains(
            m, [s.fwd_minus(s.N(b)) + [s["q'"]], [s["q"], s["p"]] + s.fwd(s.N(b))]
        )
        for b in range(nb)
    ]
    s.add(nb + 1, "q'", "q", s.fwd(), "p")
    s.add(2 * k, "q", "p", s.fwd(), "q'")
    s.add(k, "q", "p", "q'", s.fwd())
    s.add(k, s.fwd(), "p", "q'", "q")
    fixed = tuple(PartialVote.from_ranking(v.ranking, v.count) for v in s.votes)
    pe = PartialElection(s.labels, tuple(partial) + fixed)
    pa = PartialAgenda.from_agenda(s.agenda("q'", s.R, "p", "q"))

    def certificate(bs):
        chosen = set(bs)
        out = []
        for b in range(nb):
            nbh = s.N(b)
            if b in chosen:
                out.append(Vote(s.ranking(s.fwd_minus(nbh), "q'", "q", "p", s.fwd(nbh))))
            else:
                out.append(Vote(s.ranking("q", "p", s.fwd_minus(nbh), "q'", s.fwd(nbh))))
        return Election(s.labels, tuple(out) + tuple(s.votes))

    return ReductionOutput(ReductionId.PW_PENULTIMATE, r, PartialInstance(pe, pa, s["p"]), certificate)


_COMPILERS: dict[ReductionId, Callable[[RbdsInstance], ReductionOutput]] = {
    ReductionId.CCAV_FIRST: _ccav_first,
    ReductionId.CCAV_LAST: _ccav_last,
    ReductionId.CCDV_FIRST_K: _ccdv_first_k,
    ReductionId.CCDV_FIRST_DUAL: _ccdv_first_dual,
    ReductionId.CCDV_LAST_K: _ccdv_last_k,
    ReductionId.CCDV_LAST_DUAL: _ccdv_last_dual,
    ReductionId.CCAC_FIRST: _ccac_first,
    ReductionId.DCAV_NONLAST: _dcav_nonlast,
    ReductionId.DCDV_K: lambda r: _ccdv_last_k(r, ReductionId.DCDV_K),
    ReductionId.DCDV_DUAL: lambda r: _ccdv_last_dual(r, ReductionId.DCDV_DUAL),
    ReductionId.PW_FIRST: _pw_first,
    ReductionId.PW_PENULTIMATE: _pw_penultimate,
}


def reduce(r: RbdsInstance, which: ReductionId | str) -> ReductionOutput:
    which = ReductionId(which)
    check_preconditions(r, which)
    return _COMPILERS[which](r)


def expected_vote_total(which: ReductionId | str, n_red: int, n_blue: int, kappa: int, ell: int) -> int:
    """Closed-form ballot count (registered plus unregistered) of each construction."""
    which = ReductionId(which)
    R, B, k, l = n_red, n_blue, kappa, ell
    return {
        ReductionId.CCAV_FIRST: (k + 1) + B,
        ReductionId.CCAV_LAST: k + B,
        ReductionId.CCDV_FIRST_K: 2 * B + k + 2 * l - 1,
        ReductionId.CCDV_FIRST_DUAL: B + k + 1,
        ReductionId.CCDV_LAST_K: 2 * B + 2 * l + k,
        ReductionId.CCDV_LAST_DUAL: B + k,
        ReductionId.CCAC_FIRST: 2 * (R * (R - 1) // 2 + R + B + R * B),
        ReductionId.DCAV_NONLAST: (k + 2) + B,
        ReductionId.DCDV_K: 2 * B + 2 * l + k,
        ReductionId.DCDV_DUAL: B + k,
        ReductionId.PW_FIRST: 2 * B + 4 * l + 4 * k + 1,
        ReductionId.PW_PENULTIMATE: 2 * B + 4 * k + 1,
    }[which]


# -- exhaustive verification ------------------------------------------------


@dataclass
class VerificationReport:
    which: ReductionId
    max_red: int
    max_blue: int
    checked: int = 0
    yes: int = 0
    no: int = 0
    filtered: int = 0
    over_cap: int = 0
    certificates_checked: int = 0
    discrepancies: list[tuple[RbdsInstance, bool, bool]] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def complete(self) -> bool:
        return self.over_cap == 0

    @property
    def ok(self) -> bool:
        return not self.discrepancies

    def lines(self) -> list[str]:
        out = [
            f"reduction: {self.which.value} (theorem {self.which.theorem})",
            f"graphs: |R| <= {self.max_red}, |B| <= {self.max_blue}",
            f"checked: {self.checked} (yes {self.yes}, no {self.no})",
            f"filtered by preconditions: {self.filtered}",
            f"certificates re-verified: {self.certificates_checked}",
            f"over cap: {self.over_cap}" + ("" if self.complete else " (INCOMPLETE)"),
            f"discrepancies: {len(self.discrepancies)}",
            f"seconds: {self.seconds:.2f}",
        ]
        for inst, source, target in self.discrepancies[:5]:
            out.append(f"  counterexample: {format_rbds_inline(inst)} rbds={source} target={target}")
        return out


def format_rbds_inline(r: RbdsInstance) -> str:
    edges = " ".join(f"{r.blue[b]}-{r.red[x]}" for b, x in sorted(r.edges))
    return f"R={list(r.red)} B={list(r.blue)} E=[{edges}] kappa={r.kappa}"


def enumerate_rbds(max_red: int, max_blue: int, min_red: int = 1, min_blue: int = 1) -> Iterator[RbdsInstance]:
    """Every labelled bipartite graph in the size range, with every kappa in 1..|B|."""
    for nr in range(min_red, max_red + 1):
        for nb in range(min_blue, max_blue + 1):
            red = tuple(f"r{i + 1}" for i in range(nr))
            blue = tuple(f"b{i + 1}" for i in range(nb))
            slots = [(b, x) for b in range(nb) for x in range(nr)]
            for mask in range(1 << len(slots)):
                edges = frozenset(s for i, s in enumerate(slots) if mask >> i & 1)
                for kappa in range(1, nb + 1):
                    yield RbdsInstance(red, blue, edges, kappa)


def target_verdict(out: ReductionOutput, cap: Optional[int] = None) -> bool:
    inst = out.instance
    if isinstance(inst, ControlInstance):
        return solve_exact(inst, cap) is not None if cap else solve_exact(inst) is not None
    budget = CompletionBudget(cap) if cap else None
    return possible_winner_exact(inst.election, inst.agenda, inst.p, budget)


def _check_one(args) -> tuple[str, Optional[RbdsInstance], bool, bool, bool]:
    which, r, cap = args
    try:
        check_preconditions(r, which)
    except PreconditionError:
        return "filtered", None, False, False, False
    out = reduce(r, which)
    source = rbds_brute(r)
    try:
        target = target_verdict(out, cap)
    except CapExceeded:
        return "cap", None, False, False, False
    certified = source is not None and out.certify(source)
    if source is not None and not certified:
        return "checked", r, True, target, False
    return "checked", (r if (source is not None) != target else None), source is not None, target, certified


def verify_reduction(
    which: ReductionId | str,
    max_red: int = 3,
    max_blue: int = 4,
    min_blue: int = 1,
    cap: Optional[int] = None,
    workers: Optional[int] = None,
) -> VerificationReport:
    """Compare RBDS answers with target-instance answers on all small graphs.

    ``workers`` defaults to the ``TSMR_THREADS`` environment variable; 0 or 1
    runs in-process.
    """
    which = ReductionId(which)
    if workers is None:
        workers = int(os.environ.get("TSMR_THREADS", "0") or 0)
    report = VerificationReport(which, max_red, max_blue)
    start = time.perf_counter()
    jobs = ((which, r, cap) for r in enumerate_rbds(max_red, max_blue, min_blue=min_blue))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_check_one, jobs, chunksize=64))
    else:
        results = map(_check_one, jobs)
    for status, bad, source, target, certified in results:
        if status == "filtered":
            report.filtered += 1
            continue
        if status == "cap":
            report.over_cap += 1
            continue
        report.checked += 1
        report.yes += source
        report.no += not source
        report.certificates_checked += certified
        if bad is not None:
            report.discrepancies.append((bad, source, target))
    report.seconds = time.perf_counter() - start
    return report
