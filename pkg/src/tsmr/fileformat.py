"""Line-oriented text formats for elections, control instances and RBDS graphs.

Election and control files::

    candidates: a b c d
    unregistered_candidates: e
    agenda: a b c d e            # or  pagenda: a > b, c > d
    distinguished: a
    mode: constructive
    budgets: av=0 dv=1 ac=0 dc=0
    vote 3: b > d > c > a
    pvote 1: b > d, c > a
    uvote 2: e > a > b > c > d

RBDS files use ``red:``, ``blue:``, ``edge: <blue> <red>`` and ``kappa:``.
Every statement sits on its own line and ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from tsmr.control import ControlInstance, Mode
from tsmr.core import (
    Agenda,
    Election,
    PartialAgenda,
    PartialElection,
    PartialVote,
    Vote,
    transitive_closure,
)
from tsmr.errors import ParseError, PreconditionError
from tsmr.reductions import PartialInstance, RbdsInstance

_VOTE = re.compile(r"^(vote|pvote|uvote)(?:\s+(\d+))?$")
_BUDGET = re.compile(r"^(av|dv|ac|dc)=(\d+)$")
_ORDER = ("candidates", "unregistered_candidates", "agenda", "pagenda", "distinguished", "mode", "budgets")


@dataclass(frozen=True)
class Ballot:
    """One ``vote``/``pvote``/``uvote`` line: closed precedence pairs over label ids."""

    kind: str
    count: int
    constraints: frozenset[tuple[int, int]]
    ranking: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class Document:
    candidates: tuple[str, ...]
    unregistered: tuple[str, ...] = ()
    agenda: Optional[tuple[int, ...]] = None
    pagenda: Optional[frozenset[tuple[int, int]]] = None
    distinguished: Optional[int] = None
    mode: Optional[Mode] = None
    budgets: Optional[dict[str, int]] = field(default=None, compare=True)
    ballots: tuple[Ballot, ...] = ()
    source: str = field(default="<string>", compare=False)

    @property
    def roster(self) -> tuple[str, ...]:
        return self.candidates + self.unregistered

    @property
    def m(self) -> int:
        return len(self.roster)

    def _fail(self, message: str) -> ParseError:
        return ParseError(message, self.source)

    def target(self, label: Optional[str] = None) -> int:
        if label is not None:
            try:
                return self.roster.index(label)
            except ValueError:
                raise self._fail(f"unknown candidate {label!r}") from None
        if self.distinguished is None:
            raise self._fail("distinguished candidate required (use --target)")
        return self.distinguished

    def _complete(self, kinds: Sequence[str]) -> tuple[Vote, ...]:
        out = []
        for b in self.ballots:
            if b.kind not in kinds:
                continue
            ranking = b.ranking
            if ranking is None:
                if len(b.constraints) != self.m * (self.m - 1) // 2:
                    raise self._fail("complete votes required; found a partial vote")
                ranking = _order_of(self.m, b.constraints)
            out.append(Vote(ranking, b.count))
        return tuple(out)

    def election(self) -> Election:
        """Registered votes over the full roster."""
        return Election(self.roster, self._complete(("vote", "pvote")))

    def require_agenda(self) -> Agenda:
        if self.agenda is not None:
            return Agenda(self.agenda)
        if self.pagenda is not None:
            pa = PartialAgenda(self.pagenda)
            if pa.is_total(self.m):
                return pa.as_agenda(self.m)
        raise self._fail("agenda required")

    def partial_agenda(self) -> PartialAgenda:
        if self.agenda is not None:
            return PartialAgenda.from_agenda(Agenda(self.agenda))
        return PartialAgenda(self.pagenda or frozenset())

    def partial_election(self) -> PartialElection:
        votes = tuple(PartialVote(b.constraints, b.count) for b in self.ballots if b.kind != "uvote")
        return PartialElection(self.roster, votes)

    def partial_instance(self, target: Optional[str] = None) -> PartialInstance:
        return PartialInstance(self.partial_election(), self.partial_agenda(), self.target(target))

    def control_instance(self, target: Optional[str] = None) -> ControlInstance:
        b = self.budgets or {}
        try:
            return ControlInstance(
                self.roster,
                self._complete(("vote", "pvote")),
                self.target(target),
                self.require_agenda(),
                unregistered=frozenset(range(len(self.candidates), self.m)),
                unregistered_votes=self._complete(("uvote",)),
                k_av=b.get("av", 0),
                k_dv=b.get("dv", 0),
                k_ac=b.get("ac", 0),
                k_dc=b.get("dc", 0),
                mode=self.mode or Mode.CONSTRUCTIVE,
            )
        except PreconditionError as exc:
            raise self._fail(str(exc)) from None

    # -- builders -----------------------------------------------------------

    @classmethod
    def from_election(cls, e: Election, agenda: Optional[Agenda] = None, p: Optional[int] = None) -> Document:
        return cls(
            e.candidates,
            agenda=None if agenda is None else agenda.order,
            distinguished=p,
            ballots=tuple(_complete_ballot("vote", v) for v in e.votes),
        )

    @classmethod
    def from_control(cls, inst: ControlInstance) -> Document:
        # Registered candidates keep their relative order, unregistered ones follow.
        reg = [c for c in range(inst.m) if c not in inst.unregistered]
        unreg = sorted(inst.unregistered)
        perm = reg + unreg
        new = {old: i for i, old in enumerate(perm)}
        relabel = lambda r: tuple(new[c] for c in r)
        return cls(
            tuple(inst.candidates[c] for c in reg),
            tuple(inst.candidates[c] for c in unreg),
            agenda=relabel(inst.agenda.order),
            distinguished=new[inst.p],
            mode=inst.mode,
            budgets={"av": inst.k_av, "dv": inst.k_dv, "ac": inst.k_ac, "dc": inst.k_dc},
            ballots=tuple(_complete_ballot("vote", Vote(relabel(v.ranking), v.count)) for v in inst.votes)
            + tuple(_complete_ballot("uvote", Vote(relabel(v.ranking), v.count)) for v in inst.unregistered_votes),
        )

    @classmethod
    def from_partial(cls, pi: PartialInstance) -> Document:
        pe, pa = pi.election, pi.agenda
        total = pa.is_total(pe.m)
        ballots = []
        for v in pe.votes:
            if v.is_complete(pe.m):
                ballots.append(Ballot("vote", v.count, v.constraints, _order_of(pe.m, v.constraints)))
            else:
                ballots.append(Ballot("pvote", v.count, v.constraints))
        return cls(
            pe.candidates,
            agenda=pa.as_agenda(pe.m).order if total else None,
            pagenda=None if total else pa.constraints,
            distinguished=pi.p,
            ballots=tuple(ballots),
        )


def _order_of(m: int, closed: frozenset[tuple[int, int]]) -> tuple[int, ...]:
    above = [0] * m
    for _, b in closed:
        above[b] += 1
    return tuple(sorted(range(m), key=lambda c: above[c]))


def _complete_ballot(kind: str, v: Vote) -> Ballot:
    r = v.ranking
    pairs = frozenset((r[i], r[j]) for i in range(len(r)) for j in range(i + 1, len(r)))
    return Ballot(kind, v.count, pairs, r)


# -- parsing ----------------------------------------------------------------


class _Reader:
    def __init__(self, text: str, source: str):
        self.source = source
        self.lines = []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.lines.append((no, line))

    def error(self, message: str, line: int) -> ParseError:
        return ParseError(message, self.source, line)

    def statements(self):
        for no, line in self.lines:
            if ":" not in line:
                raise self.error(f"expected 'keyword: value', got {line!r}", no)
            key, value = line.split(":", 1)
            yield no, key.strip(), value.strip()


def _labels(value: str) -> list[str]:
    return value.split()


def _chains(value: str) -> list[list[str]]:
    chains = []
    for part in value.split(","):
        items = [x.strip() for x in part.split(">")]
        if any(not x or " " in x for x in items):
            raise ValueError(f"malformed chain {part.strip()!r}")
        chains.append(items)
    return chains


def parse_document(text: str, source: str = "<string>") -> Document:
    rd = _Reader(text, source)
    seen: dict[str, int] = {}
    cands: Optional[list[str]] = None
    unreg: list[str] = []
    raw_agenda = raw_pagenda = raw_dist = None
    mode = None
    budgets = None
    raw_votes: list[tuple[int, str, int, str]] = []

    for no, key, value in rd.statements():
        vm = _VOTE.match(key)
        if vm:
            count = int(vm.group(2)) if vm.group(2) is not None else 1
            if count < 1:
                raise rd.error("vote multiplicity must be positive", no)
            raw_votes.append((no, vm.group(1), count, value))
            continue
        if key not in _ORDER:
            raise rd.error(f"unknown statement {key!r}", no)
        if key in seen:
            raise rd.error(f"duplicate {key!r} (first on line {seen[key]})", no)
        seen[key] = no
        if key == "candidates":
            cands = _labels(value)
        elif key == "unregistered_candidates":
            unreg = _labels(value)
        elif key == "agenda":
            raw_agenda = (no, value)
        elif key == "pagenda":
            raw_pagenda = (no, value)
        elif key == "distinguished":
            raw_dist = (no, value)
        elif key == "mode":
            try:
                mode = Mode(value)
            except ValueError:
                raise rd.error(f"mode must be constructive or destructive, got {value!r}", no) from None
        elif key == "budgets":
            budgets = {}
            for tok in value.split():
                bm = _BUDGET.match(tok)
                if not bm:
                    raise rd.error(f"malformed budget {tok!r} (expected av=/dv=/ac=/dc=<int>)", no)
                budgets[bm.group(1)] = int(bm.group(2))

    if cands is None:
        raise ParseError("missing 'candidates' statement", source)
    roster = cands + unreg
    if len(set(roster)) != len(roster):
        raise rd.error("candidate labels must be unique", seen["candidates"])
    index = {c: i for i, c in enumerate(roster)}
    m = len(roster)

    def ids(labels: list[str], no: int) -> list[int]:
        try:
            return [index[x] for x in labels]
        except KeyError as exc:
            raise rd.error(f"unknown candidate {exc.args[0]!r}", no) from None

    def closed(chains: list[list[str]], no: int) -> frozenset[tuple[int, int]]:
        pairs = []
        for chain in chains:
            cid = ids(chain, no)
            pairs += list(zip(cid, cid[1:]))
        try:
            return transitive_closure(pairs, m)
        except PreconditionError as exc:
            raise rd.error(str(exc), no) from None

    if raw_agenda and raw_pagenda:
        raise rd.error("'agenda' and 'pagenda' are mutually exclusive", max(raw_agenda[0], raw_pagenda[0]))
    agenda = pagenda = None
    if raw_agenda:
        no, value = raw_agenda
        agenda = tuple(ids(_labels(value), no))
        if sorted(agenda) != list(range(m)):
            raise rd.error("agenda must list every candidate exactly once", no)
    if raw_pagenda:
        no, value = raw_pagenda
        try:
            pagenda = closed(_chains(value), no) if value else frozenset()
        except ValueError as exc:
            raise rd.error(str(exc), no) from None
    dist = None
    if raw_dist:
        no, value = raw_dist
        dist = ids([value], no)[0]

    ballots = []
    for no, kind, count, value in raw_votes:
        try:
            chains = _chains(value)
        except ValueError as exc:
            raise rd.error(str(exc), no) from None
        if kind == "pvote":
            ballots.append(Ballot(kind, count, closed(chains, no)))
            continue
        if len(chains) != 1:
            raise rd.error(f"'{kind}' must be one complete ranking", no)
        ranking = tuple(ids(chains[0], no))
        if sorted(ranking) != list(range(m)):
            raise rd.error(f"'{kind}' must rank every candidate exactly once", no)
        ballots.append(_complete_ballot(kind, Vote(ranking, count)))

    return Document(
        tuple(cands), tuple(unreg), agenda, pagenda, dist, mode, budgets, tuple(ballots), source
    )


def read_document(path: Union[str, Path]) -> Document:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_document(text, str(path))


# -- serialising ------------------------------------------------------------


def _hasse(pairs: frozenset[tuple[int, int]]) -> list[tuple[int, int]]:
    """Covering pairs of a closed order."""
    return sorted(
        (a, b) for a, b in pairs if not any((a, c) in pairs and (c, b) in pairs for _, c in pairs if c not in (a, b))
    )


def _format_pairs(roster: Sequence[str], pairs: frozenset[tuple[int, int]]) -> str:
    return ", ".join(f"{roster[a]} > {roster[b]}" for a, b in _hasse(pairs))


def format_document(doc: Document) -> str:
    r = doc.roster
    out = [f"candidates: {' '.join(doc.candidates)}"]
    if doc.unregistered:
        out.append(f"unregistered_candidates: {' '.join(doc.unregistered)}")
    if doc.agenda is not None:
        out.append(f"agenda: {' '.join(r[c] for c in doc.agenda)}")
    if doc.pagenda is not None:
        out.append(f"pagenda: {_format_pairs(r, doc.pagenda)}")
    if doc.distinguished is not None:
        out.append(f"distinguished: {r[doc.distinguished]}")
    if doc.mode is not None:
        out.append(f"mode: {doc.mode.value}")
    if doc.budgets is not None:
        out.append("budgets: " + " ".join(f"{k}={doc.budgets[k]}" for k in ("av", "dv", "ac", "dc") if k in doc.budgets))
    for b in doc.ballots:
        if b.ranking is not None:
            body = " > ".join(r[c] for c in b.ranking)
        else:
            body = _format_pairs(r, b.constraints) or r[0]
        out.append(f"{b.kind} {b.count}: {body}")
    return "\n".join(out) + "\n"


def format_witness_agenda(roster: Sequence[str], a: Agenda) -> str:
    return " ".join(roster[c] for c in a.order)


def format_ranking(roster: Sequence[str], ranking: Sequence[int]) -> str:
    return " > ".join(roster[c] for c in ranking)


# -- RBDS -------------------------------------------------------------------


def parse_rbds(text: str, source: str = "<string>") -> RbdsInstance:
    rd = _Reader(text, source)
    red = blue = kappa = None
    edges: list[tuple[int, str, str]] = []
    seen: dict[str, int] = {}
    for no, key, value in rd.statements():
        if key == "edge":
            parts = value.split()
            if len(parts) != 2:
                raise rd.error("edge needs exactly two endpoints: <blue> <red>", no)
            edges.append((no, parts[0], parts[1]))
            continue
        if key not in ("red", "blue", "kappa"):
            raise rd.error(f"unknown statement {key!r}", no)
        if key in seen:
            raise rd.error(f"duplicate {key!r} (first on line {seen[key]})", no)
        seen[key] = no
        if key == "red":
            red = _labels(value)
        elif key == "blue":
            blue = _labels(value)
        else:
            try:
                kappa = int(value)
            except ValueError:
                raise rd.error(f"kappa must be an integer, got {value!r}", no) from None
    for key, val in (("red", red), ("blue", blue), ("kappa", kappa)):
        if val is None:
            raise ParseError(f"missing '{key}' statement", source)
    bi = {b: i for i, b in enumerate(blue)}
    ri = {x: i for i, x in enumerate(red)}
    pairs = set()
    for no, b, x in edges:
        if b not in bi or x not in ri:
            raise rd.error(f"edge {b} {x} must join a blue vertex to a red vertex", no)
        pairs.add((bi[b], ri[x]))
    try:
        return RbdsInstance(tuple(red), tuple(blue), frozenset(pairs), kappa)
    except PreconditionError as exc:
        raise ParseError(str(exc), source, seen["kappa"]) from None


def read_rbds(path: Union[str, Path]) -> RbdsInstance:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_rbds(text, str(path))


def format_rbds(r: RbdsInstance) -> str:
    out = [f"red: {' '.join(r.red)}", f"blue: {' '.join(r.blue)}"]
    out += [f"edge: {r.blue[b]} {r.red[x]}" for b, x in sorted(r.edges)]
    out.append(f"kappa: {r.kappa}")
    return "\n".join(out) + "\n"
