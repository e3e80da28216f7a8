import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_control, random_partial_instance
from test_core import elections
from tsmr import Agenda, ParseError
from tsmr.control import Mode, Variant
from tsmr.fileformat import (
    Document,
    format_document,
    format_rbds,
    parse_document,
    parse_rbds,
    read_document,
    read_rbds,
)
from tsmr.reductions import PartialInstance, ReductionId, normalize_rbds, reduce


def _fixed_point(doc: Document) -> None:
    text = format_document(doc)
    again = parse_document(text)
    assert again == doc
    assert format_document(again) == text


@pytest.mark.parametrize("name", ["example1.elec", "missing-agenda.elec", "amendment-tie.elec", "ccav.ctl",
                                  "ccac.ctl", "partial.elec"])
def test_fixture_round_trip(fixtures, name):
    _fixed_point(read_document(fixtures / name))


def test_example1_parsed(fixtures, example1):
    doc = read_document(fixtures / "example1.elec")
    assert doc.election() == example1
    assert doc.require_agenda() == Agenda((0, 1, 2, 3))
    assert doc.target() == 0


def test_canonical_statement_order():
    text = "vote 1: b > a\nagenda: a b\ncandidates: a b\n"
    assert format_document(parse_document(text)) == "candidates: a b\nagenda: a b\nvote 1: b > a\n"


def test_bad_vote_reports_line(fixtures):
    with pytest.raises(ParseError) as info:
        read_document(fixtures / "bad-vote.elec")
    assert info.value.line == 4
    assert "unknown candidate 'z'" in str(info.value)
    assert str(info.value).startswith(str(fixtures / "bad-vote.elec") + ":4:")


def test_missing_agenda(fixtures):
    doc = read_document(fixtures / "missing-agenda.elec")
    with pytest.raises(ParseError, match="agenda required"):
        doc.require_agenda()


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("candidates: a b\nagenda: a b\npagenda: a > b\n", 3, "mutually exclusive"),
        ("candidates: a b c\npvote 1: a > b, b > c, c > a\n", 2, "cycl"),
        ("candidates: a b\nvote 1: a\n", 2, "every candidate"),
        ("candidates: a b\nagenda: a a\n", 2, "exactly once"),
        ("candidates: a b\nmode: sideways\n", 2, "constructive or destructive"),
        ("candidates: a b\nbudgets: xv=1\n", 2, "malformed budget"),
        ("candidates: a b\ncandidates: a b\n", 2, "duplicate"),
        ("candidates: a a\n", 1, "unique"),
        ("candidates: a b\nfrobnicate: 1\n", 2, "unknown statement"),
        ("candidates: a b\nvote 0: a > b\n", 2, "positive"),
        ("candidates: a b\nvote 1: a > b, b > a\n", 2, "complete ranking"),
    ],
)
def test_parse_errors(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_document(text)
    assert info.value.line == line
    assert fragment in info.value.message


def test_missing_candidates():
    with pytest.raises(ParseError, match="missing 'candidates'"):
        parse_document("agenda: a b\n")


def test_unreadable_file(tmp_path):
    with pytest.raises(ParseError, match="cannot read file"):
        read_document(tmp_path / "nope.elec")


def test_comments_and_blank_lines():
    doc = parse_document("# header\n\ncandidates: a b   # two\nvote: a > b\n")
    assert doc.candidates == ("a", "b")
    assert doc.ballots[0].count == 1


def test_pvote_written_as_covering_pairs():
    doc = parse_document("candidates: a b c d\npvote 1: a > b > c, a > c, d > c\n")
    assert format_document(doc).splitlines()[-1] == "pvote 1: a > b, b > c, d > c"


def test_partial_fixture(fixtures):
    doc = read_document(fixtures / "partial.elec")
    pe = doc.partial_election()
    assert pe.n == 4
    assert doc.partial_agenda().constraints == frozenset({(0, 1)})
    assert doc.target() == 2


def test_control_fixture(fixtures):
    inst = read_document(fixtures / "ccav.ctl").control_instance()
    assert inst.variant is Variant.CCAV
    assert inst.n_unregistered_votes == 2
    assert inst.k_av == 1
    inst = read_document(fixtures / "ccac.ctl").control_instance()
    assert inst.variant is Variant.CCAC
    assert inst.unregistered == {2}


@settings(max_examples=150, deadline=None)
@given(elections(max_m=6, max_n=8), st.data())
def test_election_round_trip(e, data):
    order = tuple(data.draw(st.permutations(range(e.m))))
    doc = Document.from_election(e, Agenda(order), data.draw(st.integers(0, e.m - 1)))
    _fixed_point(doc)
    assert parse_document(format_document(doc)).election() == e


@pytest.mark.parametrize("variant", [v.value for v in Variant])
def test_control_round_trip(variant):
    rng = np.random.default_rng(40)
    for _ in range(30):
        inst = random_control(rng, variant)
        doc = Document.from_control(inst)
        _fixed_point(doc)
        back = parse_document(format_document(doc)).control_instance()
        assert back == inst


def test_partial_round_trip():
    rng = np.random.default_rng(41)
    for _ in range(100):
        pe, pa, p = random_partial_instance(rng, max_m=5, max_n=4)
        doc = Document.from_partial(PartialInstance(pe, pa, p))
        _fixed_point(doc)
        again = parse_document(format_document(doc))
        assert again.partial_election().votes == pe.votes
        assert again.partial_agenda() == pa


@pytest.mark.parametrize("which", [w.value for w in ReductionId])
def test_reduction_outputs_serialise(fixtures, which):
    r = read_rbds(fixtures / "star.rbds")
    if ReductionId(which).min_kappa > 1:
        r = parse_rbds("red: r1 r2\nblue: b1 b2 b3 b4\n" + "".join(
            f"edge: b{i} r{1 + i % 2}\n" for i in range(1, 5)) + "kappa: 4\n")
    if ReductionId(which).needs_regular:
        r = normalize_rbds(r)
    out = reduce(r, which)
    if isinstance(out.instance, PartialInstance):
        doc = Document.from_partial(out.instance)
    else:
        doc = Document.from_control(out.instance)
        assert doc.mode is (Mode.DESTRUCTIVE if which.startswith("dc") else Mode.CONSTRUCTIVE)
    _fixed_point(doc)


def test_rbds_round_trip(fixtures):
    for name in ("star.rbds", "split.rbds"):
        r = read_rbds(fixtures / name)
        assert parse_rbds(format_rbds(r)) == r
        assert format_rbds(parse_rbds(format_rbds(r))) == format_rbds(r)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("red: r\nblue: b\nkappa: 1\nedge: r b\n", "blue vertex to a red"),
        ("red: r\nblue: b\nkappa: x\n", "integer"),
        ("red: r\nblue: b\n", "missing 'kappa'"),
        ("red: r\nblue: b\nedge: b\nkappa: 1\n", "two endpoints"),
        ("red: r\nblue: b\nkappa: 2\n", "kappa"),
    ],
)
def test_rbds_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_rbds(text)
