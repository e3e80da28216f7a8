import json
import subprocess
import sys

import pytest

from tsmr import cli, control
from tsmr.fileformat import read_document


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_winner_example1(capsys, fixtures):
    code, out, _ = run(capsys, "winner", "--rule", "tsmr", fixtures / "example1.elec")
    assert code == cli.EXIT_YES
    assert out.splitlines()[0] == "a"
    assert out.splitlines()[-1].startswith("# verdict=yes ms=")


@pytest.mark.parametrize("rule, expected", [("successive", "d"), ("amendment", "d")])
def test_winner_other_rules(capsys, fixtures, rule, expected):
    code, out, _ = run(capsys, "winner", "--rule", rule, fixtures / "example1.elec")
    assert code == 0 and out.splitlines()[0] == expected


def test_amendment_tie_advances_challenger(capsys, fixtures):
    code, out, _ = run(capsys, "winner", "--rule", "amendment", fixtures / "amendment-tie.elec")
    assert out.splitlines()[0] == "b"


def test_all_agendas(capsys, fixtures):
    code, out, _ = run(capsys, "winner", "--all-agendas", fixtures / "example1.elec")
    assert code == 0
    assert len(out.splitlines()) == 25
    assert "agendas=24" in out.splitlines()[-1]


def test_agenda_control(capsys, fixtures):
    code, out, _ = run(capsys, "agenda-control", "--target", "a", fixtures / "example1.elec")
    assert code == 0
    assert out.splitlines()[0] == "agenda: b d a c"


def test_ccdc_nothing_to_do(capsys, fixtures):
    code, out, _ = run(capsys, "control", "--variant", "ccdc", "--target", "a", "-k", "0", fixtures / "example1.elec")
    assert code == 0
    assert out.splitlines()[0] == "no change needed"


def test_control_fixtures(capsys, fixtures):
    code, out, _ = run(capsys, "control", "--variant", "ccav", fixtures / "ccav.ctl")
    assert code == 0 and out.splitlines()[0] == "add_vote 1: a > c > b"
    code, out, _ = run(capsys, "control", "--variant", "ccac", "--exact", fixtures / "ccac.ctl")
    assert code == 0 and out.splitlines()[0] == "add_candidate: e"


def test_control_infeasible(capsys, fixtures):
    code, out, _ = run(capsys, "control", "--variant", "ccav", "-k", "0", fixtures / "ccav.ctl")
    assert code == cli.EXIT_NO
    assert out.splitlines()[0] == "infeasible"


def test_manipulate(capsys, fixtures):
    code, out, _ = run(capsys, "manipulate", "--target", "c", "-k", "1", fixtures / "example1.elec")
    assert code in (0, 1)
    assert out.splitlines()[0].startswith("vote 1: c > ")


def test_partial_commands(capsys, fixtures):
    code, out, _ = run(capsys, "possible", fixtures / "partial.elec")
    assert code == 0 and out.splitlines()[0] == "possible winner: yes"
    code, out, _ = run(capsys, "necessary", fixtures / "partial.elec")
    assert code == 1 and out.splitlines()[0] == "necessary winner: no"


def test_missing_agenda_is_usage_error(capsys, fixtures):
    code, out, err = run(capsys, "winner", fixtures / "missing-agenda.elec")
    assert code == cli.EXIT_USAGE
    assert out == ""
    assert "agenda required" in err


def test_parse_error_has_location(capsys, fixtures):
    code, _, err = run(capsys, "winner", fixtures / "bad-vote.elec")
    assert code == cli.EXIT_USAGE
    assert "bad-vote.elec:4:" in err


def test_argparse_errors_are_usage(capsys):
    assert cli.main(["winner"]) == cli.EXIT_USAGE
    assert cli.main(["control", "--variant", "xxav", "f"]) == cli.EXIT_USAGE
    capsys.readouterr()


def test_cap_override_warns_and_exits_3(capsys, fixtures):
    code, _, err = run(capsys, "control", "--variant", "ccav", "--exact", "--cap", "1", fixtures / "ccav.ctl")
    assert code == cli.EXIT_CAP
    assert "warning: cap overridden" in err
    assert "cap exceeded" in err


def test_consistency_alarm_exits_4(capsys, fixtures, monkeypatch):
    monkeypatch.setattr(control, "verify_solution", lambda inst, sol: False)
    code, _, err = run(capsys, "control", "--variant", "ccav", fixtures / "ccav.ctl")
    assert code == cli.EXIT_ALARM
    assert "consistency alarm" in err


def test_lint(capsys, fixtures):
    code, out, _ = run(capsys, "lint", fixtures / "amendment-tie.elec")
    assert code == 1 and out.splitlines()[0] == "tie: a b"
    code, out, _ = run(capsys, "lint", fixtures / "example1.elec")
    assert code == 0 and out.splitlines()[0] == "no tied pairs"


@pytest.mark.parametrize(
    "argv",
    [
        ["winner", "example1.elec"],
        ["agenda-control", "--target", "c", "example1.elec"],
        ["control", "--variant", "ccav", "ccav.ctl"],
        ["necessary", "partial.elec"],
        ["winner", "missing-agenda.elec"],
    ],
)
def test_json_matches_plain(capsys, fixtures, argv):
    argv = argv[:-1] + [str(fixtures / argv[-1])]
    code, out, err = run(capsys, *argv)
    jcode, jout, jerr = run(capsys, *argv, "--json")
    plain = (out or err).splitlines()
    rep = json.loads(jout or jerr)
    assert code == jcode
    assert rep["witness"] == plain[:-1]
    assert plain[-1].startswith(f"# verdict={rep['verdict']} ")
    assert rep["command"][-1] == "--json"


def test_reduce_to_file(capsys, fixtures, tmp_path):
    dest = tmp_path / "out.ctl"
    code, out, _ = run(capsys, "reduce", "--theorem", "ccav-first", "-o", dest, fixtures / "star.rbds")
    assert code == 0 and out.startswith(f"wrote {dest}")
    doc = read_document(dest)
    assert doc.distinguished == 0
    code, out, _ = run(capsys, "control", "--variant", "ccav", dest)
    assert code == 0


def test_reduce_needs_regular(capsys, fixtures):
    code, _, err = run(capsys, "reduce", "--theorem", "pw-first", fixtures / "star.rbds")
    assert code == cli.EXIT_USAGE and "same degree" in err
    code, out, _ = run(capsys, "reduce", "--theorem", "pw-first", "--normalize", fixtures / "star.rbds")
    assert code == 0 and out.startswith("candidates: p q ")


def test_verify_reduction_small(capsys):
    code, out, _ = run(capsys, "verify-reduction", "--theorem", "ccav-last", "--max-red", "2", "--max-blue", "2")
    assert code == 0
    assert "discrepancies=0" in out.splitlines()[-1]


def test_module_entry_point(fixtures):
    res = subprocess.run([sys.executable, "-m", "tsmr", "winner", str(fixtures / "example1.elec")],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "a"
