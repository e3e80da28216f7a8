"""Command-line front end.

Exit codes: 0 yes/success, 1 no/infeasible, 2 usage or parse error,
3 cap exceeded, 4 a printed witness failed its own re-check.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from tsmr import control, partial, strategy
from tsmr.control import ControlInstance, ControlSolution, Variant
from tsmr.core import Agenda, tied_pairs
from tsmr.errors import CapExceeded, ParseError, PreconditionError
from tsmr.fileformat import Document, format_document, format_ranking, read_document, read_rbds
from tsmr.reductions import ReductionId, normalize_rbds, reduce, verify_reduction
from tsmr.rules import Rule, tsmr_winner, winner

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_CAP, EXIT_ALARM = 0, 1, 2, 3, 4


class ConsistencyAlarm(Exception):
    """A witness about to be printed did not survive re-verification."""


@dataclass
class RunReport:
    command: list[str]
    verdict: str
    witness: list[str] = field(default_factory=list)
    ms: float = 0.0
    stats: dict = field(default_factory=dict)

    def text(self) -> str:
        stats = " ".join(f"{k}={v}" for k, v in self.stats.items())
        lines = list(self.witness)
        lines.append(f"# verdict={self.verdict} ms={self.ms:.1f}" + (f" {stats}" if stats else ""))
        return "\n".join(lines)

    def json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


def _check(ok: bool, what: str) -> None:
    if not ok:
        raise ConsistencyAlarm(f"internal consistency alarm: {what} failed re-verification")


def _cap(args, default: int) -> int:
    if args.cap is None:
        return default
    print(f"warning: cap overridden to {args.cap} (default {default}); runtime may grow", file=sys.stderr)
    return args.cap


def _stats(doc: Document, **extra) -> dict:
    out = {"m": doc.m, "n": sum(b.count for b in doc.ballots if b.kind != "uvote")}
    out.update(extra)
    return out


# -- subcommands ------------------------------------------------------------


def cmd_winner(args) -> tuple[int, RunReport]:
    doc = read_document(args.file)
    e = doc.election()
    if args.all_agendas:
        cap = _cap(args, strategy.AGENDA_ENUMERATION_CAP)
        if e.m > cap:
            raise CapExceeded(f"agenda enumeration cap: {e.m} candidates > {cap}", e.m, cap)
        lines = []
        for order in itertools.permutations(range(e.m)):
            w = winner(args.rule, e, Agenda(order))
            lines.append(f"{' '.join(e.candidates[c] for c in order)} -> {e.candidates[w]}")
        return EXIT_YES, RunReport([], "yes", lines, stats=_stats(doc, agendas=len(lines)))
    w = winner(args.rule, e, doc.require_agenda())
    return EXIT_YES, RunReport([], "yes", [e.candidates[w]], stats=_stats(doc))


def cmd_agenda_control(args) -> tuple[int, RunReport]:
    doc = read_document(args.file)
    e = doc.election()
    p = doc.target(args.target)
    ans = strategy.agenda_control(e, p)
    if not ans.feasible:
        return EXIT_NO, RunReport([], "no", ["infeasible"], stats=_stats(doc))
    _check(tsmr_winner(e, ans.witness) == p, "agenda witness")
    return EXIT_YES, RunReport(
        [], "yes", [f"agenda: {' '.join(e.candidates[c] for c in ans.witness.order)}"], stats=_stats(doc)
    )


def cmd_manipulate(args) -> tuple[int, RunReport]:
    doc = read_document(args.file)
    e = doc.election()
    p = doc.target(args.target)
    a = doc.require_agenda()
    ans = strategy.coalition_manipulation(e, p, a, args.k)
    lines = [f"vote {args.k}: {format_ranking(e.candidates, ans.ballot)}"]
    if not ans.feasible:
        return EXIT_NO, RunReport([], "no", lines + ["infeasible"], stats=_stats(doc, k=args.k))
    _check(tsmr_winner(e.with_votes(e.votes + ans.witness), a) == p, "manipulation witness")
    return EXIT_YES, RunReport([], "yes", lines, stats=_stats(doc, k=args.k))


def _control_instance(doc: Document, args) -> ControlInstance:
    variant = Variant(args.variant)
    inst = doc.control_instance(args.target)
    changes = {"mode": variant.mode}
    if args.k is not None:
        changes.update({f"k_{x}": 0 for x in ("av", "dv", "ac", "dc")})
        changes[f"k_{variant.action}"] = args.k
    elif inst.budget(variant.action) == 0 and doc.budgets is None:
        raise PreconditionError(f"no budget for {variant.value}: give -k or a 'budgets' line")
    return dataclasses.replace(inst, **changes)


def _solution_lines(inst: ControlInstance, sol: ControlSolution) -> list[str]:
    names = inst.candidates
    reg = [v.ranking for v in inst.votes for _ in range(v.count)]
    unreg = [v.ranking for v in inst.unregistered_votes for _ in range(v.count)]
    lines = [f"delete_vote {i + 1}: {format_ranking(names, reg[i])}" for i in sol.deleted_votes]
    lines += [f"add_vote {i + 1}: {format_ranking(names, unreg[i])}" for i in sol.added_votes]
    lines += [f"delete_candidate: {names[c]}" for c in sol.deleted_candidates]
    lines += [f"add_candidate: {names[c]}" for c in sol.added_candidates]
    return lines or ["no change needed"]


def cmd_control(args) -> tuple[int, RunReport]:
    doc = read_document(args.file)
    inst = _control_instance(doc, args)
    cap = _cap(args, control.EXACT_CAP)
    sol = control.solve(inst, args.variant, exact=args.exact, cap=cap)
    stats = _stats(doc, av=inst.k_av, dv=inst.k_dv, ac=inst.k_ac, dc=inst.k_dc)
    if sol is None:
        return EXIT_NO, RunReport([], "no", ["infeasible"], stats=stats)
    _check(control.verify_solution(inst, sol), "control solution")
    stats["size"] = sol.size
    return EXIT_YES, RunReport([], "yes", _solution_lines(inst, sol), stats=stats)


def cmd_possible(args) -> tuple[int, RunReport]:
    doc = read_document(args.file)
    pi = doc.partial_instance(args.target)
    m = pi.election.m
    if args.budget is not None:
        budget = args.budget
    else:
        budget = _cap(args, partial.CompletionBudget().max_completions)
    if pi.agenda.is_total(m) and pi.agenda.as_agenda(m).order[-1] == pi.p:
        ok = partial.possible_winner_p_last(pi.election, pi.agenda, pi.p)
        method = "p-last"
    else:
        ok = partial.possible_winner_exact(pi.election, pi.agenda, pi.p, partial.CompletionBudget(budget))
        method = "exact"
    verdict = "yes" if ok else "no"
    return (EXIT_YES if ok else EXIT_NO), RunReport(
        [], verdict, [f"possible winner: {verdict}"], stats=_stats(doc, method=method)
    )


def cmd_necessary(args) -> tuple[int, RunReport]:
    doc = read_document(args.file)
    pi = doc.partial_instance(args.target)
    ok = partial.necessary_winner(pi.election, pi.agenda, pi.p)
    verdict = "yes" if ok else "no"
    return (EXIT_YES if ok else EXIT_NO), RunReport([], verdict, [f"necessary winner: {verdict}"], stats=_stats(doc))


def cmd_reduce(args) -> tuple[int, RunReport]:
    r = read_rbds(args.file)
    if args.normalize:
        r = normalize_rbds(r)
    out = reduce(r, args.theorem)
    doc = Document.from_control(out.instance) if isinstance(out.instance, ControlInstance) else Document.from_partial(
        out.instance
    )
    text = format_document(doc)
    stats = _stats(doc, red=len(r.red), blue=len(r.blue), kappa=r.kappa)
    if args.output:
        Path(args.output).write_text(text)
        return EXIT_YES, RunReport([], "yes", [f"wrote {args.output}"], stats=stats)
    return EXIT_YES, RunReport([], "yes", text.rstrip("\n").split("\n"), stats=stats)


def cmd_verify_reduction(args) -> tuple[int, RunReport]:
    cap = _cap(args, control.EXACT_CAP) if args.cap is not None else None
    rep = verify_reduction(args.theorem, args.max_red, args.max_blue, cap=cap)
    stats = {"checked": rep.checked, "filtered": rep.filtered, "discrepancies": len(rep.discrepancies)}
    if not rep.ok:
        return EXIT_NO, RunReport([], "no", rep.lines(), stats=stats)
    if not rep.complete:
        return EXIT_CAP, RunReport([], "incomplete", rep.lines(), stats=stats)
    return EXIT_YES, RunReport([], "yes", rep.lines(), stats=stats)


def cmd_lint(args) -> tuple[int, RunReport]:
    doc = read_document(args.file)
    if any(b.ranking is None for b in doc.ballots):
        return EXIT_YES, RunReport([], "yes", ["partial votes present; tie check skipped"], stats=_stats(doc))
    ties = tied_pairs(doc.election())
    names = doc.roster
    lines = [f"tie: {names[a]} {names[b]}" for a, b in ties] or ["no tied pairs"]
    return (EXIT_NO if ties else EXIT_YES), RunReport([], "no" if ties else "yes", lines, stats=_stats(doc, ties=len(ties)))


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as one JSON object")
    common.add_argument("--cap", type=int, help="override the desk-scale enumeration cap (prints a warning)")

    parser = argparse.ArgumentParser(prog="tsmr", description="Two-stage majoritarian voting toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("winner", parents=[common], help="winner under a sequential rule")
    p.add_argument("--rule", choices=[r.value for r in Rule], default="tsmr")
    p.add_argument("--all-agendas", action="store_true", help="winner for every agenda (m <= 8)")
    p.add_argument("file")
    p.set_defaults(func=cmd_winner)

    p = sub.add_parser("agenda-control", parents=[common], help="find an agenda making the target win")
    p.add_argument("--target")
    p.add_argument("file")
    p.set_defaults(func=cmd_agenda_control)

    p = sub.add_parser("manipulate", parents=[common], help="coalition manipulation with k ballots")
    p.add_argument("--target")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser("control", parents=[common], help="single-budget election control")
    p.add_argument("--variant", choices=[v.value for v in Variant], required=True)
    p.add_argument("--target")
    p.add_argument("-k", type=int, help="budget for the variant's action (others set to 0)")
    p.add_argument("--exact", action="store_true", help="always use the exhaustive search")
    p.add_argument("file")
    p.set_defaults(func=cmd_control)

    p = sub.add_parser("possible", parents=[common], help="possible winner under partial information")
    p.add_argument("--target")
    p.add_argument("--budget", type=int, help="maximum number of completions to enumerate")
    p.add_argument("file")
    p.set_defaults(func=cmd_possible)

    p = sub.add_parser("necessary", parents=[common], help="necessary winner under partial information")
    p.add_argument("--target")
    p.add_argument("file")
    p.set_defaults(func=cmd_necessary)

    p = sub.add_parser("reduce", parents=[common], help="compile an RBDS instance")
    p.add_argument("--theorem", choices=[r.value for r in ReductionId], required=True)
    p.add_argument("--normalize", action="store_true", help="pad red degrees to a common value first")
    p.add_argument("-o", "--output")
    p.add_argument("file")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify-reduction", parents=[common], help="exhaustively check a reduction")
    p.add_argument("--theorem", choices=[r.value for r in ReductionId], required=True)
    p.add_argument("--max-red", type=int, default=3)
    p.add_argument("--max-blue", type=int, default=4)
    p.set_defaults(func=cmd_verify_reduction)

    p = sub.add_parser("lint", parents=[common], help="report tied majority pairs")
    p.add_argument("file")
    p.set_defaults(func=cmd_lint)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_YES
    start = time.perf_counter()
    try:
        code, report = args.func(args)
    except ParseError as exc:
        code, report = EXIT_USAGE, RunReport([], "error", [f"error: {exc}"])
    except PreconditionError as exc:
        where = getattr(args, "file", None)
        code, report = EXIT_USAGE, RunReport([], "error", [f"error: {where + ': ' if where else ''}{exc}"])
    except CapExceeded as exc:
        code, report = EXIT_CAP, RunReport([], "cap-exceeded", [f"cap exceeded: {exc}"])
    except ConsistencyAlarm as exc:
        code, report = EXIT_ALARM, RunReport([], "alarm", [str(exc)])
    report.command = argv
    report.ms = (time.perf_counter() - start) * 1000
    stream = sys.stdout if code in (EXIT_YES, EXIT_NO) else sys.stderr
    print(report.json() if args.json else report.text(), file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
