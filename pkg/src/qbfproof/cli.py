"""Command-line entry point.

Exit status 0 means verified/success, 1 a rejected proof or failed
countermodel, 2 a usage, I/O or parse error. ``check`` prints exactly one
verdict line on stdout; explanations go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import mres, qrat
from .formula import QbfFormula, QdimacsError, UnboundVariableError, parse_qdimacs, write_qdimacs
from .semantics import DEFAULT_MAX_VARS, OracleCapExceeded, StrategyError, brute_force_truth, verify_countermodel
from .squaredeq import emit_eq2_refutation, generate_eq2
from .translate import translate
from .unitprop import AtMode

log = logging.getLogger("qbfproof")

AT_MODES = {"prop": AtMode.PROPOSITIONAL, "univ": AtMode.UNIVERSAL_AWARE}


class UsageError(Exception):
    pass


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _formula(path: str) -> QbfFormula:
    return parse_qdimacs(_read(path))


def _checker_config(args) -> qrat.CheckerConfig:
    return qrat.CheckerConfig(AT_MODES[args.at], qrat.UnivRule(args.univ_rule), args.qrat_adds)


def _mres_inputs(args):
    if args.mres in (None, "-") and args.formula == "-":
        raise UsageError("formula and trace cannot both come from stdin")
    proof = mres.parse_mres(_read(args.mres))
    fpath = args.formula
    if fpath is None:
        if not proof.formula_ref:
            raise UsageError("no --formula given and the trace header names no formula")
        base = os.path.dirname(args.mres) if args.mres not in (None, "-") else ""
        fpath = os.path.join(base, proof.formula_ref)
    return _formula(fpath), proof


def cmd_gen(args) -> int:
    _write(args.output, write_qdimacs(generate_eq2(args.n).formula))
    return 0


def cmd_refute(args) -> int:
    _write(args.output, qrat.write_qrat(emit_eq2_refutation(args.n)))
    return 0


def cmd_check_qrat(args) -> int:
    if args.formula == "-" and args.proof in (None, "-"):
        raise UsageError("formula and proof cannot both come from stdin")
    f = _formula(args.formula)
    proof = qrat.parse_qrat(_read(args.proof))
    report = qrat.check_proof(f, proof, _checker_config(args))
    return _qrat_verdict(report, len(proof))


def _qrat_verdict(report: qrat.CheckReport, nsteps: int) -> int:
    if report.verdict == qrat.Verdict.REFUTATION:
        print("VERIFIED")
        return 0
    if report.verdict == qrat.Verdict.REJECTED:
        print(f"REJECTED step={report.step} reason={report.reason}")
        print(f"step {report.step} rejected: {report.detail}", file=sys.stderr)
    else:
        print(f"REJECTED step={nsteps} reason=no-refutation")
        print("all steps are valid but the empty clause is never added", file=sys.stderr)
    return 1


def cmd_check_mres(args) -> int:
    f, proof = _mres_inputs(args)
    report = mres.check_proof(f, proof)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not report.verified:
        print(f"REJECTED step={report.failed_line} reason={report.reason}")
        return 1
    if not report.refutation:
        last = proof.lines[-1].index if proof.lines else 0
        print(f"REJECTED step={last} reason=no-refutation")
        return 1
    print("VERIFIED")
    return 0


def cmd_translate(args) -> int:
    f, proof = _mres_inputs(args)
    try:
        out = translate(f, proof)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 1
    _write(args.output, qrat.write_qrat(out))
    return 0


def cmd_eval(args) -> int:
    f = _formula(args.formula)
    print("TRUE" if brute_force_truth(f, args.max_vars) else "FALSE")
    if args.mres:
        proof = mres.parse_mres(_read(args.mres))
        try:
            strategy = mres.extract_strategy(f, proof)
        except ValueError as e:
            print(str(e), file=sys.stderr)
            return 1
        ok = verify_countermodel(f, strategy, args.max_vars)
        print("COUNTERMODEL " + ("VERIFIED" if ok else "REJECTED"))
        return 0 if ok else 1
    return 0


def cmd_stats(args) -> int:
    if args.family:
        return _family_stats(args)
    if args.formula is None:
        raise UsageError("stats needs --formula (or --family eq2)")
    if args.mres:
        f, proof = _mres_inputs(args)
        report = mres.check_proof(f, proof)
        rows = [("lines", len(proof.lines)), ("verdict", report.verdict)]
        kinds = {"axiom": 0, "resolution": 0}
        for line in proof.lines:
            kinds["axiom" if isinstance(line.justification, mres.Axiom) else "resolution"] += 1
        rows += [(f"lines:{k}", v) for k, v in kinds.items()]
        uses = {}
        for d in report.lines:
            for r in d.rule.values():
                uses[r] = uses.get(r, 0) + 1
        rows += [(f"maps:{k}", v) for k, v in sorted(uses.items())]
        rows.append(("max_width", max((len(d.clause) for d in report.lines), default=0)))
        rows.append(("max_map_size", max((len(m) for d in report.lines for m in d.maps.values()), default=0)))
        _print_rows(rows)
        return 0 if report.verified else 1
    f = _formula(args.formula)
    proof = qrat.parse_qrat(_read(args.proof))
    started = time.perf_counter()
    report = qrat.check_proof(f, proof, _checker_config(args))
    elapsed = time.perf_counter() - started
    kinds = {qrat.ADD: 0, qrat.DELETE: 0, qrat.UREDUCE: 0}
    for s in proof.steps:
        kinds[s.kind] += 1
    rows = [("steps", len(proof)), ("verdict", report.verdict.value)]
    if report.step:
        rows += [("rejected_step", report.step), ("reason", report.reason)]
    rows += [(f"kind:{k}", v) for k, v in kinds.items()]
    rows += [(f"rule:{k}", v) for k, v in sorted(report.rules.items())]
    rows.append(("max_width", report.max_width))
    rows += [(f"prop:{k}", v) for k, v in sorted(report.propagation.items())]
    rows.append(("seconds", f"{elapsed:.4f}"))
    _print_rows(rows)
    if args.figure:
        from .plotting import proof_profile

        accepted = proof.steps if report.step is None else proof.steps[: report.step - 1]
        proof_profile(args.figure, report.rules, [len(s.clause) for s in accepted],
                      title=os.path.basename(args.proof or "stdin"))
        print(f"figure written to {args.figure}", file=sys.stderr)
    return 0 if report.verdict != qrat.Verdict.REJECTED else 1


def _family_stats(args) -> int:
    cfg = _checker_config(args)
    print("n\tsteps\tsteps_per_n2\tverdict\tseconds")
    ns, counts, status = [], [], 0
    for n in range(1, args.max_n + 1):
        inst = generate_eq2(n)
        proof = emit_eq2_refutation(n)
        started = time.perf_counter()
        report = qrat.check_proof(inst.formula, proof, cfg)
        elapsed = time.perf_counter() - started
        print(f"{n}\t{len(proof)}\t{len(proof) / n**2:g}\t{report.verdict.value}\t{elapsed:.4f}")
        ns.append(n)
        counts.append(len(proof))
        status |= report.verdict != qrat.Verdict.REFUTATION
    if args.figure:
        from .plotting import scaling

        scaling(args.figure, ns, counts)
        print(f"figure written to {args.figure}", file=sys.stderr)
    return 1 if status else 0


def _print_rows(rows):
    for k, v in rows:
        print(f"{k}\t{v}")


def _add_checker_flags(p):
    p.add_argument("--at", choices=sorted(AT_MODES), default="prop", help="AT conflict rule")
    p.add_argument("--univ-rule", choices=["ur", "eur"], default="ur")
    p.add_argument("--qrat-adds", action="store_true", help="allow QRAT additions on the first literal")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbfproof", description="MRes/QRAT proof tools")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a formula family")
    gen.add_argument("family", choices=["eq2"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_gen)

    refute = sub.add_parser("refute", help="emit a QRAT refutation of a family member")
    refute.add_argument("family", choices=["eq2"])
    refute.add_argument("--n", type=int, required=True)
    refute.add_argument("-o", "--output")
    refute.set_defaults(func=cmd_refute)

    check = sub.add_parser("check", help="check a proof")
    csub = check.add_subparsers(dest="system", required=True)
    cq = csub.add_parser("qrat")
    cq.add_argument("--formula", required=True)
    cq.add_argument("--proof", help="QRAT file (default: stdin)")
    _add_checker_flags(cq)
    cq.set_defaults(func=cmd_check_qrat)
    cm = csub.add_parser("mres")
    cm.add_argument("--formula", help="QDIMACS file (default: the trace header)")
    cm.add_argument("--mres", help="MRes trace (default: stdin)")
    cm.set_defaults(func=cmd_check_mres)

    tr = sub.add_parser("translate", help="compile an MRes refutation into QRAT")
    tr.add_argument("--formula")
    tr.add_argument("--mres")
    tr.add_argument("-o", "--output")
    tr.set_defaults(func=cmd_translate)

    ev = sub.add_parser("eval", help="brute-force truth value")
    ev.add_argument("--formula", required=True)
    ev.add_argument("--mres", help="also verify the countermodel extracted from this refutation")
    ev.add_argument("--max-vars", type=int, default=DEFAULT_MAX_VARS)
    ev.set_defaults(func=cmd_eval)

    st = sub.add_parser("stats", help="proof statistics as tab-separated rows")
    st.add_argument("--formula")
    st.add_argument("--proof", help="QRAT file (default: stdin)")
    st.add_argument("--mres", help="report on an MRes trace instead")
    st.add_argument("--family", choices=["eq2"], help="tabulate generated refutations for n = 1..max-n")
    st.add_argument("--max-n", type=int, default=8)
    st.add_argument("--figure", help="also render a PNG figure to this path")
    _add_checker_flags(st)
    st.set_defaults(func=cmd_stats)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (QdimacsError, qrat.QratSyntaxError, mres.MResSyntaxError) as e:
        print(f"parse error: {e}", file=sys.stderr)
    except (UnboundVariableError, OracleCapExceeded, StrategyError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
