import random

import pytest

from conftest import MRES_FIXTURES, load_fixture
from helpers import random_accepted_steps, random_formula
from qbfproof.formula import EXISTS, FORALL, Prefix, QbfFormula
from qbfproof.qrat import (
    CheckerConfig,
    QratChecker,
    QratProof,
    QratStep,
    QratSyntaxError,
    UnivRule,
    Verdict,
    check_proof,
    check_ureduce,
    eic,
    is_qrat_clause,
    outer_resolvent,
    parse_qrat,
    write_qrat,
)
from qbfproof.semantics import brute_force_truth
from qbfproof.squaredeq import Eq2Vars, emit_eq2_refutation, generate_eq2
from qbfproof.translate import translate
from qbfproof.unitprop import AtMode

PROP, UNIV = AtMode.PROPOSITIONAL, AtMode.UNIVERSAL_AWARE
STRICT = CheckerConfig()
ALL_CONFIGS = [CheckerConfig(m, r, q) for m in AtMode for r in UnivRule for q in (False, True)]

UE = Prefix.of((FORALL, [1]), (EXISTS, [2]))  # u = 1, e = 2


@pytest.fixture
def eq1():
    inst = generate_eq2(1)
    return inst, Eq2Vars(1)


def test_outer_resolvent_on_eq2(eq1):
    inst, v = eq1
    x, y, u, vv, t = v.x(1), v.y(1), v.u(1), v.v(1), v.t(1, 1)
    c = (x, y, vv, t)
    d = (-x, y, -u, vv, t)
    assert set(outer_resolvent(inst.formula.prefix, c, d, u)) == {x, -x, y, vv, t}


def test_outer_resolvent_trivial_cases():
    p = Prefix.of((EXISTS, [1]), (FORALL, [2]), (EXISTS, [3]))
    assert outer_resolvent(p, (3,), (-2,), 2) == (3,)
    assert outer_resolvent(p, (2, 3), (-1, 3), 1) == (2, 3)


def test_outer_resolvent_rejects_bad_arguments():
    p = Prefix.of((EXISTS, [1, 2]))
    with pytest.raises(ValueError):
        outer_resolvent(p, (1,), (-1,), 1)
    with pytest.raises(ValueError):
        outer_resolvent(p, (), (2,), 1)


def test_universal_literals_of_eq2_are_qrat(eq1):
    inst, v = eq1
    c = next(c for c in inst.formula.matrix if v.u(1) in c and v.x(1) in c)
    for mode in AtMode:
        assert is_qrat_clause(inst.formula, c, v.u(1), mode)


def test_at_clause_is_qrat_on_every_literal():
    f = QbfFormula(Prefix.of((EXISTS, [1, 2, 3])), ((1, 2), (-2, 3)))
    for lit in (1, 3):
        assert is_qrat_clause(f, (1, 3), lit)


def test_qrat_is_vacuous_without_partners():
    f = QbfFormula(Prefix.of((EXISTS, [1, 2])), ((1, 2),))
    assert is_qrat_clause(f, (1,), 1)


def test_eic_single_clause():
    f = QbfFormula(UE, ((1, 2),))
    assert set(eic(f, (1, 2), 1)) == {1, 2}


def test_eic_pulls_in_complement():
    f = QbfFormula(UE, ((1, 2), (-1, -2)))
    assert set(eic(f, (1, 2), 1)) == {1, 2, -2, -1}


def test_eic_without_inner_existentials():
    p = Prefix.of((EXISTS, [1]), (FORALL, [2]))
    f = QbfFormula(p, ((1, 2), (-1, -2)))
    assert eic(f, (1, 2), 2) == (1, 2)


def test_check_ureduce_qratu_on_eq2(eq1):
    inst, v = eq1
    c = next(c for c in inst.formula.matrix if v.u(1) in c and v.x(1) in c)
    for cfg in ALL_CONFIGS:
        assert check_ureduce(inst.formula, c, v.u(1), cfg)


def test_check_ureduce_eur_beats_ur():
    f = QbfFormula(UE, ((1, 2),))
    assert check_ureduce(f, (1, 2), 1, CheckerConfig(univ_rule=UnivRule.EUR))
    # QRATU holds vacuously here as -u occurs nowhere
    assert check_ureduce(f, (1, 2), 1, CheckerConfig(univ_rule=UnivRule.UR))
    wm = QratChecker(f).matrix
    assert wm.reduction_rule((1, 2), 1, STRICT) == "qratu"


def test_check_ureduce_blocked_by_dependency():
    f = QbfFormula(UE, ((1, 2), (-1, -2)))
    for rule in UnivRule:
        assert not check_ureduce(f, (1, 2), 1, CheckerConfig(PROP, rule))


def test_eq2_refutation_in_reference_config():
    inst = generate_eq2(1)
    report = check_proof(inst.formula, emit_eq2_refutation(1), CheckerConfig(UNIV, UnivRule.UR, True))
    assert report.verdict == Verdict.REFUTATION and report.ok


def test_non_at_addition_is_rejected():
    f = QbfFormula(Prefix.of((EXISTS, [1, 2])), ((2,),))
    report = check_proof(f, QratProof((QratStep.add([1]),)))
    assert report.verdict == Verdict.REJECTED
    assert (report.step, report.reason) == (1, "not-at-qrat")


def test_qrat_addition_needs_the_flag():
    # (1) is blocked: no clause contains -1
    f = QbfFormula(Prefix.of((EXISTS, [1, 2])), ((1, 2),))
    proof = QratProof((QratStep.add([1, -2]),))
    assert check_proof(f, proof).reason == "not-at-qrat"
    report = check_proof(f, proof, CheckerConfig(allow_qrat_additions=True))
    assert report.verdict == Verdict.DERIVATION and report.rules["qrata"] == 1


def test_delete_and_reduce_need_presence():
    f = QbfFormula(UE, ((1, 2),))
    assert check_proof(f, QratProof((QratStep.delete([2]),))).reason == "not-present"
    assert check_proof(f, QratProof((QratStep.ureduce(1, [-2]),))).reason == "not-present"
    assert check_proof(f, QratProof((QratStep.ureduce(2, [1]),))).reason == "pivot-not-universal"
    assert check_proof(f, QratProof((QratStep.add([3]),))).reason == "unbound-variable"


def test_deletion_is_unconditional():
    f = QbfFormula(UE, ((1, 2), (1, 2)))
    report = check_proof(f, QratProof((QratStep.delete([1, 2]), QratStep.delete([1, 2]))))
    assert report.verdict == Verdict.DERIVATION
    assert check_proof(f, QratProof((QratStep.delete([1, 2]),) * 3)).step == 3


def test_reduction_replaces_the_clause():
    p = Prefix.of((EXISTS, [1]), (FORALL, [2]))
    f = QbfFormula(p, ((1, 2), (-1,)))
    checker = QratChecker(f)
    assert checker.apply(QratStep.ureduce(2, [1])) in ("qratu", "ur")
    assert (1, 2) not in checker.matrix and (1,) in checker.matrix
    checker.apply(QratStep.add([]))
    assert checker.refuted


def test_parse_examples():
    p = parse_qrat("c comment\n1 2 0\nd 1 2 0\nu 3 1 2 0\n0\n")
    add, dele, red, bottom = p.steps
    assert (add.kind, add.clause, add.pivot) == ("add", (1, 2), 1)
    assert (dele.kind, dele.clause) == ("delete", (1, 2))
    assert (red.kind, set(red.clause), red.pivot) == ("ureduce", {1, 2, 3}, 3)
    assert bottom.clause == () and bottom.pivot is None


def test_pivot_survives_normalization():
    p = parse_qrat("-3 1 2 0\n")
    assert p.steps[0].pivot == -3
    assert write_qrat(p) == "-3 1 2 0\n"


@pytest.mark.parametrize("text,line", [
    ("1 2\n", 1),
    ("1 2 0\n1 x 0\n", 2),
    ("1 0 2 0\n", 1),
    ("1 0\nu 0\n", 2),
    ("c ok\n\nd 1", 3),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(QratSyntaxError) as e:
        parse_qrat(text)
    assert e.value.line == line


def test_round_trip():
    for n in (1, 2, 3):
        p = emit_eq2_refutation(n)
        assert parse_qrat(write_qrat(p)) == p


def test_translated_fixture_proofs_use_only_at(mres_fixture):
    _, f, p = mres_fixture
    report = check_proof(f, translate(f, p), CheckerConfig(UNIV))
    assert report.ok
    assert set(report.rules) == {"at"}


def _fixture_events(cfg):
    for name in MRES_FIXTURES:
        f, p = load_fixture(name)
        events = []
        check_proof(f, translate(f, p), cfg, on_step=events.append)
        yield name, events
    for n in (1, 2):
        events = []
        check_proof(generate_eq2(n).formula, emit_eq2_refutation(n), cfg, on_step=events.append)
        yield f"eq2-{n}", events


def test_fixture_steps_preserve_truth_in_universal_mode():
    # every fixture is false, so each intermediate formula must stay false
    for name, events in _fixture_events(CheckerConfig(UNIV, UnivRule.UR, True)):
        assert events, name
        for e in events:
            assert not brute_force_truth(e.after), (name, e.index)


@pytest.mark.parametrize("cfg", [CheckerConfig(PROP, r, True) for r in UnivRule], ids=["ur", "eur"])
def test_random_steps_preserve_truth(cfg):
    rng = random.Random(31)
    accepted = 0
    for _ in range(120):
        f = random_formula(rng, max_vars=10, max_clauses=14)
        for step, rule, before, after in random_accepted_steps(rng, QratChecker(f, cfg), 30):
            accepted += 1
            assert brute_force_truth(before) == brute_force_truth(after), (f, step, rule)
    assert accepted > 1000


def test_checking_is_deterministic():
    inst = generate_eq2(2)
    proof = emit_eq2_refutation(2)
    cfg = CheckerConfig(UNIV)
    reports = [check_proof(inst.formula, proof, cfg) for _ in range(3)]
    assert all(r == reports[0] for r in reports)
    checker = QratChecker(inst.formula, cfg)
    for step in proof.steps[:-1]:
        checker.apply(step)
    m = checker.matrix
    for k in range(10):
        assert m.is_at((), UNIV, rng=random.Random(k))


def test_strict_acceptance_carries_over_to_weaker_configs():
    rng = random.Random(17)
    for _ in range(80):
        f = random_formula(rng, max_vars=8, max_clauses=12)
        steps = [s for s, *_ in random_accepted_steps(rng, QratChecker(f, STRICT), 25)]
        proof = QratProof(tuple(steps))
        base = check_proof(f, proof, STRICT)
        assert base.verdict != Verdict.REJECTED
        for cfg in ALL_CONFIGS:
            assert check_proof(f, proof, cfg).verdict == base.verdict, cfg
