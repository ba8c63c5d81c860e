"""QRAT proof format and checker.

Proof lines are DIMACS-like and end in ``0``::

    1 2 0        add (1 2); the first literal is the candidate QRAT literal
    d 1 2 0      delete one copy of (1 2)
    u 3 1 2 0    drop universal 3 from the present clause (3 1 2)

Additions are accepted when the clause is an asymmetric tautology (AT), or,
if enabled, when it is a QRAT clause on its first (existential) literal.
Universal reductions are accepted by QRATU, or by UR/EUR as configured.
Deletions are unconditional.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

from .formula import Clause, Prefix, QbfFormula, is_tautology, make_clause
from .unitprop import AtMode, Propagator

ADD, DELETE, UREDUCE = "add", "delete", "ureduce"


@dataclass(frozen=True)
class QratStep:
    kind: str
    clause: Clause
    pivot: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "clause", make_clause(self.clause))
        if self.kind not in (ADD, DELETE, UREDUCE):
            raise ValueError(f"unknown step kind {self.kind!r}")
        if self.pivot is not None and self.pivot not in self.clause:
            raise ValueError(f"pivot {self.pivot} is not in the clause")
        if self.kind == UREDUCE and self.pivot is None:
            raise ValueError("a ureduce step needs a pivot")

    @classmethod
    def add(cls, lits: Sequence[int]) -> "QratStep":
        lits = list(lits)
        return cls(ADD, tuple(lits), lits[0] if lits else None)

    @classmethod
    def delete(cls, lits: Sequence[int]) -> "QratStep":
        return cls(DELETE, tuple(lits))

    @classmethod
    def ureduce(cls, pivot: int, rest: Sequence[int]) -> "QratStep":
        return cls(UREDUCE, (pivot, *rest), pivot)


@dataclass(frozen=True)
class QratProof:
    steps: tuple[QratStep, ...]

    def __len__(self):
        return len(self.steps)


class UnivRule(str, Enum):
    UR = "ur"
    EUR = "eur"


@dataclass(frozen=True)
class CheckerConfig:
    at_mode: AtMode = AtMode.PROPOSITIONAL
    univ_rule: UnivRule = UnivRule.UR
    allow_qrat_additions: bool = False


class Verdict(str, Enum):
    REFUTATION = "verified-refutation"
    DERIVATION = "verified-derivation"
    REJECTED = "rejected"


@dataclass(frozen=True)
class CheckReport:
    verdict: Verdict
    step: int | None = None  # 1-based index of the rejected step
    reason: str | None = None
    detail: str = ""
    rules: Counter = field(default_factory=Counter)
    max_width: int = 0
    propagation: Counter = field(default_factory=Counter)

    @property
    def ok(self) -> bool:
        return self.verdict == Verdict.REFUTATION


@dataclass(frozen=True)
class StepEvent:
    """Passed to ``on_step`` hooks after a step is accepted."""

    index: int
    step: QratStep
    rule: str
    before: QbfFormula
    after: QbfFormula


class StepRejected(Exception):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


class WorkingMatrix:
    """A multiset of clauses with occurrence lists and a propagation engine."""

    def __init__(self, prefix: Prefix, clauses: Iterable[Sequence[int]] = ()):
        self.prefix = prefix
        self.engine = Propagator(prefix)
        self.by_clause: dict[Clause, list[int]] = defaultdict(list)
        self.occurs: dict[int, set[int]] = defaultdict(set)
        self.store: dict[int, Clause] = {}
        for c in clauses:
            self.add(make_clause(c))

    @classmethod
    def of(cls, f: QbfFormula) -> "WorkingMatrix":
        return cls(f.prefix, f.matrix)

    def add(self, c: Clause) -> int:
        cid = self.engine.add(c)
        self.store[cid] = c
        self.by_clause[c].append(cid)
        for lit in c:
            self.occurs[lit].add(cid)
        return cid

    def remove(self, c: Clause) -> None:
        ids = self.by_clause.get(c)
        if not ids:
            raise KeyError(c)
        cid = ids.pop()
        if not ids:
            del self.by_clause[c]
        del self.store[cid]
        for lit in c:
            self.occurs[lit].discard(cid)
        self.engine.remove(cid)

    def __contains__(self, c: Clause) -> bool:
        return bool(self.by_clause.get(c))

    def clauses(self) -> tuple[Clause, ...]:
        return tuple(self.store[cid] for cid in sorted(self.store))

    def formula(self) -> QbfFormula:
        return QbfFormula(self.prefix, self.clauses())

    def partners(self, lit: int) -> list[Clause]:
        return [self.store[cid] for cid in sorted(self.occurs.get(-lit, ()))]

    # -- rule checks --

    def is_at(self, c: Sequence[int], mode: AtMode, rng: random.Random | None = None) -> bool:
        if is_tautology(c):
            return True
        return self.engine.propagate([-l for l in c], mode, rng).conflict

    def outer_resolvent(self, c: Sequence[int], d: Sequence[int], lit: int) -> Clause:
        return outer_resolvent(self.prefix, c, d, lit)

    def is_qrat_clause(self, c: Sequence[int], lit: int, mode: AtMode) -> bool:
        if lit not in c:
            raise ValueError(f"literal {lit} is not in the clause")
        rest = [l for l in c if l != lit]
        return all(self.is_at(outer_resolvent(self.prefix, rest, d, lit), mode) for d in self.partners(lit))

    def eic(self, c: Sequence[int], lit: int) -> Clause:
        prefix = self.prefix
        if lit not in c:
            raise ValueError(f"literal {lit} is not in the clause")
        if not prefix.is_universal(lit):
            raise ValueError(f"literal {lit} is not universal")
        base = prefix.lv(lit)
        work = set(c)
        todo = [k for k in work if prefix.is_existential(k) and prefix.lv(k) > base]
        expanded = set()
        while todo:
            k = todo.pop()
            if k in expanded:
                continue
            expanded.add(k)
            for d in self.partners(k):
                new = [m for m in d if prefix.lv(m) > base]
                if -lit in d:
                    new.append(-lit)
                for m in new:
                    if m not in work:
                        work.add(m)
                        if prefix.is_existential(m) and prefix.lv(m) > base:
                            todo.append(m)
        return make_clause(work)

    def reduction_rule(self, c: Sequence[int], lit: int, cfg: CheckerConfig) -> str | None:
        """Name of the first rule that allows dropping ``lit`` from ``c``, or None."""
        prefix = self.prefix
        if lit not in c:
            raise ValueError(f"literal {lit} is not in the clause")
        if not prefix.is_universal(lit):
            raise ValueError(f"pivot {lit} is not universal")
        if self.is_qrat_clause(c, lit, cfg.at_mode):
            return "qratu"
        if cfg.univ_rule == UnivRule.UR:
            if not any(prefix.is_existential(k) and prefix.lv(k) > prefix.lv(lit) for k in c):
                return "ur"
        elif -lit not in self.eic(c, lit):
            return "eur"
        return None


def outer_resolvent(p: Prefix, c: Sequence[int], d: Sequence[int], lit: int) -> Clause:
    """``c`` plus the literals of ``d`` (other than the complement of ``lit``)
    whose level is at most that of ``lit``."""
    if lit in c:
        raise ValueError(f"{lit} must already be removed from c")
    if -lit not in d:
        raise ValueError(f"{-lit} is not in d")
    base = p.lv(lit)
    return make_clause([*c, *(k for k in d if k != -lit and p.lv(k) <= base)])


def is_qrat_clause(f: QbfFormula, c: Sequence[int], lit: int, mode: AtMode = AtMode.PROPOSITIONAL) -> bool:
    return WorkingMatrix.of(f).is_qrat_clause(c, lit, mode)


def eic(f: QbfFormula, c: Sequence[int], lit: int) -> Clause:
    return WorkingMatrix.of(f).eic(c, lit)


def check_ureduce(f: QbfFormula, c: Sequence[int], lit: int, cfg: CheckerConfig = CheckerConfig()) -> bool:
    return WorkingMatrix.of(f).reduction_rule(c, lit, cfg) is not None


class QratChecker:
    """Incremental checker: feed steps one at a time with :meth:`apply`."""

    def __init__(self, f: QbfFormula, cfg: CheckerConfig = CheckerConfig()):
        self.prefix = f.prefix
        self.cfg = cfg
        self.matrix = WorkingMatrix.of(f)
        self.refuted = False
        self.rules: Counter = Counter()
        self.max_width = max((len(c) for c in f.matrix), default=0)

    def apply(self, step: QratStep) -> str:
        """Check and perform ``step``; return the rule that justified it."""
        prefix, cfg, m = self.prefix, self.cfg, self.matrix
        c = step.clause
        unbound = [abs(l) for l in c if abs(l) not in prefix.level]
        if unbound:
            raise StepRejected("unbound-variable", f"variables {unbound} are not in the prefix")
        if step.kind == ADD:
            if m.is_at(c, cfg.at_mode):
                rule = "at"
            elif (
                cfg.allow_qrat_additions
                and step.pivot is not None
                and prefix.is_existential(step.pivot)
                and m.is_qrat_clause(c, step.pivot, cfg.at_mode)
            ):
                rule = "qrata"
            else:
                raise StepRejected("not-at-qrat", "clause is neither AT nor QRAT on its first literal")
            m.add(c)
            if not c:
                self.refuted = True
        elif step.kind == DELETE:
            if c not in m:
                raise StepRejected("not-present", "deleted clause is not in the formula")
            m.remove(c)
            rule = "delete"
        else:
            lit = step.pivot
            if c not in m:
                raise StepRejected("not-present", "reduced clause is not in the formula")
            if not prefix.is_universal(lit):
                raise StepRejected("pivot-not-universal", f"{lit} is existential")
            rule = m.reduction_rule(c, lit, cfg)
            if rule is None:
                raise StepRejected("no-reduction", f"{lit} is not removable by QRATU or {cfg.univ_rule.value}")
            m.remove(c)
            m.add(tuple(l for l in c if l != lit))
        self.rules[rule] += 1
        self.max_width = max(self.max_width, len(c))
        return rule


def check_proof(
    f: QbfFormula,
    p: QratProof,
    cfg: CheckerConfig = CheckerConfig(),
    on_step: Callable[[StepEvent], None] | None = None,
) -> CheckReport:
    checker = QratChecker(f, cfg)
    before = f if on_step else None
    for i, step in enumerate(p.steps, start=1):
        try:
            rule = checker.apply(step)
        except StepRejected as e:
            return CheckReport(Verdict.REJECTED, i, e.reason, e.detail, checker.rules,
                               checker.max_width, Counter(checker.matrix.engine.stats))
        if on_step:
            after = checker.matrix.formula()
            on_step(StepEvent(i, step, rule, before, after))
            before = after
    verdict = Verdict.REFUTATION if checker.refuted else Verdict.DERIVATION
    return CheckReport(verdict, None, None, "", checker.rules, checker.max_width,
                       Counter(checker.matrix.engine.stats))


# -- text format ------------------------------------------------------------


class QratSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


def parse_qrat(text: str) -> QratProof:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        kind = ADD
        if tokens[0] == "d":
            kind, tokens = DELETE, tokens[1:]
        elif tokens[0] == "u":
            kind, tokens = UREDUCE, tokens[1:]
        try:
            lits = [int(t) for t in tokens]
        except ValueError:
            raise QratSyntaxError(f"non-integer token in {raw.strip()!r}", lineno) from None
        if not lits or lits[-1] != 0:
            raise QratSyntaxError("line is not terminated by 0", lineno)
        if 0 in lits[:-1]:
            raise QratSyntaxError("0 inside a clause", lineno)
        lits = lits[:-1]
        if kind == UREDUCE and not lits:
            raise QratSyntaxError("universal reduction needs a literal", lineno)
        pivot = lits[0] if lits and kind != DELETE else None
        steps.append(QratStep(kind, tuple(lits), pivot))
    return QratProof(tuple(steps))


def write_step(s: QratStep) -> str:
    lits = list(s.clause)
    if s.pivot is not None:
        lits.remove(s.pivot)
        lits.insert(0, s.pivot)
    head = {ADD: [], DELETE: ["d"], UREDUCE: ["u"]}[s.kind]
    return " ".join([*head, *map(str, lits), "0"])


def write_qrat(p: QratProof) -> str:
    return "".join(write_step(s) + "\n" for s in p.steps)
