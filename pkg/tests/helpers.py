"""Random instance and random proof generation shared by the test modules."""

from __future__ import annotations

import random

from qbfproof.formula import EXISTS, FORALL, Prefix, QbfFormula, make_clause
from qbfproof.qrat import QratChecker, QratStep, StepRejected


def random_prefix(rng: random.Random, nvars: int) -> Prefix:
    order = list(range(1, nvars + 1))
    rng.shuffle(order)
    blocks = []
    q = rng.choice([EXISTS, FORALL])
    i = 0
    while i < nvars:
        size = rng.randint(1, 3)
        blocks.append((q, order[i:i + size]))
        i += size
        q = EXISTS if q == FORALL else FORALL
    return Prefix.of(*blocks)


def random_formula(rng: random.Random, max_vars: int = 12, max_clauses: int = 20,
                   max_width: int = 4, min_vars: int = 2) -> QbfFormula:
    nvars = rng.randint(min_vars, max_vars)
    prefix = random_prefix(rng, nvars)
    matrix = []
    for _ in range(rng.randint(0, max_clauses)):
        width = rng.randint(1, min(max_width, nvars))
        vs = rng.sample(range(1, nvars + 1), width)
        matrix.append(make_clause(v if rng.random() < 0.5 else -v for v in vs))
    return QbfFormula(prefix, tuple(matrix))


def candidate_step(rng: random.Random, checker: QratChecker, added: list) -> QratStep:
    """Propose a step that has a fair chance of being accepted."""
    prefix = checker.prefix
    clauses = checker.matrix.clauses()
    roll = rng.random()
    if roll < 0.15 and added:
        c = rng.choice(added)
        return QratStep.delete(c)
    if roll < 0.5 and clauses:
        c = rng.choice(clauses)
        univ = [l for l in c if prefix.is_universal(l)]
        if univ:
            return QratStep("ureduce", c, rng.choice(univ))
    if roll < 0.75 and len(clauses) >= 2:
        # resolvent of two present clauses, sometimes weakened or trimmed
        a, b = rng.sample(clauses, 2)
        common = [l for l in a if -l in b]
        if common:
            x = rng.choice(common)
            lits = [l for l in a if l != x] + [l for l in b if l != -x]
            if lits and rng.random() < 0.3:
                lits.remove(rng.choice(lits))
            return QratStep.add(list(dict.fromkeys(lits)))
    nvars = len(prefix.level)
    width = rng.randint(0, min(3, nvars))
    vs = rng.sample(sorted(prefix.level), width)
    return QratStep.add([v if rng.random() < 0.5 else -v for v in vs])


def random_accepted_steps(rng: random.Random, checker: QratChecker, attempts: int):
    """Yield (step, rule, before, after) for accepted candidates only."""
    added: list = []
    for _ in range(attempts):
        step = candidate_step(rng, checker, added)
        before = checker.matrix.formula()
        try:
            rule = checker.apply(step)
        except StepRejected:
            continue
        if step.kind == "add":
            added.append(step.clause)
        elif step.kind == "delete":
            added.remove(step.clause)
        elif step.clause in added:
            added.remove(step.clause)
            added.append(tuple(l for l in step.clause if l != step.pivot))
        yield step, rule, before, checker.matrix.formula()


def naive_truth(f: QbfFormula) -> bool:
    """Full game tree with no pruning or simplification."""
    order = f.prefix.variables()

    def walk(depth, a):
        if depth == len(order):
            return all(any(a[abs(l)] == (l > 0) for l in c) for c in f.matrix)
        v = order[depth]
        vals = [walk(depth + 1, {**a, v: b}) for b in (False, True)]
        return any(vals) if f.prefix.is_existential(v) else all(vals)

    return walk(0, {})


def naive_propagate(clauses, seed, prefix, universal_aware=False):
    """Fixpoint by repeated full scans. Returns (conflict, implied)."""
    truth = {}
    for lit in seed:
        if truth.get(abs(lit)) == -lit:
            return True, None
        truth[abs(lit)] = lit
    changed = True
    while changed:
        changed = False
        for c in clauses:
            if any(truth.get(abs(l)) == l for l in c):
                continue
            open_ = [l for l in c if abs(l) not in truth]
            if universal_aware:
                if not any(prefix.is_existential(l) for l in open_):
                    return True, None
            if not open_:
                return True, None
            if len(open_) == 1:
                truth[abs(open_[0])] = open_[0]
                changed = True
    return False, frozenset(truth.values())
