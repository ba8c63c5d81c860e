"""Brute-force QBF evaluation and countermodel checking for small instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .formula import QbfFormula
from .mres import MergeMap, evaluate_map

DEFAULT_MAX_VARS = 24


class OracleCapExceeded(ValueError):
    pass


class StrategyError(ValueError):
    """A strategy reads a variable it is not allowed to depend on."""


@dataclass(frozen=True)
class TruthTable:
    """Explicit decision function: ``inputs`` are existential variables and
    ``table`` maps a tuple of their values to True, False or None (don't care)."""

    inputs: tuple[int, ...]
    table: Mapping[tuple[bool, ...], bool | None]

    @classmethod
    def from_function(cls, inputs: Sequence[int], fn: Callable[..., bool | None]) -> "TruthTable":
        inputs = tuple(inputs)
        rows = {bits: fn(*bits) for bits in itertools.product((False, True), repeat=len(inputs))}
        return cls(inputs, rows)


def evaluate(f: QbfFormula, a: Mapping[int, bool]) -> bool:
    missing = [v for v in f.prefix.variables() if v not in a]
    if missing:
        raise ValueError(f"assignment is partial, missing {missing}")
    return all(any(a[abs(l)] == (l > 0) for l in c) for c in f.matrix)


def brute_force_truth(f: QbfFormula, max_vars: int = DEFAULT_MAX_VARS) -> bool:
    """Exact truth value by game-tree recursion over the prefix order.

    A variable that no longer occurs in the simplified matrix is skipped, as
    both of its subtrees have the same value.
    """
    order = f.prefix.variables()
    if len(order) > max_vars:
        raise OracleCapExceeded(f"{len(order)} variables exceed the cap of {max_vars}")
    exists = [f.prefix.is_existential(v) for v in order]
    clauses = [frozenset(c) for c in f.matrix]
    return _solve(clauses, order, exists, 0)


def _solve(clauses, order, exists, depth):
    if not clauses:
        return True
    if any(not c for c in clauses):
        return False
    occurring = {abs(l) for c in clauses for l in c}
    while depth < len(order) and order[depth] not in occurring:
        depth += 1
    v = order[depth]
    results = []
    for lit in (v, -v):
        sub = [c - {-lit} for c in clauses if lit not in c]
        r = _solve(sub, order, exists, depth + 1)
        if r == exists[depth]:
            return r
        results.append(r)
    return results[0]


def _decider(f: QbfFormula, u: int, d):
    """Turn a strategy entry into a function of the existential assignment."""
    prefix = f.prefix
    if isinstance(d, MergeMap):
        reads = d.branch_variables()
    elif isinstance(d, TruthTable):
        reads = set(d.inputs)
    else:
        raise TypeError(f"unsupported decision for {u}: {type(d).__name__}")
    for x in reads:
        if x not in prefix.level:
            raise StrategyError(f"strategy for {u} reads unbound variable {x}")
        if not prefix.is_existential(x):
            raise StrategyError(f"strategy for {u} reads universal variable {x}")
        if prefix.lv(x) > prefix.lv(u):
            raise StrategyError(f"strategy for {u} reads {x}, which is right of it")
    if isinstance(d, MergeMap):
        def decide(eps):
            label = evaluate_map(d, eps)
            return label is not None and label > 0
    else:
        def decide(eps):
            return bool(d.table[tuple(eps[x] for x in d.inputs)])
    return decide


def verify_countermodel(f: QbfFormula, strategy: Mapping[int, object], max_vars: int = DEFAULT_MAX_VARS) -> bool:
    """True iff the universal strategy falsifies the matrix against every
    existential assignment. Don't-care outputs are taken as false."""
    universals = f.prefix.universals()
    missing = [u for u in universals if u not in strategy]
    if missing:
        raise StrategyError(f"no decision for universal variables {missing}")
    deciders = {u: _decider(f, u, strategy[u]) for u in universals}
    existentials = f.prefix.existentials()
    if len(existentials) > max_vars:
        raise OracleCapExceeded(f"{len(existentials)} existential variables exceed the cap of {max_vars}")
    for bits in itertools.product((False, True), repeat=len(existentials)):
        eps = dict(zip(existentials, bits))
        full = dict(eps)
        for u, decide in deciders.items():
            full[u] = decide(eps)
        if evaluate(f, full):
            return False
    return True
