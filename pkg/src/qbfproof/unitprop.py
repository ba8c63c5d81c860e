"""Unit propagation with two watched literals, and asymmetric-tautology checks.

Two conflict notions are supported. ``PROPOSITIONAL`` is ordinary unit
propagation. ``UNIVERSAL_AWARE`` additionally treats a clause as conflicting
once nothing in it is satisfied and all its existential literals are false,
i.e. whatever is left is purely universal. Universal literals are never
implied in that mode: a clause whose last open literal is universal is a
conflict instead.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .formula import Prefix, QbfFormula, is_tautology


class AtMode(str, Enum):
    PROPOSITIONAL = "propositional"
    UNIVERSAL_AWARE = "universal_aware"


@dataclass(frozen=True)
class PropagationResult:
    conflict: bool
    implied: frozenset  # every literal made true, seed included
    conflict_clause: int | None = None

    @property
    def outcome(self) -> str:
        return "conflict" if self.conflict else "fixpoint"


class Propagator:
    """A clause database with persistent watches.

    Clauses can be added and removed between calls to :meth:`propagate`; each
    call starts from an empty assignment and leaves none behind, so the
    watch invariants that hold under the empty assignment survive between
    calls.
    """

    def __init__(self, prefix: Prefix, clauses: Iterable[Sequence[int]] = ()):
        self.prefix = prefix
        self.clauses: list[list[int] | None] = []
        self.watches: dict[int, list[int]] = defaultdict(list)
        # One existential literal per clause, for the universal-aware rule.
        self.ewatch: dict[int, int] = {}
        self.ewatches: dict[int, list[int]] = defaultdict(list)
        self.units: set[int] = set()
        self.empties: set[int] = set()
        self.pure_universal: set[int] = set()
        self.stats = Counter()
        for c in clauses:
            self.add(c)

    def add(self, clause: Sequence[int]) -> int:
        cid = len(self.clauses)
        lits = list(clause)
        self.clauses.append(lits)
        if not lits:
            self.empties.add(cid)
        elif len(lits) == 1:
            self.units.add(cid)
        else:
            self.watches[lits[0]].append(cid)
            self.watches[lits[1]].append(cid)
        ex = [l for l in lits if self.prefix.is_existential(l)]
        if ex:
            self.ewatch[cid] = ex[0]
            self.ewatches[ex[0]].append(cid)
        elif lits:
            self.pure_universal.add(cid)
        return cid

    def remove(self, cid: int) -> None:
        # Watch lists are cleaned lazily when a dead id is visited.
        self.clauses[cid] = None
        self.units.discard(cid)
        self.empties.discard(cid)
        self.pure_universal.discard(cid)
        self.ewatch.pop(cid, None)

    def live(self) -> list[tuple[int, ...]]:
        return [tuple(c) for c in self.clauses if c is not None]

    def propagate(
        self,
        seed: Iterable[int],
        mode: AtMode = AtMode.PROPOSITIONAL,
        rng: random.Random | None = None,
    ) -> PropagationResult:
        """Propagate ``seed`` to fixpoint or conflict.

        With ``rng`` the order in which pending literals and watch lists are
        visited is randomized; the outcome must not depend on it.
        """
        univ = mode == AtMode.UNIVERSAL_AWARE
        truth: dict[int, int] = {}
        trail: list[int] = []

        def value(lit):
            t = truth.get(abs(lit))
            if t is None:
                return 0
            return 1 if t == lit else -1

        def done(conflict, cid=None):
            self.stats["calls"] += 1
            self.stats["conflicts"] += conflict
            self.stats["assignments"] += len(trail)
            return PropagationResult(conflict, frozenset(trail), cid)

        for lit in seed:
            v = value(lit)
            if v == -1:
                return done(True)
            if v == 0:
                truth[abs(lit)] = lit
                trail.append(lit)

        if self.empties:
            return done(True, min(self.empties))
        if univ:
            for cid in _ordered(self.pure_universal, rng):
                if not any(value(l) == 1 for l in self.clauses[cid]):
                    return done(True, cid)
        for cid in _ordered(self.units, rng):
            lit = self.clauses[cid][0]
            v = value(lit)
            if v == 1:
                continue
            if v == -1 or (univ and self.prefix.is_universal(lit)):
                return done(True, cid)
            truth[abs(lit)] = lit
            trail.append(lit)

        pending = list(trail)
        while pending:
            if rng is None:
                t = pending.pop()
            else:
                t = pending.pop(rng.randrange(len(pending)))
            false_lit = -t
            conflict = self._visit_watches(false_lit, value, truth, trail, pending, univ, rng)
            if conflict is None and univ and self.prefix.is_existential(false_lit):
                conflict = self._visit_ewatches(false_lit, value, rng)
            if conflict is not None:
                return done(True, conflict)
        return done(False)

    def _visit_watches(self, false_lit, value, truth, trail, pending, univ, rng):
        wl = self.watches.get(false_lit)
        if not wl:
            return None
        if rng is not None:
            rng.shuffle(wl)
        keep = []
        conflict = None
        i = 0
        n = len(wl)
        while i < n:
            cid = wl[i]
            i += 1
            c = self.clauses[cid]
            if c is None:
                continue
            self.stats["visits"] += 1
            if c[0] == false_lit:
                c[0], c[1] = c[1], c[0]
            other = c[0]
            if value(other) == 1:
                keep.append(cid)
                continue
            moved = False
            for k in range(2, len(c)):
                if value(c[k]) != -1:
                    c[1], c[k] = c[k], c[1]
                    self.watches[c[1]].append(cid)
                    moved = True
                    break
            if moved:
                continue
            keep.append(cid)
            v = value(other)
            if v == -1 or (univ and self.prefix.is_universal(other)):
                conflict = cid
                break
            truth[abs(other)] = other
            trail.append(other)
            pending.append(other)
        keep.extend(wl[i:])
        self.watches[false_lit] = keep
        return conflict

    def _visit_ewatches(self, false_lit, value, rng):
        wl = self.ewatches.get(false_lit)
        if not wl:
            return None
        if rng is not None:
            rng.shuffle(wl)
        keep = []
        conflict = None
        i = 0
        n = len(wl)
        while i < n:
            cid = wl[i]
            i += 1
            c = self.clauses[cid]
            if c is None or self.ewatch.get(cid) != false_lit:
                continue
            replacement = None
            satisfied = False
            for lit in c:
                v = value(lit)
                if v == 1:
                    satisfied = True
                    break
                if v == 0 and replacement is None and self.prefix.is_existential(lit):
                    replacement = lit
            if satisfied or replacement is None:
                keep.append(cid)
                if not satisfied:
                    conflict = cid
                    break
                continue
            self.ewatch[cid] = replacement
            self.ewatches[replacement].append(cid)
        keep.extend(wl[i:])
        self.ewatches[false_lit] = keep
        return conflict


def _ordered(ids, rng):
    ids = sorted(ids)
    if rng is not None:
        rng.shuffle(ids)
    return ids


def propagate(
    clauses: Sequence[Sequence[int]],
    seed: Iterable[int],
    prefix: Prefix,
    mode: AtMode = AtMode.PROPOSITIONAL,
    rng: random.Random | None = None,
) -> PropagationResult:
    return Propagator(prefix, clauses).propagate(seed, mode, rng)


def is_at(c: Sequence[int], f: QbfFormula, mode: AtMode = AtMode.PROPOSITIONAL) -> bool:
    """True iff propagating the negation of ``c`` over the matrix of ``f`` conflicts."""
    if is_tautology(c):
        return True
    return propagate(f.matrix, [-l for l in c], f.prefix, mode).conflict
