"""Merge maps and merge-resolution (MRes) proof checking.

A merge map is a small branching program indexed by proof line numbers: each
index maps either to a leaf (``u``, ``-u`` or ``*``) or to a branch
``(x, low, high)`` meaning "if x is false go to low, else go to high", where
low and high are strictly smaller indices.

Proof traces store justifications only; clauses and maps are rebuilt by the
checker. A resolution line uses ``select`` when it is defined and falls back
to ``merge``; an ``m <u>`` annotation forces ``merge`` for universal ``u``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from .formula import Clause, QbfFormula, existential_subclause, is_tautology, make_clause

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Leaf:
    label: int | None  # a literal of the map's universal variable, or None for *


@dataclass(frozen=True)
class Branch:
    var: int
    low: int
    high: int


@dataclass(frozen=True, eq=True)
class MergeMap:
    root: int
    rules: Mapping[int, Leaf | Branch]

    __hash__ = None  # rules is a plain dict

    @classmethod
    def leaf(cls, index: int, label: int | None) -> "MergeMap":
        return cls(index, {index: Leaf(label)})

    def is_trivial(self) -> bool:
        return self.rules[self.root] == Leaf(None)

    def branch_variables(self) -> set[int]:
        return {r.var for r in self.rules.values() if isinstance(r, Branch)}

    def __len__(self) -> int:
        return len(self.rules)

    def check_invariants(self, prefix=None, universal: int | None = None) -> None:
        """Raise AssertionError if the map is malformed."""
        assert self.root in self.rules, "root has no rule"
        for i, r in self.rules.items():
            if isinstance(r, Branch):
                assert r.low in self.rules and r.high in self.rules, f"dangling child at {i}"
                assert r.low < i and r.high < i, f"child index not smaller at {i}"
                if prefix is not None:
                    assert prefix.is_existential(r.var), f"branch on universal {r.var}"
                    if universal is not None:
                        assert prefix.lv(r.var) < prefix.lv(universal), f"branch var {r.var} not left of {universal}"


class MergeMapError(ValueError):
    pass


def evaluate_map(m: MergeMap, a: Mapping[int, bool]) -> int | None:
    """Follow ``m`` under assignment ``a``; return the leaf label (None is *)."""
    node = m.rules[m.root]
    while isinstance(node, Branch):
        if node.var not in a:
            raise KeyError(f"branch variable {node.var} is unassigned")
        node = m.rules[node.high if a[node.var] else node.low]
    return node.label


def is_isomorphic(m1: MergeMap, m2: MergeMap) -> bool:
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    stack = [(m1.root, m2.root)]
    while stack:
        i, j = stack.pop()
        if i in fwd or j in bwd:
            if fwd.get(i) != j or bwd.get(j) != i:
                return False
            continue
        fwd[i] = j
        bwd[j] = i
        r1, r2 = m1.rules[i], m2.rules[j]
        if isinstance(r1, Leaf) or isinstance(r2, Leaf):
            if r1 != r2:
                return False
            continue
        if r1.var != r2.var:
            return False
        stack.append((r1.low, r2.low))
        stack.append((r1.high, r2.high))
    return True


def is_consistent(m1: MergeMap, m2: MergeMap) -> bool:
    small, big = (m1, m2) if len(m1) <= len(m2) else (m2, m1)
    rules = big.rules
    for i, r in small.rules.items():
        other = rules.get(i)
        if other is not None and other != r:
            return False
    return True


def select_defined(m1: MergeMap, m2: MergeMap) -> bool:
    return m1.is_trivial() or m2.is_trivial() or is_isomorphic(m1, m2)


def select(m1: MergeMap, m2: MergeMap) -> MergeMap:
    if not select_defined(m1, m2):
        raise MergeMapError("select is undefined: maps are neither isomorphic nor trivial")
    return m2 if m1.is_trivial() else m1


def merge(m1: MergeMap, m2: MergeMap, n: int, x: int) -> MergeMap:
    if not is_consistent(m1, m2):
        raise MergeMapError("merge is undefined: maps are inconsistent")
    if n in m1.rules or n in m2.rules or n <= max(max(m1.rules), max(m2.rules)):
        raise MergeMapError(f"merge index {n} is not fresh")
    rules = dict(m1.rules)
    rules.update(m2.rules)
    rules[n] = Branch(x, m1.root, m2.root)
    return MergeMap(n, rules)


# -- proofs -----------------------------------------------------------------


@dataclass(frozen=True)
class Axiom:
    clause_no: int  # 1-based position in the matrix


@dataclass(frozen=True)
class Resolution:
    a: int
    b: int
    pivot: int
    forced_merge: frozenset = frozenset()


@dataclass(frozen=True)
class MResLine:
    index: int
    justification: Axiom | Resolution
    # Optional claims, compared against the reconstruction when present.
    clause: Clause | None = None
    maps: Mapping[int, MergeMap] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class MResProof:
    lines: tuple[MResLine, ...]
    formula_ref: str | None = None


@dataclass(frozen=True)
class DerivedLine:
    index: int
    clause: Clause
    maps: dict
    rule: dict  # universal -> "axiom" | "select" | "merge"


@dataclass(frozen=True)
class MResReport:
    verified: bool
    refutation: bool
    failed_line: int | None = None
    reason: str | None = None
    lines: tuple[DerivedLine, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def verdict(self) -> str:
        if not self.verified:
            return "rejected"
        return "verified-refutation" if self.refutation else "verified-derivation"


class MResReject(Exception):
    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}: {detail}" if detail else code)


def check_proof(f: QbfFormula, p: MResProof) -> MResReport:
    prefix = f.prefix
    universals = prefix.universals()
    derived: dict[int, DerivedLine] = {}
    out: list[DerivedLine] = []
    warnings: list[str] = []
    last = 0
    for line in p.lines:
        try:
            if line.index <= last:
                raise MResReject("bad-index", f"line index {line.index} is not increasing")
            d = _derive(f, line, derived, universals, warnings)
            _compare_claims(prefix, line, d)
            for u, m in d.maps.items():
                m.check_invariants(prefix, u)
        except MResReject as e:
            return MResReport(False, False, line.index, e.code, tuple(out), tuple(warnings))
        derived[line.index] = d
        out.append(d)
        last = line.index
    refutation = bool(out) and out[-1].clause == ()
    return MResReport(True, refutation, None, None, tuple(out), tuple(warnings))


def _derive(f, line, derived, universals, warnings) -> DerivedLine:
    prefix = f.prefix
    i = line.index
    j = line.justification
    if isinstance(j, Axiom):
        if not 1 <= j.clause_no <= len(f.matrix):
            raise MResReject("bad-reference", f"no input clause {j.clause_no}")
        c = f.matrix[j.clause_no - 1]
        maps, rule = {}, {}
        lits = set(c)
        for u in universals:
            if u in lits and -u in lits:
                raise MResReject("tautological-axiom", f"clause has both polarities of {u}")
            label = -u if u in lits else (u if -u in lits else None)
            maps[u] = MergeMap.leaf(i, label)
            rule[u] = "axiom"
        return DerivedLine(i, existential_subclause(c, prefix), maps, rule)

    if j.a not in derived or j.b not in derived or j.a >= i or j.b >= i:
        raise MResReject("bad-reference", f"resolution refers to {j.a}, {j.b}")
    x = j.pivot
    if x <= 0 or x not in prefix.level or not prefix.is_existential(x):
        raise MResReject("bad-pivot", f"pivot {x} is not an existential variable")
    for u in j.forced_merge:
        if u not in prefix.level or not prefix.is_universal(u):
            raise MResReject("bad-annotation", f"{u} is not a universal variable")
    la, lb = derived[j.a], derived[j.b]
    if x in la.clause and -x in lb.clause:
        pass
    elif -x in la.clause and x in lb.clause:
        la, lb = lb, la
    else:
        raise MResReject("pivot-absent", f"pivot {x} does not occur with opposite signs")
    clause = make_clause([l for l in la.clause if l != x] + [l for l in lb.clause if l != -x])
    if is_tautology(clause):
        msg = f"line {i}: tautological resolvent"
        warnings.append(msg)
        log.warning(msg)
    maps, rule = {}, {}
    for u in universals:
        ma, mb = la.maps[u], lb.maps[u]
        x_left = prefix.lv(x) < prefix.lv(u)
        if u in j.forced_merge:
            if not x_left:
                raise MResReject("merge-requires-pivot-left", f"pivot {x} is not left of {u}")
            if not is_consistent(ma, mb):
                raise MResReject("inconsistent-maps", f"maps for {u} disagree on a shared index")
            maps[u], rule[u] = merge(ma, mb, i, x), "merge"
        elif select_defined(ma, mb):
            maps[u], rule[u] = select(ma, mb), "select"
        elif x_left and is_consistent(ma, mb):
            maps[u], rule[u] = merge(ma, mb, i, x), "merge"
        else:
            raise MResReject("no-select-or-merge", f"neither select nor merge applies for {u}")
    return DerivedLine(i, clause, maps, rule)


def _compare_claims(prefix, line, d):
    if line.clause is not None:
        if any(not prefix.is_existential(l) for l in line.clause if abs(l) in prefix.level):
            raise MResReject("universal-in-clause", "stored clause has a universal literal")
        if make_clause(line.clause) != d.clause:
            raise MResReject("clause-mismatch", f"expected {d.clause}")
    if line.maps is not None:
        for u, m in line.maps.items():
            if d.maps.get(u) != m:
                raise MResReject("map-mismatch", f"merge map for {u} differs")


def annotate(f: QbfFormula, p: MResProof) -> MResProof:
    """Copy of ``p`` whose lines carry the reconstructed clauses and maps."""
    report = check_proof(f, p)
    if not report.verified:
        raise ValueError(f"proof rejected at line {report.failed_line}: {report.reason}")
    lines = tuple(
        MResLine(l.index, l.justification, d.clause, dict(d.maps))
        for l, d in zip(p.lines, report.lines)
    )
    return MResProof(lines, p.formula_ref)


def extract_strategy(f: QbfFormula, p: MResProof) -> dict[int, MergeMap]:
    """The final line's merge maps, one per universal variable."""
    report = check_proof(f, p)
    if not (report.verified and report.refutation):
        raise ValueError("strategy extraction needs a verified refutation")
    return dict(report.lines[-1].maps)


# -- trace format -----------------------------------------------------------


class MResSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


def parse_mres(text: str) -> MResProof:
    lines = []
    ref = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "p":
            if len(tokens) < 2 or tokens[1] != "mres" or len(tokens) > 3 or lines:
                raise MResSyntaxError("expected 'p mres [formula]' before proof lines", lineno)
            ref = tokens[2] if len(tokens) == 3 else None
            continue
        try:
            nums = [tokens[0]] + tokens[2:]
            index = int(tokens[0])
            kind = tokens[1]
            if kind == "a":
                if len(tokens) != 3:
                    raise MResSyntaxError("axiom line is '<i> a <clause>'", lineno)
                just = Axiom(int(tokens[2]))
            elif kind == "r":
                if len(tokens) < 5:
                    raise MResSyntaxError("resolution line is '<i> r <a> <b> <pivot> [m <u>...]'", lineno)
                a, b, x = int(tokens[2]), int(tokens[3]), int(tokens[4])
                rest = tokens[5:]
                forced = set()
                if rest:
                    if rest[0] != "m" or len(rest) < 2:
                        raise MResSyntaxError("expected 'm <u>...' after the pivot", lineno)
                    forced = {int(t) for t in rest[1:]}
                just = Resolution(a, b, x, frozenset(forced))
            else:
                raise MResSyntaxError(f"unknown line kind {kind!r}", lineno)
        except IndexError:
            raise MResSyntaxError("truncated line", lineno) from None
        except ValueError as e:
            if isinstance(e, MResSyntaxError):
                raise
            raise MResSyntaxError(f"non-integer token in {nums}", lineno) from None
        if index <= 0:
            raise MResSyntaxError("line index must be positive", lineno)
        lines.append(MResLine(index, just))
    return MResProof(tuple(lines), ref)


def write_mres(p: MResProof) -> str:
    out = [f"p mres {p.formula_ref}" if p.formula_ref else "p mres"]
    for line in p.lines:
        j = line.justification
        if isinstance(j, Axiom):
            out.append(f"{line.index} a {j.clause_no}")
        else:
            s = f"{line.index} r {j.a} {j.b} {j.pivot}"
            if j.forced_merge:
                s += " m " + " ".join(map(str, sorted(j.forced_merge)))
            out.append(s)
    return "\n".join(out) + "\n"
