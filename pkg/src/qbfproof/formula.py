"""QBF data model and QDIMACS reading/writing.

Literals are DIMACS-style signed integers. A clause is a tuple of literals
sorted by variable id (negative polarity first when both occur) with no
duplicates, so structural equality of clauses is set equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

EXISTS = "e"
FORALL = "a"

Clause = tuple  # tuple[int, ...], normalized by make_clause


class QdimacsError(ValueError):
    """Malformed QDIMACS input, with a 1-based line (and column if known)."""

    def __init__(self, message: str, line: int, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")


class UnboundVariableError(ValueError):
    pass


def make_clause(lits: Iterable[int]) -> Clause:
    out = set()
    for lit in lits:
        lit = int(lit)
        if lit == 0:
            raise ValueError("0 is not a literal")
        out.add(lit)
    return tuple(sorted(out, key=lambda l: (abs(l), l)))


def is_tautology(c: Sequence[int]) -> bool:
    s = set(c)
    return any(-l in s for l in s)


@dataclass(frozen=True)
class Prefix:
    """Quantifier blocks, outermost first. Adjacent blocks alternate."""

    blocks: tuple[tuple[str, tuple[int, ...]], ...]
    level: dict = field(init=False, repr=False, compare=False)
    quantifier: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        merged: list[tuple[str, list[int]]] = []
        for q, vs in self.blocks:
            if q not in (EXISTS, FORALL):
                raise ValueError(f"unknown quantifier {q!r}")
            if not vs:
                continue
            if merged and merged[-1][0] == q:
                merged[-1][1].extend(vs)
            else:
                merged.append((q, list(vs)))
        blocks = tuple((q, tuple(vs)) for q, vs in merged)
        level, quant = {}, {}
        for i, (q, vs) in enumerate(blocks, start=1):
            for v in vs:
                if v <= 0:
                    raise ValueError(f"bad variable {v}")
                if v in level:
                    raise ValueError(f"variable {v} bound twice")
                level[v] = i
                quant[v] = q
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "quantifier", quant)

    @classmethod
    def of(cls, *blocks: tuple[str, Iterable[int]]) -> "Prefix":
        return cls(tuple((q, tuple(vs)) for q, vs in blocks))

    def variables(self) -> list[int]:
        """All bound variables in prefix order."""
        return [v for _, vs in self.blocks for v in vs]

    def is_existential(self, lit: int) -> bool:
        return self.quantifier[abs(lit)] == EXISTS

    def is_universal(self, lit: int) -> bool:
        return self.quantifier[abs(lit)] == FORALL

    def lv(self, lit: int) -> int:
        return self.level[abs(lit)]

    def existentials(self) -> list[int]:
        return [v for q, vs in self.blocks if q == EXISTS for v in vs]

    def universals(self) -> list[int]:
        return [v for q, vs in self.blocks if q == FORALL for v in vs]


@dataclass(frozen=True)
class QbfFormula:
    prefix: Prefix
    matrix: tuple[Clause, ...]
    num_vars: int = 0

    def __post_init__(self):
        matrix = tuple(make_clause(c) for c in self.matrix)
        for c in matrix:
            for lit in c:
                if abs(lit) not in self.prefix.level:
                    raise UnboundVariableError(f"variable {abs(lit)} is not bound in the prefix")
        top = max(self.prefix.level, default=0)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "num_vars", max(self.num_vars, top))

    def with_matrix(self, matrix: Iterable[Sequence[int]]) -> "QbfFormula":
        return QbfFormula(self.prefix, tuple(matrix), self.num_vars)


def existential_subclause(c: Sequence[int], prefix: Prefix) -> Clause:
    for lit in c:
        if abs(lit) not in prefix.level:
            raise UnboundVariableError(f"variable {abs(lit)} is not bound in the prefix")
    return tuple(lit for lit in c if prefix.is_existential(lit))


def parse_qdimacs(text: str, lenient: bool = False) -> QbfFormula:
    """Parse QDIMACS text.

    Unbound matrix variables are an error unless ``lenient``, in which case
    they are bound in an outermost existential block. Adjacent blocks with
    the same quantifier are merged.
    """
    header = None
    blocks: list[tuple[str, list[int]]] = []
    seen: dict[int, int] = {}
    clauses: list[list[int]] = []
    current: list[int] = []
    current_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if header is not None:
                raise QdimacsError("duplicate problem line", lineno, 1)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise QdimacsError("expected 'p cnf <vars> <clauses>'", lineno, 1)
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise QdimacsError("non-integer in problem line", lineno, 1) from None
            if header[0] < 0 or header[1] < 0:
                raise QdimacsError("negative count in problem line", lineno, 1)
            continue
        if header is None:
            raise QdimacsError("missing problem line", lineno, 1)
        if tokens[0] in (EXISTS, FORALL):
            if clauses or current:
                raise QdimacsError("quantifier line after clauses", lineno, 1)
            vs = _ints(raw, tokens[1:], lineno)
            if not vs or vs[-1] != 0 or 0 in vs[:-1]:
                raise QdimacsError("quantifier line must end with a single 0", lineno)
            for v in vs[:-1]:
                if v <= 0:
                    raise QdimacsError(f"bad variable {v} in quantifier line", lineno, _col(raw, str(v)))
                if v in seen:
                    raise QdimacsError(f"variable {v} bound twice (first on line {seen[v]})", lineno, _col(raw, str(v)))
                seen[v] = lineno
            blocks.append((tokens[0], vs[:-1]))
            continue
        for lit in _ints(raw, tokens, lineno):
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if not current:
                    current_line = lineno
                current.append(lit)
    if header is None:
        raise QdimacsError("missing problem line", max(1, len(text.splitlines())))
    if current:
        raise QdimacsError("clause not terminated by 0", current_line)
    nvars, ncls = header
    if len(clauses) != ncls:
        raise QdimacsError(f"header declares {ncls} clauses, found {len(clauses)}", len(text.splitlines()))
    unbound = sorted({abs(l) for c in clauses for l in c} - set(seen))
    if unbound:
        if not lenient:
            raise UnboundVariableError(f"unbound variables in matrix: {unbound}")
        blocks.insert(0, (EXISTS, unbound))
    prefix = Prefix(tuple((q, tuple(vs)) for q, vs in blocks))
    return QbfFormula(prefix, tuple(make_clause(c) for c in clauses), nvars)


def _ints(raw: str, tokens: list[str], lineno: int) -> list[int]:
    out = []
    for tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            raise QdimacsError(f"unexpected token {tok!r}", lineno, _col(raw, tok)) from None
    return out


def _col(raw: str, tok: str) -> int:
    return raw.find(tok) + 1


def write_qdimacs(f: QbfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.matrix)}"]
    for q, vs in f.prefix.blocks:
        lines.append(" ".join([q, *map(str, vs), "0"]))
    for c in f.matrix:
        lines.append(" ".join([*map(str, c), "0"]))
    return "\n".join(lines) + "\n"
