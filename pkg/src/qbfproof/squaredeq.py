"""The squared-equality family EQ²(n) and its quadratic-size QRAT refutation.

Variable numbering: x_i = i, y_j = n + j, u_i = 2n + i, v_j = 3n + j and
t_{i,j} = 4n + (i - 1)n + j.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import EXISTS, FORALL, Prefix, QbfFormula
from .qrat import QratProof, QratStep


@dataclass(frozen=True)
class Eq2Vars:
    n: int

    def x(self, i): return i
    def y(self, j): return self.n + j
    def u(self, i): return 2 * self.n + i
    def v(self, j): return 3 * self.n + j
    def t(self, i, j): return 4 * self.n + (i - 1) * self.n + j


@dataclass(frozen=True)
class Eq2Instance:
    n: int
    formula: QbfFormula
    labels: dict  # 1-based clause number -> "C(i,j)", "C'(i,j)", "D(i,j)", "D'(i,j)" or "T"


def _check_n(n):
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


def _pairs(n):
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


def _labeled_clauses(n):
    """The 4n² clauses C, C', D, D' per (i, j), in matrix order."""
    w = Eq2Vars(n)
    out = []
    for i, j in _pairs(n):
        x, y, u, v, t = w.x(i), w.y(j), w.u(i), w.v(j), w.t(i, j)
        out.append((f"C({i},{j})", (x, y, u, v, t)))
        out.append((f"C'({i},{j})", (x, -y, u, -v, t)))
        out.append((f"D({i},{j})", (-x, y, -u, v, t)))
        out.append((f"D'({i},{j})", (-x, -y, -u, -v, t)))
    return out


def generate_eq2(n: int) -> Eq2Instance:
    _check_n(n)
    w = Eq2Vars(n)
    outer = [v for i in range(1, n + 1) for v in (w.x(i), w.y(i))]
    middle = [v for i in range(1, n + 1) for v in (w.u(i), w.v(i))]
    inner = [w.t(i, j) for i, j in _pairs(n)]
    prefix = Prefix.of((EXISTS, outer), (FORALL, middle), (EXISTS, inner))
    labeled = _labeled_clauses(n)
    matrix = [c for _, c in labeled] + [tuple(-t for t in inner)]
    labels = {k: name for k, (name, _) in enumerate(labeled, start=1)}
    labels[len(matrix)] = "T"
    return Eq2Instance(n, QbfFormula(prefix, tuple(matrix)), labels)


def emit_eq2_refutation(n: int) -> QratProof:
    """12n² steps: 8n² universal drops, 3n² resolvents and n² shortenings of T."""
    _check_n(n)
    w = Eq2Vars(n)
    steps = []
    for _, c in _labeled_clauses(n):
        x, y, u, v, t = c
        steps.append(QratStep.ureduce(u, (x, y, v, t)))
        steps.append(QratStep.ureduce(v, (x, y, t)))
    for i, j in _pairs(n):
        t = w.t(i, j)
        steps.append(QratStep.add((w.x(i), t)))
        steps.append(QratStep.add((-w.x(i), t)))
        steps.append(QratStep.add((t,)))
    tail = [-w.t(i, j) for i, j in _pairs(n)]
    for k in range(1, len(tail) + 1):
        steps.append(QratStep.add(tail[k:]))
    return QratProof(tuple(steps))


def countermodel(n: int) -> dict:
    """The universal strategy u_i := x_i, v_j := y_j, as truth tables."""
    from .semantics import TruthTable

    w = Eq2Vars(n)
    strategy = {}
    for i in range(1, n + 1):
        strategy[w.u(i)] = TruthTable.from_function([w.x(i)], lambda b: b)
        strategy[w.v(i)] = TruthTable.from_function([w.y(i)], lambda b: b)
    return strategy
