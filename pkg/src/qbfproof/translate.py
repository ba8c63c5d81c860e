"""Compile an MRes refutation into a QRAT refutation.

Every MRes line becomes one addition: axioms add the existential part of
their input clause, resolution lines add the resolvent. The result checks
under universal-aware AT without any reduction or deletion lines.
"""

from __future__ import annotations

from .formula import QbfFormula
from .mres import MResProof, check_proof as check_mres
from .qrat import QratProof, QratStep


def translate(f: QbfFormula, p: MResProof) -> QratProof:
    report = check_mres(f, p)
    if not (report.verified and report.refutation):
        where = f" (line {report.failed_line}: {report.reason})" if report.failed_line else ""
        raise ValueError("translation needs a verified MRes refutation" + where)
    return QratProof(tuple(QratStep.add(d.clause) for d in report.lines))
