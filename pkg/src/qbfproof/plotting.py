"""Figures for the ``stats`` report."""

from __future__ import annotations

from collections import Counter
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 120,
}


def proof_profile(path: str, rules: Counter, widths: Sequence[int], title: str = "") -> None:
    """Bar chart of accepted steps per rule next to clause width per step."""
    with plt.rc_context(RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3), gridspec_kw={"width_ratios": [1, 2]})
        names = sorted(rules)
        ax1.bar(names, [rules[k] for k in names], color="0.35")
        ax1.set_ylabel("steps")
        ax1.set_title("rule usage")
        ax2.step(range(1, len(widths) + 1), widths, where="mid", color="C0", lw=1)
        ax2.set_xlabel("step")
        ax2.set_ylabel("clause width")
        ax2.set_title("clause width")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def scaling(path: str, ns: Sequence[int], steps: Sequence[int]) -> None:
    """Proof length against n² for a generated family."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4, 3))
        sq = [n * n for n in ns]
        ax.plot(sq, steps, "o-", color="C0")
        ax.set_xlabel("n²")
        ax.set_ylabel("proof steps")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
