"""Scoring statistics and the label selector.

For a weight matrix W and a binary input I, the candidate score psi is
the sum of W over I's ink cells, and the ideal score mu is the sum of
W's positive entries, which is the best psi any input could achieve.
Their ratio, the recognition quotient Q = psi/mu, measures match
confidence: Q never exceeds 1 and equals 1 exactly when the input inks
precisely the positive-weight cells.

Q values are exact rationals and every comparison (ordering, threshold)
is performed on them; decimals appear only in display strings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import kernels
from .errors import UndefinedQuotientError
from .grid import BinaryGrid, require_same_dims
from .knowledge import KnowledgeBase, WeightMatrix

DEFAULT_THRESHOLD = Fraction(1, 2)


def candidate_score(w: WeightMatrix, input_grid: BinaryGrid) -> int:
    """psi: sum of weights at the input's ink cells. The binary input is
    used directly; paper cells contribute nothing."""
    require_same_dims(w.dims, input_grid.dims, "input does not fit weights")
    return kernels.score(w.weights, input_grid.cells)


def ideal_score(w: WeightMatrix) -> int:
    """mu: sum of the strictly positive weights."""
    return kernels.positive_sum(w.weights)


def recognition_quotient(w: WeightMatrix, input_grid: BinaryGrid) -> Fraction:
    """Q = psi/mu as an exact rational.

    Raises UndefinedQuotientError when mu is zero (never-taught or fully
    cancelled matrix); such a label cannot be scored at all.
    """
    mu = ideal_score(w)
    if mu == 0:
        raise UndefinedQuotientError("ideal score is zero, quotient undefined")
    return Fraction(candidate_score(w, input_grid), mu)


def format_quotient(q: Fraction) -> str:
    """Two-decimal rendering of an exact quotient, halves away from zero."""
    sign = "-" if q < 0 else ""
    a = abs(q)
    cents = (200 * a.numerator + a.denominator) // (2 * a.denominator)
    return f"{sign}{cents // 100}.{cents % 100:02d}"


class DecisionKind(enum.Enum):
    MATCH = "match"
    UNKNOWN = "unknown"
    EMPTY_KB = "empty_kb"


@dataclass(frozen=True)
class LabelScore:
    """One label's scoring breakdown against an input."""

    label: str
    psi: int
    mu: int
    q: Fraction

    @property
    def q_display(self) -> str:
        return format_quotient(self.q)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "psi": self.psi,
            "mu": self.mu,
            "q_num": self.q.numerator,
            "q_den": self.q.denominator,
            "q_display": self.q_display,
        }


@dataclass(frozen=True)
class Decision:
    """Outcome of classifying one input against a knowledge base.

    ``scores`` holds every scorable label in descending-Q order (ties by
    label); ``unscorable`` lists labels whose ideal score is zero and
    which therefore took no part in the selection.
    """

    kind: DecisionKind
    best: Optional[LabelScore]
    scores: tuple
    unscorable: tuple
    threshold: Fraction

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "best": self.best.to_dict() if self.best else None,
            "scores": [s.to_dict() for s in self.scores],
            "unscorable": list(self.unscorable),
        }


def classify(kb: KnowledgeBase, input_grid: BinaryGrid,
             threshold: Fraction = DEFAULT_THRESHOLD) -> Decision:
    """Score every taught label against the input and pick the best.

    The best label is the one with the maximum Q, ties going to the
    lexicographically smallest label, so the decision is independent of
    insertion order. The result is a match when best Q >= threshold
    (inclusive, compared exactly); otherwise the pattern is unknown and
    the caller may either reject it or teach it further. With no scorable
    label at all the kind is EMPTY_KB.
    """
    require_same_dims(kb.dims, input_grid.dims, "input does not fit knowledge base")
    threshold = threshold if isinstance(threshold, Fraction) else Fraction(str(threshold))
    scores = []
    unscorable = []
    for label in kb.labels():
        w = kb._entries[label]
        mu = kernels.positive_sum(w.weights)
        if mu == 0:
            unscorable.append(label)
            continue
        psi = kernels.score(w.weights, input_grid.cells)
        scores.append(LabelScore(label, psi, mu, Fraction(psi, mu)))
    scores.sort(key=lambda s: (-s.q, s.label))
    if not scores:
        return Decision(DecisionKind.EMPTY_KB, None, (), tuple(unscorable), threshold)
    best = scores[0]
    kind = DecisionKind.MATCH if best.q >= threshold else DecisionKind.UNKNOWN
    return Decision(kind, best, tuple(scores), tuple(unscorable), threshold)
