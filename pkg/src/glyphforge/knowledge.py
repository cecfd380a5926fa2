"""Per-label weight matrices and the additive teaching update.

Teaching a pattern adds its bipolar image (ink +1, paper -1) onto the
label's weight matrix, so after n teachings every weight w obeys
|w| <= n and w == n (mod 2). Cells that are frequently inked for a label
drift positive, rarely inked ones negative; those two laws make file
corruption detectable and are enforced whenever a matrix is built from
raw data.
"""

from __future__ import annotations

import unicodedata
from array import array

from . import kernels
from .errors import (
    InvalidLabelError,
    InvariantViolationError,
    UnknownLabelError,
)
from .grid import BinaryGrid, GridDims, require_same_dims

MAX_TEACH_COUNT = 2**31 - 1
MAX_LABEL_LENGTH = 64


def validate_label(name: str) -> str:
    """Check the label rules: 1..64 characters, no whitespace, no control
    characters. Labels are case sensitive and may use any script."""
    if not isinstance(name, str):
        raise InvalidLabelError(f"label must be a string, got {type(name).__name__}")
    if not 1 <= len(name) <= MAX_LABEL_LENGTH:
        raise InvalidLabelError(
            f"label must be 1..{MAX_LABEL_LENGTH} characters, got {len(name)}"
        )
    for ch in name:
        if ch.isspace() or unicodedata.category(ch) == "Cc":
            raise InvalidLabelError(
                f"label {name!r} contains whitespace or a control character"
            )
    return name


class WeightMatrix:
    """Signed integer weights for one label, plus its teach count."""

    __slots__ = ("dims", "weights", "teach_count")

    def __init__(self, dims: GridDims, weights=None, teach_count: int = 0):
        if weights is None:
            weights = array("q", bytes(8 * dims.cell_count))
        elif not isinstance(weights, array) or weights.typecode != "q":
            weights = array("q", weights)
        if len(weights) != dims.cell_count:
            raise ValueError(
                f"expected {dims.cell_count} weights for {dims}, got {len(weights)}"
            )
        _check_weight_laws(weights, teach_count)
        self.dims = dims
        self.weights = weights
        self.teach_count = teach_count

    @classmethod
    def zero(cls, dims: GridDims) -> "WeightMatrix":
        return cls(dims)

    @classmethod
    def from_rows(cls, rows, teach_count: int) -> "WeightMatrix":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("rows must be non-empty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("all rows must have the same width")
        flat = array("q", (v for row in rows for v in row))
        return cls(GridDims(width, len(rows)), flat, teach_count)

    def rows(self) -> list[list[int]]:
        w = self.dims.width
        return [list(self.weights[i * w:(i + 1) * w]) for i in range(self.dims.height)]

    def copy(self) -> "WeightMatrix":
        dup = WeightMatrix.__new__(WeightMatrix)
        dup.dims = self.dims
        dup.weights = array("q", self.weights)
        dup.teach_count = self.teach_count
        return dup

    def max_abs(self) -> int:
        return max((abs(w) for w in self.weights), default=0)

    def absorb(self, pattern: BinaryGrid) -> None:
        """Apply one teaching: add the pattern's bipolar image onto the weights."""
        require_same_dims(self.dims, pattern.dims, "pattern does not fit weights")
        if self.teach_count >= MAX_TEACH_COUNT:
            raise OverflowError(f"teach count limit {MAX_TEACH_COUNT} reached")
        kernels.teach_accumulate(self.weights, pattern.cells)
        self.teach_count += 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return (self.dims == other.dims
                and self.teach_count == other.teach_count
                and self.weights == other.weights)

    def __repr__(self) -> str:
        return f"WeightMatrix(dims={self.dims}, teach_count={self.teach_count})"


def _check_weight_laws(weights, teach_count: int) -> None:
    if not isinstance(teach_count, int) or teach_count < 0:
        raise ValueError(f"teach_count must be a non-negative integer, got {teach_count!r}")
    if teach_count > MAX_TEACH_COUNT:
        raise InvariantViolationError(
            f"teach_count {teach_count} exceeds the {MAX_TEACH_COUNT} cap"
        )
    parity = teach_count % 2
    for i, w in enumerate(weights):
        if abs(w) > teach_count:
            raise InvariantViolationError(
                f"weight {w} at cell {i} exceeds teach count {teach_count}"
            )
        if w % 2 != parity:
            raise InvariantViolationError(
                f"weight {w} at cell {i} has wrong parity for teach count {teach_count}"
            )


class KnowledgeBase:
    """Labeled weight matrices sharing one grid size.

    Labels are case sensitive, unique, and always iterate in lexicographic
    order. Mutation (teach/forget) assumes a single writer at a time;
    reads between mutations are safe from any thread.
    """

    def __init__(self, dims: GridDims):
        self.dims = dims
        self._entries: dict[str, WeightMatrix] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, label: str) -> bool:
        return label in self._entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return self.dims == other.dims and self._entries == other._entries

    def __repr__(self) -> str:
        return f"KnowledgeBase(dims={self.dims}, labels={len(self._entries)})"

    def labels(self) -> list[str]:
        return sorted(self._entries)

    def label_counts(self) -> list[tuple[str, int]]:
        """(label, teach_count) pairs in lexicographic label order."""
        return [(label, self._entries[label].teach_count) for label in self.labels()]

    def teach(self, label: str, pattern: BinaryGrid) -> int:
        """Teach one pattern under a label, creating the label's zero matrix
        on first use. Returns the label's new teach count."""
        validate_label(label)
        require_same_dims(self.dims, pattern.dims, "pattern does not fit knowledge base")
        entry = self._entries.get(label)
        if entry is None:
            entry = WeightMatrix.zero(self.dims)
            self._entries[label] = entry
        entry.absorb(pattern)
        return entry.teach_count

    def forget(self, label: str) -> None:
        """Remove a label and its matrix. Other entries are untouched."""
        if label not in self._entries:
            raise UnknownLabelError(f"label {label!r} not in knowledge base")
        del self._entries[label]

    def weights(self, label: str) -> WeightMatrix:
        """A copy of the label's matrix; mutating it cannot touch the base."""
        entry = self._entries.get(label)
        if entry is None:
            raise UnknownLabelError(f"label {label!r} not in knowledge base")
        return entry.copy()

    def insert(self, label: str, matrix: WeightMatrix) -> None:
        """Install a full matrix under a label (used by deserialization)."""
        validate_label(label)
        require_same_dims(self.dims, matrix.dims, "matrix does not fit knowledge base")
        if label in self._entries:
            raise InvalidLabelError(f"label {label!r} already present")
        self._entries[label] = matrix
