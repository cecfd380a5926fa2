"""glyphforge: teachable optical character recognition on binary grids.

Rasters are digitized into fixed-size binary grids, labeled characters
are learned by additive weight-matrix updates, and candidates are
classified by an exact rational recognition quotient. A CLI, a text
knowledge-base format, and a small HTTP teaching service sit on top; see
the README for usage.
"""

from .errors import (
    DimsMismatchError,
    EmptyRasterError,
    GlyphforgeError,
    InvalidLabelError,
    InvariantViolationError,
    ParseError,
    UndefinedQuotientError,
    UnknownLabelError,
)
from .grid import (
    DEFAULT_COVERAGE,
    DEFAULT_DIMS,
    DEFAULT_INK_THRESHOLD,
    BinaryGrid,
    BipolarGrid,
    GridDims,
    Raster,
    black_count,
    digitize,
    render_raster,
    to_binary,
    to_bipolar,
)
from .knowledge import KnowledgeBase, WeightMatrix, validate_label
from .recognition import (
    DEFAULT_THRESHOLD,
    Decision,
    DecisionKind,
    LabelScore,
    candidate_score,
    classify,
    format_quotient,
    ideal_score,
    recognition_quotient,
)
from .store import (
    load_glyph,
    load_kb,
    load_raster,
    save_glyph,
    save_kb,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryGrid",
    "BipolarGrid",
    "Decision",
    "DecisionKind",
    "DimsMismatchError",
    "EmptyRasterError",
    "GlyphforgeError",
    "GridDims",
    "InvalidLabelError",
    "InvariantViolationError",
    "KnowledgeBase",
    "LabelScore",
    "ParseError",
    "Raster",
    "UndefinedQuotientError",
    "UnknownLabelError",
    "WeightMatrix",
    "black_count",
    "candidate_score",
    "classify",
    "digitize",
    "format_quotient",
    "ideal_score",
    "load_glyph",
    "load_kb",
    "load_raster",
    "recognition_quotient",
    "render_raster",
    "save_glyph",
    "save_kb",
    "to_binary",
    "to_bipolar",
    "validate_label",
    "DEFAULT_COVERAGE",
    "DEFAULT_DIMS",
    "DEFAULT_INK_THRESHOLD",
    "DEFAULT_THRESHOLD",
]
