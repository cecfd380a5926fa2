"""Kernel backend selection.

Prefers the compiled extension when it was built; falls back to the pure
Python implementation otherwise. Set ``GLYPHFORGE_PURE=1`` to force the
fallback (used by the benchmark and the backend-parity tests).
"""

import os

from glyphforge import _pykernels

if os.environ.get("GLYPHFORGE_PURE"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from glyphforge import _ckernels as _impl
        BACKEND = "c"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

score = _impl.score
positive_sum = _impl.positive_sum
teach_accumulate = _impl.teach_accumulate
ink_bbox = _impl.ink_bbox
cell_index = _impl.cell_index
grid_counts = _impl.grid_counts
