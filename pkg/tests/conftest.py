import random

import pytest

from glyphforge import BinaryGrid, GridDims, KnowledgeBase, WeightMatrix

# Reference weight matrix for a letter S taught three times: every entry is
# odd with magnitude at most 3, which several suites below rely on.
S_WEIGHT_ROWS = [
    [1, 3, 3, 3, 3, 1],
    [3, 3, -3, -3, -1, -1],
    [3, -1, -3, -3, -3, -3],
    [3, 3, 1, -1, -1, -1],
    [-1, 3, 3, 3, 3, 3],
    [-3, -3, -3, -3, -3, 3],
    [3, -3, -3, -1, 1, 3],
    [3, 3, 3, 3, 3, 1],
]

S_DIMS = GridDims(6, 8)
S_TEACH_COUNT = 3


def s_reference_matrix() -> WeightMatrix:
    return WeightMatrix.from_rows(S_WEIGHT_ROWS, S_TEACH_COUNT)


def s_reference_kb_text() -> str:
    lines = ["vcrkb 1", "grid 6 8", "label S 3"]
    lines.extend(" ".join(str(v) for v in row) for row in S_WEIGHT_ROWS)
    return "\n".join(lines) + "\n"


def s_variant_grids() -> list[BinaryGrid]:
    """Three nested S patterns whose accumulated teachings reproduce
    S_WEIGHT_ROWS exactly (per-cell ink counts are (w + 3) / 2)."""
    counts = [[(v + 3) // 2 for v in row] for row in S_WEIGHT_ROWS]
    return [
        BinaryGrid.from_rows(
            [[1 if c >= level else 0 for c in row] for row in counts]
        )
        for level in (1, 2, 3)
    ]


def random_grid(rng: random.Random, dims: GridDims, density: float = 0.5) -> BinaryGrid:
    cells = bytes(1 if rng.random() < density else 0 for _ in range(dims.cell_count))
    return BinaryGrid(dims, cells)


def tight_random_grid(rng: random.Random, dims: GridDims,
                      density: float = 0.5) -> BinaryGrid:
    """Random grid whose ink bounding box spans the whole grid (one forced
    ink cell on each border), so digitizing a rendering recovers it."""
    cells = bytearray(random_grid(rng, dims, density).cells)
    w, h = dims.width, dims.height
    cells[rng.randrange(w)] = 1                            # top row
    cells[(h - 1) * w + rng.randrange(w)] = 1              # bottom row
    cells[rng.randrange(h) * w] = 1                        # left column
    cells[rng.randrange(h) * w + (w - 1)] = 1              # right column
    return BinaryGrid(dims, bytes(cells))


def grid_from_text(*rows: str) -> BinaryGrid:
    return BinaryGrid.from_text_rows(list(rows))


def pbm_plain(grid: BinaryGrid, scale: int = 1) -> bytes:
    """Render a grid as a plain PBM (P1) at the given integer scale."""
    w = grid.dims.width * scale
    h = grid.dims.height * scale
    lines = [f"P1", f"{w} {h}"]
    for y in range(grid.dims.height):
        row = grid.cells[y * grid.dims.width:(y + 1) * grid.dims.width]
        bits = " ".join(str(c) for c in row for _ in range(scale))
        lines.extend([bits] * scale)
    return ("\n".join(lines) + "\n").encode("ascii")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20210914)


def teach_many(kb: KnowledgeBase, label: str, patterns) -> None:
    for p in patterns:
        kb.teach(label, p)
