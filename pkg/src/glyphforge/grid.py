"""Fixed-dimension binary glyph grids and raster digitization.

A glyph lives on a width x height grid of cells, each 0 (paper) or 1
(ink). Arbitrary-size grayscale rasters are digitized onto such a grid by
cropping to the tight ink bounding box and voting per cell, which
normalizes away position, scale and aspect ratio: a pattern rendered at
any integer magnification digitizes back to itself.

Training uses the bipolar form of a grid (ink +1, paper -1); recognition
feeds the plain binary form directly.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .errors import DimsMismatchError, EmptyRasterError

MAX_GRID_DIM = 1024
DEFAULT_INK_THRESHOLD = 127
DEFAULT_COVERAGE = Fraction(1, 2)


@dataclass(frozen=True)
class GridDims:
    """Cell counts of a grid: width columns by height rows."""

    width: int
    height: int

    def __post_init__(self):
        for name, value in (("width", self.width), ("height", self.height)):
            if not isinstance(value, int) or not 1 <= value <= MAX_GRID_DIM:
                raise ValueError(
                    f"{name} must be an integer in 1..{MAX_GRID_DIM}, got {value!r}"
                )

    @property
    def cell_count(self) -> int:
        return self.width * self.height

    @classmethod
    def parse(cls, text: str) -> "GridDims":
        """Parse a WIDTHxHEIGHT spec such as '32x32'."""
        parts = text.lower().split("x")
        if len(parts) != 2 or not all(p.isdigit() and p for p in parts):
            raise ValueError(f"expected WIDTHxHEIGHT, got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


DEFAULT_DIMS = GridDims(32, 32)


@dataclass(frozen=True)
class BinaryGrid:
    """Row-major grid of {0,1} cells; 1 is ink."""

    dims: GridDims
    cells: bytes

    def __post_init__(self):
        if len(self.cells) != self.dims.cell_count:
            raise ValueError(
                f"expected {self.dims.cell_count} cells for {self.dims}, "
                f"got {len(self.cells)}"
            )
        if any(c > 1 for c in self.cells):
            raise ValueError("cells must be 0 or 1")

    @classmethod
    def from_rows(cls, rows) -> "BinaryGrid":
        """Build from nested sequences of 0/1 ints, one inner sequence per row."""
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("rows must be non-empty")
        width = len(rows[0])
        flat = bytearray()
        for r, row in enumerate(rows):
            if len(row) != width:
                raise ValueError(f"row {r} has {len(row)} cells, expected {width}")
            for c, v in enumerate(row):
                if v not in (0, 1):
                    raise ValueError(f"cell ({r},{c}) must be 0 or 1, got {v!r}")
                flat.append(v)
        return cls(GridDims(width, len(rows)), bytes(flat))

    @classmethod
    def from_text_rows(cls, rows, ink: str = "#", paper: str = ".") -> "BinaryGrid":
        """Build from strings of ink/paper characters, one string per row."""
        rows = list(rows)
        if not rows:
            raise ValueError("rows must be non-empty")
        width = len(rows[0])
        flat = bytearray()
        for r, row in enumerate(rows):
            if not isinstance(row, str):
                raise ValueError(f"row {r} is not a string")
            if len(row) != width or width == 0:
                raise ValueError(f"row {r} has {len(row)} cells, expected {width}")
            for c, ch in enumerate(row):
                if ch == ink:
                    flat.append(1)
                elif ch == paper:
                    flat.append(0)
                else:
                    raise ValueError(f"row {r}, column {c}: invalid cell character {ch!r}")
        return cls(GridDims(width, len(rows)), bytes(flat))

    def rows(self) -> list[list[int]]:
        w = self.dims.width
        return [list(self.cells[i * w:(i + 1) * w]) for i in range(self.dims.height)]

    def text_rows(self, ink: str = "#", paper: str = ".") -> list[str]:
        w = self.dims.width
        return [
            "".join(ink if c else paper for c in self.cells[i * w:(i + 1) * w])
            for i in range(self.dims.height)
        ]


@dataclass(frozen=True)
class BipolarGrid:
    """Row-major grid of {-1,+1} cells, the training-time image of a BinaryGrid."""

    dims: GridDims
    cells: tuple

    def __post_init__(self):
        if len(self.cells) != self.dims.cell_count:
            raise ValueError(
                f"expected {self.dims.cell_count} cells for {self.dims}, "
                f"got {len(self.cells)}"
            )
        if any(c not in (-1, 1) for c in self.cells):
            raise ValueError("cells must be -1 or +1")


@dataclass(frozen=True)
class Raster:
    """Grayscale raster; luminance 0 is black ink, 255 is white paper."""

    width: int
    height: int
    pixels: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("raster dimensions must be at least 1x1")
        if len(self.pixels) != self.width * self.height:
            raise ValueError(
                f"expected {self.width * self.height} pixels, got {len(self.pixels)}"
            )


def to_bipolar(grid: BinaryGrid) -> BipolarGrid:
    """Map a binary grid cellwise: 1 -> +1, 0 -> -1."""
    return BipolarGrid(grid.dims, tuple(1 if c else -1 for c in grid.cells))


def to_binary(grid: BipolarGrid) -> BinaryGrid:
    """Inverse of to_bipolar: +1 -> 1, -1 -> 0."""
    return BinaryGrid(grid.dims, bytes(1 if c > 0 else 0 for c in grid.cells))


def black_count(grid: BinaryGrid) -> int:
    """Number of ink cells."""
    return sum(grid.cells)


def digitize(raster: Raster, dims: GridDims,
             ink_threshold: int = DEFAULT_INK_THRESHOLD,
             coverage=DEFAULT_COVERAGE) -> BinaryGrid:
    """Sample a raster onto a fixed grid.

    Pixels with luminance <= ink_threshold count as ink. The tight ink
    bounding box is cropped out and partitioned into dims.width x
    dims.height cells: each crop pixel belongs to the cell containing its
    proportionally scaled center, with centers exactly on a boundary going
    to the lower cell index. A cell becomes ink when the fraction of ink
    pixels inside it reaches ``coverage`` (compared exactly, no floats).

    Raises EmptyRasterError when no pixel passes the ink threshold.
    """
    if not 0 <= ink_threshold <= 255:
        raise ValueError(f"ink_threshold must be in 0..255, got {ink_threshold!r}")
    cov = coverage if isinstance(coverage, Fraction) else Fraction(str(coverage))
    if not 0 < cov <= 1:
        raise ValueError(f"coverage must be in (0, 1], got {coverage!r}")

    box = kernels.ink_bbox(raster.pixels, raster.width, raster.height, ink_threshold)
    if box is None:
        raise EmptyRasterError(f"no ink pixel at threshold {ink_threshold}")
    x0, y0, x1, y1 = box
    crop_w = x1 - x0 + 1
    crop_h = y1 - y0 + 1

    n = dims.cell_count
    ink = array("q", bytes(8 * n))
    total = array("q", bytes(8 * n))
    kernels.grid_counts(raster.pixels, raster.width, ink_threshold,
                        x0, y0, crop_w, crop_h, dims.width, dims.height,
                        ink, total)

    cells = bytearray(n)
    num, den = cov.numerator, cov.denominator
    for i in range(n):
        if total[i] and ink[i] * den >= num * total[i]:
            cells[i] = 1
    return BinaryGrid(dims, bytes(cells))


def render_raster(grid: BinaryGrid, scale: int = 1,
                  ink: int = 0, paper: int = 255) -> Raster:
    """Render a grid as a raster, each cell as a scale x scale pixel block."""
    if scale < 1:
        raise ValueError("scale must be at least 1")
    w = grid.dims.width
    pixels = bytearray()
    for y in range(grid.dims.height):
        row = bytes(ink if c else paper for c in grid.cells[y * w:(y + 1) * w])
        scaled = bytearray()
        for value in row:
            scaled.extend([value] * scale)
        for _ in range(scale):
            pixels.extend(scaled)
    return Raster(w * scale, grid.dims.height * scale, bytes(pixels))


def require_same_dims(a: GridDims, b: GridDims, context: str) -> None:
    if a != b:
        raise DimsMismatchError(f"{context}: {a} vs {b}")
