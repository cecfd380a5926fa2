"""File formats: knowledge bases, glyph patterns, PBM/PGM rasters.

Knowledge bases use a line-oriented UTF-8 text format (LF endings):

    vcrkb 1
    grid <width> <height>
    label <name> <teach_count>
    <height> lines of <width> space-separated signed integers
    ... further label blocks, in lexicographic label order ...

Glyph patterns:

    glyph <width> <height>
    <height> lines of '#' (ink) and '.' (paper)

Writers are canonical (equal values yield byte-identical files) and
atomic (temp file + rename), so a crash never leaves a torn file and
readers never observe partial state. Readers reject anything outside the
grammar with ParseError; weight data that parses but breaks the range or
parity laws raises InvariantViolationError instead, flagging corruption.

Raster ingestion accepts Netpbm PBM (P1 plain, P4 binary) and PGM
(P2 plain, P5 binary) up to 65535 pixels per side. PBM sample value 1 is
black ink (luminance 0); PGM samples scale to 0..255 luminance by
v * 255 // maxval.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .errors import (
    InvalidLabelError,
    InvariantViolationError,
    ParseError,
)
from .grid import MAX_GRID_DIM, BinaryGrid, GridDims, Raster
from .knowledge import KnowledgeBase, WeightMatrix, validate_label

KB_MAGIC = "vcrkb"
KB_VERSION = 1
GLYPH_MAGIC = "glyph"
MAX_RASTER_DIM = 65535

_WHITESPACE = b" \t\n\r\x0b\x0c"


# ---------------------------------------------------------------------------
# knowledge base files

def dumps_kb(kb: KnowledgeBase) -> str:
    """Canonical text serialization of a knowledge base."""
    lines = [f"{KB_MAGIC} {KB_VERSION}", f"grid {kb.dims.width} {kb.dims.height}"]
    for label in kb.labels():
        matrix = kb._entries[label]
        lines.append(f"label {label} {matrix.teach_count}")
        for row in matrix.rows():
            lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def save_kb(kb: KnowledgeBase, destination) -> None:
    """Write a knowledge base atomically (temp file + rename)."""
    _atomic_write(destination, dumps_kb(kb).encode("utf-8"))


def loads_kb(text: str, source=None) -> KnowledgeBase:
    """Parse and validate knowledge base text."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    def fail(lineno, message):
        raise ParseError(message, source=source, line=lineno)

    if not lines:
        fail(1, "empty file")
    head = lines[0].split(" ")
    if len(head) != 2 or head[0] != KB_MAGIC:
        fail(1, f"expected '{KB_MAGIC} <version>' header")
    if not _is_int(head[1]):
        fail(1, f"bad version number {head[1]!r}")
    if int(head[1]) != KB_VERSION:
        fail(1, f"unsupported format version {head[1]}")

    if len(lines) < 2:
        fail(2, "missing grid line")
    grid_parts = lines[1].split(" ")
    if len(grid_parts) != 3 or grid_parts[0] != "grid":
        fail(2, "expected 'grid <width> <height>'")
    if not (_is_int(grid_parts[1]) and _is_int(grid_parts[2])):
        fail(2, "grid dimensions must be integers")
    width, height = int(grid_parts[1]), int(grid_parts[2])
    if not (1 <= width <= MAX_GRID_DIM and 1 <= height <= MAX_GRID_DIM):
        fail(2, f"grid dimensions must be in 1..{MAX_GRID_DIM}")

    kb = KnowledgeBase(GridDims(width, height))
    lineno = 3
    while lineno <= len(lines):
        header = lines[lineno - 1].split(" ")
        if len(header) != 3 or header[0] != "label":
            fail(lineno, "expected 'label <name> <teach_count>'")
        name = header[1]
        try:
            validate_label(name)
        except InvalidLabelError:
            fail(lineno, f"invalid label {name!r}")
        if name in kb:
            fail(lineno, f"duplicate label {name!r}")
        if not _is_int(header[2], signed=False):
            fail(lineno, f"teach count must be a non-negative integer, got {header[2]!r}")
        teach_count = int(header[2])
        lineno += 1

        rows = []
        for r in range(height):
            if lineno > len(lines):
                fail(lineno, f"label {name!r}: expected {height} weight rows, got {r}")
            tokens = lines[lineno - 1].split(" ")
            if len(tokens) != width or not all(_is_int(t) for t in tokens):
                fail(lineno, f"expected {width} integer weights")
            rows.append([int(t) for t in tokens])
            lineno += 1

        try:
            matrix = WeightMatrix.from_rows(rows, teach_count)
        except InvariantViolationError as exc:
            raise InvariantViolationError(
                f"{source or '<kb>'}: label {name!r}: {exc}"
            ) from None
        kb.insert(name, matrix)
    return kb


def load_kb(source) -> KnowledgeBase:
    path = Path(source)
    return loads_kb(path.read_text(encoding="utf-8"), source=str(path))


# ---------------------------------------------------------------------------
# glyph files

def dumps_glyph(grid: BinaryGrid) -> str:
    lines = [f"{GLYPH_MAGIC} {grid.dims.width} {grid.dims.height}"]
    lines.extend(grid.text_rows())
    return "\n".join(lines) + "\n"


def save_glyph(grid: BinaryGrid, destination) -> None:
    _atomic_write(destination, dumps_glyph(grid).encode("utf-8"))


def parse_glyph(text: str, source=None) -> BinaryGrid:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    def fail(lineno, message, column=None):
        raise ParseError(message, source=source, line=lineno, column=column)

    if not lines:
        fail(1, "empty file")
    head = lines[0].split(" ")
    if len(head) != 3 or head[0] != GLYPH_MAGIC:
        fail(1, f"expected '{GLYPH_MAGIC} <width> <height>' header")
    if not (_is_int(head[1]) and _is_int(head[2])):
        fail(1, "glyph dimensions must be integers")
    width, height = int(head[1]), int(head[2])
    if not (1 <= width <= MAX_GRID_DIM and 1 <= height <= MAX_GRID_DIM):
        fail(1, f"glyph dimensions must be in 1..{MAX_GRID_DIM}")
    if len(lines) - 1 != height:
        fail(len(lines), f"expected {height} rows, got {len(lines) - 1}")

    cells = bytearray()
    for r in range(height):
        row = lines[1 + r]
        if len(row) != width:
            fail(2 + r, f"expected {width} cells, got {len(row)}")
        for c, ch in enumerate(row):
            if ch == "#":
                cells.append(1)
            elif ch == ".":
                cells.append(0)
            else:
                fail(2 + r, f"invalid cell character {ch!r}", column=c + 1)
    return BinaryGrid(GridDims(width, height), bytes(cells))


def load_glyph(source) -> BinaryGrid:
    path = Path(source)
    return parse_glyph(path.read_text(encoding="utf-8"), source=str(path))


# ---------------------------------------------------------------------------
# Netpbm rasters

def parse_raster(data: bytes, source=None) -> Raster:
    """Parse PBM (P1/P4) or PGM (P2/P5) bytes into a Raster."""
    if len(data) < 2:
        raise ParseError("not a PBM/PGM file (too short)", source=source)
    magic = bytes(data[:2])
    if magic == b"P1":
        return _parse_plain_pbm(data, source)
    if magic == b"P2":
        return _parse_plain_pgm(data, source)
    if magic == b"P4":
        return _parse_raw_pbm(data, source)
    if magic == b"P5":
        return _parse_raw_pgm(data, source)
    raise ParseError(f"unsupported magic {magic!r} (want P1/P2/P4/P5)", source=source)


def load_raster(source) -> Raster:
    path = Path(source)
    return parse_raster(path.read_bytes(), source=str(path))


def _parse_dim(token: bytes, source, what: str) -> int:
    if not token.isdigit():
        raise ParseError(f"bad {what} {token!r}", source=source)
    value = int(token)
    if not 1 <= value <= MAX_RASTER_DIM:
        raise ParseError(
            f"{what} {value} out of range 1..{MAX_RASTER_DIM}", source=source
        )
    return value


def _strip_comments(data: bytes) -> bytes:
    out = bytearray()
    i = 0
    while i < len(data):
        if data[i] == 0x23:  # '#'
            while i < len(data) and data[i] != 0x0A:
                i += 1
        else:
            out.append(data[i])
            i += 1
    return bytes(out)


def _parse_plain_pbm(data: bytes, source) -> Raster:
    tokens = _strip_comments(data).split()
    if len(tokens) < 3:
        raise ParseError("truncated PBM header", source=source)
    width = _parse_dim(tokens[1], source, "width")
    height = _parse_dim(tokens[2], source, "height")
    bits = b"".join(tokens[3:])
    if len(bits) < width * height:
        raise ParseError(
            f"expected {width * height} bits, got {len(bits)}", source=source
        )
    if len(bits) > width * height:
        raise ParseError("trailing data after pixel bits", source=source)
    pixels = bytearray()
    for b in bits:
        if b == 0x31:  # '1' is black ink
            pixels.append(0)
        elif b == 0x30:
            pixels.append(255)
        else:
            raise ParseError(f"invalid bit character {chr(b)!r}", source=source)
    return Raster(width, height, bytes(pixels))


def _parse_plain_pgm(data: bytes, source) -> Raster:
    tokens = _strip_comments(data).split()
    if len(tokens) < 4:
        raise ParseError("truncated PGM header", source=source)
    width = _parse_dim(tokens[1], source, "width")
    height = _parse_dim(tokens[2], source, "height")
    maxval = _parse_maxval(tokens[3], source)
    samples = tokens[4:]
    if len(samples) != width * height:
        raise ParseError(
            f"expected {width * height} samples, got {len(samples)}", source=source
        )
    pixels = bytearray()
    for tok in samples:
        if not tok.isdigit():
            raise ParseError(f"invalid sample {tok!r}", source=source)
        v = int(tok)
        if v > maxval:
            raise ParseError(f"sample {v} exceeds maxval {maxval}", source=source)
        pixels.append(v * 255 // maxval)
    return Raster(width, height, bytes(pixels))


def _parse_maxval(token: bytes, source) -> int:
    if not token.isdigit():
        raise ParseError(f"bad maxval {token!r}", source=source)
    maxval = int(token)
    if not 1 <= maxval <= 65535:
        raise ParseError(f"maxval {maxval} out of range 1..65535", source=source)
    return maxval


def _scan_raw_header(data: bytes, n_tokens: int, source):
    """Read n_tokens whitespace/comment-separated header tokens after the
    magic, returning (tokens, offset of the first raster byte)."""
    i = 2
    tokens = []
    while len(tokens) < n_tokens:
        while i < len(data):
            c = data[i]
            if c in _WHITESPACE:
                i += 1
            elif c == 0x23:  # '#'
                while i < len(data) and data[i] != 0x0A:
                    i += 1
            else:
                break
        start = i
        while i < len(data) and data[i] not in _WHITESPACE and data[i] != 0x23:
            i += 1
        if start == i:
            raise ParseError("truncated header", source=source)
        tokens.append(data[start:i])
    if i >= len(data) or data[i] not in _WHITESPACE:
        raise ParseError("missing whitespace after header", source=source)
    return tokens, i + 1


def _parse_raw_pbm(data: bytes, source) -> Raster:
    tokens, offset = _scan_raw_header(data, 2, source)
    width = _parse_dim(tokens[0], source, "width")
    height = _parse_dim(tokens[1], source, "height")
    row_bytes = (width + 7) // 8
    if len(data) - offset < row_bytes * height:
        raise ParseError("truncated pixel data", source=source)
    pixels = bytearray(width * height)
    for y in range(height):
        row = data[offset + y * row_bytes:offset + (y + 1) * row_bytes]
        base = y * width
        for x in range(width):
            bit = (row[x >> 3] >> (7 - (x & 7))) & 1
            pixels[base + x] = 0 if bit else 255  # 1 is black ink
    return Raster(width, height, bytes(pixels))


def _parse_raw_pgm(data: bytes, source) -> Raster:
    tokens, offset = _scan_raw_header(data, 3, source)
    width = _parse_dim(tokens[0], source, "width")
    height = _parse_dim(tokens[1], source, "height")
    maxval = _parse_maxval(tokens[2], source)
    bytes_per = 1 if maxval < 256 else 2
    need = width * height * bytes_per
    if len(data) - offset < need:
        raise ParseError("truncated pixel data", source=source)
    pixels = bytearray()
    if bytes_per == 1:
        for v in data[offset:offset + need]:
            if v > maxval:
                raise ParseError(f"sample {v} exceeds maxval {maxval}", source=source)
            pixels.append(v * 255 // maxval)
    else:
        for i in range(width * height):
            v = int.from_bytes(data[offset + 2 * i:offset + 2 * i + 2], "big")
            if v > maxval:
                raise ParseError(f"sample {v} exceeds maxval {maxval}", source=source)
            pixels.append(v * 255 // maxval)
    return Raster(width, height, bytes(pixels))


# ---------------------------------------------------------------------------
# atomic writes

def _atomic_write(destination, data: bytes) -> None:
    path = os.fspath(destination)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(prefix=".glyphforge-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _is_int(token: str, signed: bool = True) -> bool:
    if signed and token.startswith("-"):
        token = token[1:]
    return token.isascii() and token.isdigit()
