"""Pure-Python scoring and digitization kernels.

This module is the fallback used when the compiled extension is missing,
and it doubles as the extension's semantic reference: for identical
inputs, ``glyphforge._ckernels`` must return identical results.

Buffer conventions: grid cells are ``bytes`` of 0/1 values, weights are
``array('q')`` (signed 64-bit), rasters are ``bytes`` of luminance, all
row-major.
"""

from __future__ import annotations


def score(weights, cells) -> int:
    """Candidate score: sum of weights at cells equal to 1."""
    if len(weights) != len(cells):
        raise ValueError("weights and cells must have the same length")
    total = 0
    for w, c in zip(weights, cells):
        if c:
            total += w
    return total


def positive_sum(weights) -> int:
    """Ideal score: sum of the strictly positive weights."""
    total = 0
    for w in weights:
        if w > 0:
            total += w
    return total


def teach_accumulate(weights, cells) -> None:
    """Add the bipolar image of ``cells`` (1 -> +1, 0 -> -1) onto ``weights``."""
    if len(weights) != len(cells):
        raise ValueError("weights and cells must have the same length")
    for i, c in enumerate(cells):
        weights[i] += 1 if c else -1


def ink_bbox(pixels, width, height, threshold):
    """Tight bounding box of ink pixels (luminance <= threshold).

    Returns ``(x0, y0, x1, y1)`` inclusive, or ``None`` when the raster
    holds no ink at all.
    """
    x0, y0 = width, height
    x1 = y1 = -1
    for y in range(height):
        base = y * width
        for x in range(width):
            if pixels[base + x] <= threshold:
                if x < x0:
                    x0 = x
                if x > x1:
                    x1 = x
                if y < y0:
                    y0 = y
                y1 = y
    if x1 < 0:
        return None
    return x0, y0, x1, y1


def cell_index(p, source_extent, grid_extent) -> int:
    """Grid cell owning the source pixel at index ``p``.

    The pixel center (p + 1/2) is scaled by grid_extent/source_extent; a
    center landing exactly on a cell boundary belongs to the lower-index
    cell.
    """
    num = (2 * p + 1) * grid_extent
    den = 2 * source_extent
    q, r = divmod(num, den)
    return q - 1 if r == 0 else q


def grid_counts(pixels, raster_width, threshold, x0, y0, crop_w, crop_h,
                grid_w, grid_h, ink, total) -> None:
    """Accumulate per-cell ink and pixel counts over a crop window.

    ``ink`` and ``total`` are flat writable int buffers with one slot per
    grid cell.
    """
    if len(ink) != grid_w * grid_h or len(total) != grid_w * grid_h:
        raise ValueError("count buffers must have one slot per grid cell")
    col_cell = [cell_index(px, crop_w, grid_w) for px in range(crop_w)]
    for py in range(crop_h):
        row_base = (y0 + py) * raster_width + x0
        cell_base = cell_index(py, crop_h, grid_h) * grid_w
        for px in range(crop_w):
            at = cell_base + col_cell[px]
            total[at] += 1
            if pixels[row_base + px] <= threshold:
                ink[at] += 1
