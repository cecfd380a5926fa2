# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring and digitization kernels.

Must behave exactly like glyphforge._pykernels; the test suite checks the
two backends against each other.
"""

from libc.stdlib cimport free, malloc


def score(const long long[::1] weights, const unsigned char[::1] cells):
    cdef Py_ssize_t i, n = weights.shape[0]
    cdef long long total = 0
    if cells.shape[0] != n:
        raise ValueError("weights and cells must have the same length")
    for i in range(n):
        if cells[i]:
            total += weights[i]
    return total


def positive_sum(const long long[::1] weights):
    cdef Py_ssize_t i, n = weights.shape[0]
    cdef long long total = 0
    for i in range(n):
        if weights[i] > 0:
            total += weights[i]
    return total


def teach_accumulate(long long[::1] weights, const unsigned char[::1] cells):
    cdef Py_ssize_t i, n = weights.shape[0]
    if cells.shape[0] != n:
        raise ValueError("weights and cells must have the same length")
    for i in range(n):
        if cells[i]:
            weights[i] += 1
        else:
            weights[i] -= 1


def ink_bbox(const unsigned char[::1] pixels, Py_ssize_t width, Py_ssize_t height,
             int threshold):
    cdef Py_ssize_t x, y, base
    cdef Py_ssize_t x0 = width, y0 = height, x1 = -1, y1 = -1
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
    return (x0, y0, x1, y1)


cdef inline Py_ssize_t _cell_index(Py_ssize_t p, Py_ssize_t src, Py_ssize_t dst) nogil:
    cdef Py_ssize_t num = (2 * p + 1) * dst
    cdef Py_ssize_t den = 2 * src
    if num % den == 0:
        return num // den - 1
    return num // den


def cell_index(p, source_extent, grid_extent):
    return _cell_index(p, source_extent, grid_extent)


def grid_counts(const unsigned char[::1] pixels, Py_ssize_t raster_width, int threshold,
                Py_ssize_t x0, Py_ssize_t y0, Py_ssize_t crop_w, Py_ssize_t crop_h,
                Py_ssize_t grid_w, Py_ssize_t grid_h,
                long long[::1] ink, long long[::1] total):
    cdef Py_ssize_t px, py, row_base, cell_base, at
    if ink.shape[0] != grid_w * grid_h or total.shape[0] != grid_w * grid_h:
        raise ValueError("count buffers must have one slot per grid cell")
    cdef Py_ssize_t *col_cell = <Py_ssize_t *> malloc(crop_w * sizeof(Py_ssize_t))
    if col_cell == NULL:
        raise MemoryError()
    try:
        for px in range(crop_w):
            col_cell[px] = _cell_index(px, crop_w, grid_w)
        for py in range(crop_h):
            row_base = (y0 + py) * raster_width + x0
            cell_base = _cell_index(py, crop_h, grid_h) * grid_w
            for px in range(crop_w):
                at = cell_base + col_cell[px]
                total[at] += 1
                if pixels[row_base + px] <= threshold:
                    ink[at] += 1
    finally:
        free(col_cell)
