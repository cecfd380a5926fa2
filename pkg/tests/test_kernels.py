"""Backend parity: the compiled kernels must match the pure-Python ones."""

import os
import random
import subprocess
import sys
from array import array
from fractions import Fraction

import pytest

from glyphforge import _pykernels, kernels

try:
    from glyphforge import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(
    _ckernels is None, reason="compiled kernels not built"
)

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels else [])


def random_case(rng, cells_n):
    weights = array("q", (rng.randint(-50, 50) for _ in range(cells_n)))
    cells = bytes(rng.randint(0, 1) for _ in range(cells_n))
    return weights, cells


@needs_compiled
def test_score_parity():
    rng = random.Random(7)
    for _ in range(200):
        weights, cells = random_case(rng, rng.randint(1, 200))
        assert _ckernels.score(weights, cells) == _pykernels.score(weights, cells)


@needs_compiled
def test_positive_sum_parity():
    rng = random.Random(8)
    for _ in range(200):
        weights, _ = random_case(rng, rng.randint(1, 200))
        assert _ckernels.positive_sum(weights) == _pykernels.positive_sum(weights)


@needs_compiled
def test_teach_accumulate_parity():
    rng = random.Random(9)
    for _ in range(100):
        weights, cells = random_case(rng, rng.randint(1, 100))
        a, b = array("q", weights), array("q", weights)
        _ckernels.teach_accumulate(a, cells)
        _pykernels.teach_accumulate(b, cells)
        assert a == b


@needs_compiled
def test_ink_bbox_parity():
    rng = random.Random(10)
    for _ in range(100):
        w, h = rng.randint(1, 20), rng.randint(1, 20)
        pixels = bytes(rng.choice((0, 60, 127, 128, 255)) for _ in range(w * h))
        thr = rng.choice((0, 127, 200, 255))
        assert (_ckernels.ink_bbox(pixels, w, h, thr)
                == _pykernels.ink_bbox(pixels, w, h, thr))


@needs_compiled
def test_grid_counts_parity():
    rng = random.Random(11)
    for _ in range(60):
        w, h = rng.randint(1, 24), rng.randint(1, 24)
        pixels = bytes(rng.choice((0, 255)) for _ in range(w * h))
        x0 = rng.randrange(w)
        y0 = rng.randrange(h)
        crop_w = rng.randint(1, w - x0)
        crop_h = rng.randint(1, h - y0)
        gw, gh = rng.randint(1, 6), rng.randint(1, 6)
        buffers = []
        for impl in (_ckernels, _pykernels):
            ink = array("q", bytes(8 * gw * gh))
            total = array("q", bytes(8 * gw * gh))
            impl.grid_counts(pixels, w, 127, x0, y0, crop_w, crop_h, gw, gh, ink, total)
            buffers.append((ink, total))
        assert buffers[0] == buffers[1]


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_cell_index_matches_rational_definition(impl):
    # Independent reference: the scaled pixel center as an exact rational,
    # floored, with integer boundary values going to the lower cell.
    for src in range(1, 17):
        for dst in range(1, 17):
            for p in range(src):
                center = Fraction(2 * p + 1, 2) * dst / src
                expected = (center.numerator // center.denominator - 1
                            if center.denominator == 1 else
                            center.numerator // center.denominator)
                assert impl.cell_index(p, src, dst) == expected


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_length_mismatch_rejected(impl):
    with pytest.raises(ValueError):
        impl.score(array("q", [1, 2]), b"\x01")
    with pytest.raises(ValueError):
        impl.teach_accumulate(array("q", [1]), b"\x01\x00")


def test_env_var_forces_pure_backend():
    code = "from glyphforge import kernels; print(kernels.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True, text=True, check=True,
        env={"GLYPHFORGE_PURE": "1", "PATH": "/usr/bin:/bin",
             "PYTHONPATH": "src"},
        cwd=str(__import__("pathlib").Path(__file__).resolve().parent.parent),
    ).stdout.strip()
    assert out == "python"


@needs_compiled
def test_compiled_backend_selected_by_default():
    if os.environ.get("GLYPHFORGE_PURE"):
        pytest.skip("pure backend forced by environment")
    assert kernels.BACKEND == "c"
