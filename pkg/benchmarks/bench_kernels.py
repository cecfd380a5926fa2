#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot paths on a synthetic workload: classification scoring
over a knowledge base, teaching updates, and raster digitization counts.

    python benchmarks/bench_kernels.py [--grid 32x32] [--labels 40]
                                       [--teachings 20] [--repeat 5]
"""

import argparse
import random
import sys
import time
from array import array
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from glyphforge import _pykernels  # noqa: E402
from glyphforge.grid import GridDims  # noqa: E402

try:
    from glyphforge import _ckernels
except ImportError:
    _ckernels = None


def build_workload(dims: GridDims, labels: int, teachings: int, seed: int = 99):
    rng = random.Random(seed)
    n = dims.cell_count
    matrices = []
    for _ in range(labels):
        weights = array("q", bytes(8 * n))
        for _ in range(teachings):
            cells = bytes(rng.randint(0, 1) for _ in range(n))
            _pykernels.teach_accumulate(weights, cells)
        matrices.append(weights)
    probes = [bytes(rng.randint(0, 1) for _ in range(n)) for _ in range(50)]
    scale = 4
    raster_w, raster_h = dims.width * scale, dims.height * scale
    raster = bytes(rng.choice((0, 255)) for _ in range(raster_w * raster_h))
    return matrices, probes, (raster, raster_w, raster_h)


def time_call(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_backend(impl, dims, matrices, probes, raster_case, repeat):
    raster, rw, rh = raster_case
    n = dims.cell_count

    def classify_pass():
        for probe in probes:
            for weights in matrices:
                impl.positive_sum(weights)
                impl.score(weights, probe)

    def teach_pass():
        weights = array("q", bytes(8 * n))
        for probe in probes:
            impl.teach_accumulate(weights, probe)

    def digitize_pass():
        for _ in range(20):
            box = impl.ink_bbox(raster, rw, rh, 127)
            x0, y0, x1, y1 = box
            ink = array("q", bytes(8 * n))
            total = array("q", bytes(8 * n))
            impl.grid_counts(raster, rw, 127, x0, y0, x1 - x0 + 1, y1 - y0 + 1,
                             dims.width, dims.height, ink, total)

    return {
        "classify": time_call(classify_pass, repeat),
        "teach": time_call(teach_pass, repeat),
        "digitize": time_call(digitize_pass, repeat),
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", default="32x32")
    parser.add_argument("--labels", type=int, default=40)
    parser.add_argument("--teachings", type=int, default=20)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    dims = GridDims.parse(args.grid)
    matrices, probes, raster_case = build_workload(dims, args.labels, args.teachings)
    print(f"workload: grid {dims}, {args.labels} labels x {args.teachings} teachings, "
          f"{len(probes)} probes, raster {raster_case[1]}x{raster_case[2]}")

    results = {"python": bench_backend(_pykernels, dims, matrices, probes,
                                       raster_case, args.repeat)}
    if _ckernels is not None:
        results["c"] = bench_backend(_ckernels, dims, matrices, probes,
                                     raster_case, args.repeat)
    else:
        print("compiled kernels not built; run `python setup.py build_ext --inplace`")

    print(f"\n{'kernel':<10} {'python':>12} {'c':>12} {'speedup':>9}")
    for name in ("classify", "teach", "digitize"):
        py = results["python"][name]
        if "c" in results:
            cc = results["c"][name]
            print(f"{name:<10} {py * 1e3:>10.2f}ms {cc * 1e3:>10.2f}ms "
                  f"{py / cc:>8.1f}x")
        else:
            print(f"{name:<10} {py * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
