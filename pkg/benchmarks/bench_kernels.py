"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--size 64] [--repeat 200]

Prints the median time per call for each kernel and for a full
``decode_frame`` on a rendered arm, plus the speed-up of the compiled
backend where it is available.
"""
import argparse
import statistics
import time

import numpy as np

from elbowpaf import ARM, Skeleton, decode_frame, kernels, render_skeleton
from elbowpaf.mapgen import RenderParams


def median_ms(fn, repeat):
    fn()
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs) * 1e3


def cases(size):
    s = size - 1
    sk = Skeleton.from_points({"shoulder": (0.3 * s, 0.2 * s), "elbow": (0.35 * s, 0.6 * s),
                               "wrist": (0.7 * s, 0.65 * s)})
    maps, fields = render_skeleton(sk, ARM, size, size, RenderParams())
    field = np.ascontiguousarray(fields[0].values)
    conf = np.ascontiguousarray(maps[1].values)
    (x1, y1), (x2, y2) = sk["shoulder"], sk["elbow"]
    return {
        "paf_render": lambda k: k.paf_render(size, size, x1, y1, x2, y2, 2.0),
        "peak_scan": lambda k: k.peak_scan(conf, 0.1),
        "line_integral": lambda k: k.line_integral(field, x1, y1, x2, y2, 10),
        "bilinear_vec": lambda k: k.bilinear_vec(field, x1 + 0.3, y1 + 0.7),
        "decode_frame": lambda k: decode_frame(maps, fields, ARM),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)

    names = sorted(kernels.available_backends())
    table = {}
    for case, fn in cases(args.size).items():
        for name in names:
            with kernels.use(name) as mod:
                table[case, name] = median_ms(lambda: fn(mod), args.repeat)

    print(f"grid {args.size}x{args.size}, median of {args.repeat} runs (ms)")
    print(f"{'kernel':<15}" + "".join(f"{n:>12}" for n in names) + "     speed-up")
    for case in cases(args.size):
        row = f"{case:<15}" + "".join(f"{table[case, n]:>12.4f}" for n in names)
        if "cython" in names:
            row += f"{table[case, 'python'] / table[case, 'cython']:>12.1f}x"
        print(row)
    if "cython" not in names:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
