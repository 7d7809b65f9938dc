"""Compiled core vs numpy fallback on the two hot kernels.

    python3 benchmarks/bench_kernels.py [--sizes 16 64 128] [--repeat 5]
"""

from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from rackmsr import _pycore
from rackmsr.gf import make_field

try:
    from rackmsr import _gfcore
except ImportError:  # extension not built
    _gfcore = None


def bench(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def run(sizes, fields, repeat: int) -> list[dict]:
    rng = np.random.default_rng(0)
    rows = []
    for p, m in fields:
        F = make_field(p, m)
        for n in sizes:
            A = rng.integers(0, F.q, (n, n))
            B = rng.integers(0, F.q, (n, n))
            aug = np.hstack([A, B])
            cases = {
                "matmul": lambda mod: (lambda: mod.matmul(F, A, B)),
                "eliminate": lambda mod: (lambda: mod.eliminate(F, aug, n)),
            }
            for kernel, make in cases.items():
                row = {"q": F.q, "n": n, "kernel": kernel, "python_s": bench(make(_pycore), repeat)}
                if _gfcore is not None:
                    row["cython_s"] = bench(make(_gfcore), repeat)
                    row["speedup"] = row["python_s"] / row["cython_s"]
                rows.append(row)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 64, 128])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = run(args.sizes, [(3, 3), (2, 8), (257, 1)], args.repeat)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    if _gfcore is None:
        print("compiled core not built; timing the fallback only")
    print(f"{'q':>5} {'n':>5} {'kernel':>10} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for r in rows:
        cy = f"{r['cython_s'] * 1e3:10.3f}" if "cython_s" in r else f"{'-':>10}"
        sp = f"{r['speedup']:8.1f}" if "speedup" in r else f"{'-':>8}"
        print(f"{r['q']:>5} {r['n']:>5} {r['kernel']:>10} {r['python_s'] * 1e3:10.3f} {cy} {sp}")


if __name__ == "__main__":
    main()
