"""Compare the compiled window-accumulation kernel with the pure-Python one.

Usage:
    python3 benchmarks/bench_windowing.py [--records N] [--flows N] [--repeats N]

Generates one random sorted trace and times both backends on identical
input, reporting throughput and speedup. The compiled backend requires the
package to have been built with its extension; if it is unavailable only
the pure backend is timed.
"""

import argparse
import time

import numpy as np

from flowsentry._kernels import BACKEND
from flowsentry._kernels.agg_py import accumulate_windows as pure_kernel

try:
    from flowsentry._kernels._windowcore import accumulate_windows as compiled_kernel
except ImportError:
    compiled_kernel = None


def make_input(n_records: int, n_flows: int, delta: int = 200_000):
    rng = np.random.default_rng(0)
    span = delta * max(1, n_records // 2000)
    ts = np.sort(rng.integers(0, span, n_records)).astype(np.int64)
    fid = rng.integers(0, n_flows, n_records).astype(np.int64)
    nb = rng.integers(40, 1500, n_records).astype(np.int64)
    n_windows = int(ts[-1] // delta) + 1
    return ts, fid, nb, delta, n_windows


def bench(kernel, args, repeats: int) -> float:
    ts, fid, nb, delta, n_windows = args
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        kernel(ts, fid, nb, 0, delta, n_windows)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--records", type=int, default=2_000_000)
    parser.add_argument("--flows", type=int, default=5_000)
    parser.add_argument("--repeats", type=int, default=3)
    opts = parser.parse_args()

    args = make_input(opts.records, opts.flows)
    print(
        f"input: {opts.records} records, {opts.flows} flows, "
        f"{args[4]} windows (selected backend: {BACKEND})"
    )

    t_pure = bench(pure_kernel, args, opts.repeats)
    print(f"pure python : {t_pure:8.3f} s   {opts.records / t_pure / 1e6:6.2f} M records/s")

    if compiled_kernel is None:
        print("compiled    : unavailable (extension not built)")
        return 0

    t_comp = bench(compiled_kernel, args, opts.repeats)
    print(f"compiled    : {t_comp:8.3f} s   {opts.records / t_comp / 1e6:6.2f} M records/s")
    print(f"speedup     : {t_pure / t_comp:6.1f}x")

    v_p, m_p = pure_kernel(*[args[0], args[1], args[2], 0, args[3], args[4]])
    v_c, m_c = compiled_kernel(*[args[0], args[1], args[2], 0, args[3], args[4]])
    same = list(v_p) == list(v_c) and all(
        (a or {}) == (b or {}) for a, b in zip(m_p, m_c)
    )
    print(f"agreement   : {'identical output' if same else 'MISMATCH'}")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
