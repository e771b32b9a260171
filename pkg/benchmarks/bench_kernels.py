"""Time every registered kernel through numba and through its numpy path.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 4,8,16]

Prints one line per (kernel, size): best wall time of each backend and the
speed-up.  The first numba call (compilation or cache load) is excluded.
An end-to-end row times the exhaustive M_2(Z_3) table with each backend in a
fresh interpreter, since the backend is fixed at import.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from alonginv import _kernels
from alonginv._accel import KERNELS
from alonginv.corpus import complex_gaussian
from alonginv.zn import ZnSpace


def cases(sizes):
    rng = np.random.default_rng(0)
    for n in sizes:
        m = complex_gaussian(rng, (n, n))
        yield "jacobi_svd", n, (m.copy(), 60)
        yield "hessenberg", n, (m.copy(),)
        h = _kernels.hessenberg(m.copy())
        yield "hessenberg_qr_eigvals", n, (h, 500)
    for modulus in (2, 3):
        elems = ZnSpace(2, 2, modulus).elements
        yield "product_codes", f"Z{modulus}", (elems, elems, modulus)
        yield "outer_inverse_mask", f"Z{modulus}", (elems, elems[5], modulus)


def best(fn, args, repeat):
    fresh = lambda: fn(*[a.copy() if isinstance(a, np.ndarray) else a for a in args])  # noqa: E731
    number = max(1, int(0.05 / max(timeit.timeit(fresh, number=1), 1e-7)))
    return min(timeit.repeat(fresh, number=number, repeat=repeat)) / number


END_TO_END = (
    "import time; from alonginv.zn import zn_mary_table; zn_mary_table(2, 2); "
    "s = time.perf_counter(); zn_mary_table(2, 3); print(time.perf_counter() - s)"
)


def end_to_end(flag):
    env = dict(os.environ, ALONGINV_NUMBA=flag)
    subprocess.run([sys.executable, "-c", "from alonginv.zn import zn_mary_table; zn_mary_table(2, 2)"], env=env, check=True)
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True, capture_output=True, text=True)
    return float(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="4,8,16")
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'kernel':24s} {'size':>5s} {'numba':>12s} {'numpy':>12s} {'speed-up':>9s}")
    for name, size, call_args in cases(sizes):
        jitted, py = KERNELS[name]
        if jitted is None:
            print(f"{name:24s} {size!s:>5s} {'n/a':>12s}")
            continue
        jitted(*call_args)  # compile or load from cache
        t_jit, t_py = best(jitted, call_args, args.repeat), best(py, call_args, args.repeat)
        print(f"{name:24s} {size!s:>5s} {t_jit * 1e6:10.1f}us {t_py * 1e6:10.1f}us {t_py / t_jit:8.1f}x")
    if not args.skip_end_to_end:
        t_jit, t_py = end_to_end("1"), end_to_end("0")
        print(f"{'zn_mary_table M2(Z3)':24s} {'':>5s} {t_jit:11.3f}s {t_py:11.3f}s {t_py / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
