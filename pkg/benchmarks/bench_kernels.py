"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from tnormal import _pykernels
from tnormal.kernels import backends


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench_atoms(mods, repeat):
    for b, n in [(2, 16), (2, 20), (3, 12), (4, 10)]:
        row, ref = [], None
        for name, mod in mods.items():
            secs, out = _best(lambda: mod.atom_numerators(b, n, 0, 3), repeat)
            if ref is None:
                ref = list(out)
            assert list(out) == ref, f"{name} disagrees on atoms b={b} n={n}"
            row.append(f"{name}={secs * 1e3:8.2f} ms")
        print(f"atoms  b={b} n={n:2d} strings={b ** n:>8d}  " + "  ".join(row))


def bench_scan(mods, repeat):
    rng = np.random.default_rng(7)
    q = (1 << 31) - 1
    for N in [1 << 12, 1 << 16, 1 << 18]:
        u = np.sort(rng.integers(0, q, size=N, dtype=np.int64))
        row, ref = [], None
        for name, mod in mods.items():
            secs, out = _best(lambda: mod.discrepancy_scan(u, q, N), repeat)
            if ref is None:
                ref = int(out)
            assert int(out) == ref, f"{name} disagrees on scan N={N}"
            row.append(f"{name}={secs * 1e3:8.2f} ms")
        print(f"scan   N={N:>7d}  " + "  ".join(row))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    mods = backends()
    if "compiled" not in mods:
        print("compiled extension not built; timing the fallback only")
    mods = {"python": _pykernels, **{k: v for k, v in mods.items() if k != "python"}}
    bench_atoms(mods, args.repeat)
    bench_scan(mods, args.repeat)


if __name__ == "__main__":
    main()
