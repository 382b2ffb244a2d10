"""Compiled vs numpy kernels: agreement and timings.

    python benchmarks/bench_kernels.py [--repeat 5] [--json]

The numpy backend is the reference; each compiled kernel must agree with it
to rounding error before its timing counts.
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

import numpy as np

from famedkit import _kernels_py, kernels

try:
    from famedkit import _kernels as compiled
except ImportError:
    compiled = None


def _time(fn, repeat: int) -> float:
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def cases(rng):
    z = rng.normal(size=4000) + 0.3j * rng.normal(size=4000)
    t = np.linspace(0.01, 20, 600)
    w = rng.normal(size=600)
    yield "sin_sum 4000x600", (z, t, w), {}
    f1, f2 = (rng.normal(size=400) + 1j * rng.normal(size=400) for _ in range(2))
    y1, y2 = (rng.normal(size=400) * (1 + 0.1j) for _ in range(2))
    yield "coupled_sum2 400^2", (f1, y1, f2, y2, 0.3j), {}
    g = [rng.normal(size=80) + 1j * rng.normal(size=80) for _ in range(3)]
    y = [rng.normal(size=80) * (1 + 0.1j) for _ in range(3)]
    yield "coupled_sum3 80^3", (g[0], y[0], g[1], y[1], g[2], y[2], 0.2j, -0.1j, 0.15j), {}


def kernel_rows(repeat: int):
    rng = np.random.default_rng(1)
    rows = []
    for label, args, kw in cases(rng):
        name = label.split()[0]
        ref_fn = getattr(_kernels_py, name)
        ref = ref_fn(*args, **kw)
        row = {"kernel": label, "numpy_s": _time(lambda: ref_fn(*args, **kw), repeat)}
        if compiled is not None:
            fn = getattr(compiled, name)
            got = fn(*args, **kw)
            row["max_rel_diff"] = float(np.max(np.abs(np.asarray(got) - ref)) / max(1e-300, np.max(np.abs(ref))))
            row["compiled_s"] = _time(lambda: fn(*args, **kw), repeat)
            row["speedup"] = row["numpy_s"] / row["compiled_s"]
        rows.append(row)
    return rows


def end_to_end(repeat: int):
    """One partition value of 4_1 with each backend swapped in."""
    from famedkit.angle_structures import maximize_volume
    from famedkit.partition_jones import partition_log_modulus
    from famedkit.triangulation import load_preset

    tri = load_preset("fig8")
    alpha = maximize_volume(tri).maximizer
    out = {}
    impls = {"numpy": _kernels_py}
    if compiled is not None:
        impls["compiled"] = compiled
    saved = (kernels.sin_sum, kernels.coupled_sum2, kernels.coupled_sum3)
    try:
        for label, impl in impls.items():
            kernels.sin_sum, kernels.coupled_sum2, kernels.coupled_sum3 = impl.sin_sum, impl.coupled_sum2, impl.coupled_sum3
            value = partition_log_modulus(tri, alpha, 0.6).log_modulus
            out[label] = {"log_modulus": value,
                          "seconds": _time(lambda: partition_log_modulus(tri, alpha, 0.6), repeat)}
    finally:
        kernels.sin_sum, kernels.coupled_sum2, kernels.coupled_sum3 = saved
    return out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", action="store_true")
    args = p.parse_args(argv)
    rows = kernel_rows(args.repeat)
    e2e = end_to_end(max(1, args.repeat // 2))
    if args.json:
        json.dump({"kernels": rows, "partition_b0.6": e2e, "compiled_available": compiled is not None}, sys.stdout, indent=2)
        print()
        return 0
    if compiled is None:
        print("compiled extension not built; numpy timings only")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'compiled [ms]':>15}{'speedup':>9}{'max rel diff':>14}")
    for r in rows:
        c = r.get("compiled_s")
        print(f"{r['kernel']:<22}{1e3 * r['numpy_s']:>12.2f}"
              + (f"{1e3 * c:>15.2f}{r['speedup']:>9.2f}{r['max_rel_diff']:>14.1e}" if c else ""))
    for label, v in e2e.items():
        print(f"partition 4_1, b = 0.6, {label}: {v['seconds']:.3f} s, log|Z| = {v['log_modulus']:.15f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
