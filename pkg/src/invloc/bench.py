"""Compare the numba and numpy kernel backends.

    python -m invloc.bench [--repeat 5]

Kernels are timed on random sites, then one full inverse run on the bundled
Ruspini coordinates is timed under each backend. The first numba call is a
warm-up and is not counted.
"""

from __future__ import annotations

import argparse
import time
from importlib.resources import files

import numpy as np

from . import _accel, _kernels
from .ingest import GeneratorConfig, ingest_coordinates
from .model import Norm
from .rowgen import solve_inverse


def _best_of(fn, repeat):
    fn()  # warm-up, also triggers compilation
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(n=2000, seed=0):
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, 100.0, size=(n, 2))
    w = rng.uniform(1.0, 10.0, size=n)
    hist = np.empty(501)
    tab = rng.standard_normal((120, 400))
    tab[7, 11] = 2.0

    def cases(b):
        get = lambda name: _kernels.get_for(b, name)  # noqa: E731
        return {
            "dist_many": lambda: get("dist_many")(coords, 40.0, 60.0, 3.0),
            "minisum_smooth": lambda: get("minisum_smooth")(coords, w, 40.0, 60.0, 5.0, 1e-4),
            "minimax_smooth": lambda: get("minimax_smooth")(coords, w, 40.0, 60.0, 5.0, 1e-4,
                                                            0.01),
            "weiszfeld": lambda: get("weiszfeld")(coords, w, 50.0, 50.0, 1e-10, 500, 1e-10, hist),
            "pivot": lambda: get("pivot")(tab.copy(), 7, 11),
        }

    return cases


def run(repeat=5):
    rows = []
    cases = kernel_cases()
    backends = [b for b in _accel.BACKENDS if b != "numba" or _accel.HAS_NUMBA]
    timed = {b: {k: _best_of(f, repeat) for k, f in cases(b).items()} for b in backends}
    for name in timed[backends[0]]:
        rows.append((name, *(timed[b][name] for b in backends)))

    text = (files("invloc") / "data" / "ruspini.txt").read_text()
    inst = ingest_coordinates(text, GeneratorConfig(1), Norm(3.0))
    full = []
    for b in backends:
        prev = _accel.set_backend(b)
        try:
            full.append(_best_of(lambda: solve_inverse(inst, (50.0, 50.0)), max(1, repeat // 2)))
        finally:
            _accel.set_backend(prev)
    rows.append(("inverse ruspini p=3", *full))
    return backends, rows


def main(argv=None):
    ap = argparse.ArgumentParser(description="numba vs numpy kernel timings")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends, rows = run(args.repeat)
    head = f"{'case':<22}" + "".join(f"{b + ' [ms]':>14}" for b in backends)
    if len(backends) == 2:
        head += f"{'speedup':>10}"
    print(head)
    for name, *ts in rows:
        line = f"{name:<22}" + "".join(f"{1e3 * t:>14.3f}" for t in ts)
        if len(ts) == 2:
            line += f"{ts[1] / ts[0]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
