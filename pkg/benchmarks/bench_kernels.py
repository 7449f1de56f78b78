"""Compare the numba-compiled plant kernel with its pure Python fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--scenario NAME]

Kernel timings run in-process (both variants are importable side by side).
Full-run timings start a fresh interpreter per variant so that the
``NCSIM_DISABLE_NUMBA`` switch picks which kernel the simulator uses.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from ncsim import _kernels

_RUN_SNIPPET = """
import json, time
from ncsim import _kernels
from ncsim.experiments import bundled, run_scenario
s = bundled({name!r})
run_scenario(s)  # warm-up, includes compilation when numba is active
best = float("inf")
for _ in range({repeat}):
    t0 = time.perf_counter()
    run_scenario(s)
    best = min(best, time.perf_counter() - t0)
print(json.dumps({{"numba": _kernels.USING_NUMBA, "seconds": best}}))
"""


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernels(repeat):
    grid = np.arange(1, 5001) * 1e-4
    out = np.empty_like(grid)
    jit, py = _kernels.step_response_grid, _kernels.step_response_grid_py
    jit(grid, 1e-4, out)  # compile
    rows = [("step response, 5000 points", best_of(lambda: py(grid, 1e-4, out), repeat), best_of(lambda: jit(grid, 1e-4, out), repeat))]

    adv_jit, adv_py = _kernels.rk4_advance, _kernels.rk4_advance_py
    adv_jit(0.0, 0.0, 1.0, 0.01, 1e-4)

    def calls(f):
        return lambda: [f(0.1, 0.2, 1.0, 0.01, 1e-4) for _ in range(1000)]

    rows.append(("1000 sampling intervals of 10 ms", best_of(calls(adv_py), repeat), best_of(calls(adv_jit), repeat)))
    return rows


def bench_run(name, repeat):
    res = {}
    for label, flag in (("python", "1"), ("numba", "0")):
        env = {**os.environ, "NCSIM_DISABLE_NUMBA": flag}
        code = _RUN_SNIPPET.format(name=name, repeat=repeat)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        res[label] = json.loads(out.stdout.strip().splitlines()[-1])
    return res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scenario", default="can_config_b")
    args = ap.parse_args(argv)

    if not _kernels.USING_NUMBA:
        print("numba is disabled in this interpreter; kernel rows compare the fallback with itself")
    print(f"{'kernel':<36}{'python':>12}{'numba':>12}{'speedup':>10}")
    for label, t_py, t_jit in bench_kernels(args.repeat):
        print(f"{label:<36}{t_py * 1e3:>10.2f}ms{t_jit * 1e3:>10.2f}ms{t_py / t_jit:>9.1f}x")

    r = bench_run(args.scenario, args.repeat)
    t_py, t_jit = r["python"]["seconds"], r["numba"]["seconds"]
    print(f"{'full run: ' + args.scenario:<36}{t_py * 1e3:>10.1f}ms{t_jit * 1e3:>10.1f}ms{t_py / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()
