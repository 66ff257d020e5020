"""Compare the compiled integrator kernel against the pure-Python twin.

Runs identical stroboscopic-map workloads through both backends and
reports per-iterate cost.  Usage: python3 benchmarks/bench_kernel.py
"""

import subprocess
import sys
import time

BENCH = r"""
import os, time
from afdo import kernel
from afdo.dynamics import Params, PhaseState
from afdo.integrate import poincare_map

p = Params(epsilon=0.2558, delta=0.05, gamma=1.0, omega=1.2, beta=0.0)
n = int(os.environ.get("AFDO_BENCH_ITERS", "500"))
# warm up, then time
poincare_map(PhaseState(0.9, 0.0), 0.0, 5, p)
t0 = time.perf_counter()
out = poincare_map(PhaseState(0.9, 0.0), 0.0, n, p)
dt = time.perf_counter() - t0
tag = "compiled" if kernel.COMPILED else "pure-python"
print(f"{tag}: {n} iterates in {dt:.3f} s "
      f"({1e6 * dt / n:.1f} us/iterate)  final=({out[-1].x:.12g}, {out[-1].y:.12g})")
"""


def run(pure):
    env = dict(__import__("os").environ)
    if pure:
        env["AFDO_PURE_PYTHON"] = "1"
        env["AFDO_BENCH_ITERS"] = env.get("AFDO_BENCH_ITERS", "50")
    else:
        env.pop("AFDO_PURE_PYTHON", None)
    proc = subprocess.run([sys.executable, "-c", BENCH], env=env,
                          capture_output=True, text=True)
    sys.stdout.write(proc.stdout)
    sys.stderr.write(proc.stderr)
    return proc.returncode


if __name__ == "__main__":
    rc = run(pure=False) or run(pure=True)
    sys.exit(rc)
