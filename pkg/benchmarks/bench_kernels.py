"""Time the exhaustive sweep with compiled kernels against the plain-Python
fallback.  Each mode runs in its own interpreter because the fallback is
chosen at import time by ONDOMSET_DISABLE_NUMBA.

    python3 benchmarks/bench_kernels.py --max-n 8
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
from ondomset import _kernels
from ondomset.experiment import exhaustive_small_sweep
n = int(sys.argv[1])
exhaustive_small_sweep(4)  # compile (or warm up) outside the timed region
t = time.perf_counter()
lines = exhaustive_small_sweep(n, min_n=n)
print(json.dumps({"numba": _kernels.HAVE_NUMBA, "seconds": time.perf_counter() - t,
                  "count": lines[0].count, "max_ratio": str(lines[0].max_ratio), "ok": lines[0].ok}))
"""


def run(n: int, disable: bool) -> dict:
    env = dict(os.environ, ONDOMSET_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", CHILD, str(n)], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-n", type=int, default=5)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    print(f"{'n':>3} {'inputs':>8} {'numba s':>10} {'python s':>10} {'speedup':>8}  agree")
    for n in range(args.min_n, args.max_n + 1):
        fast, slow = run(n, False), run(n, True)
        same = (fast["count"], fast["max_ratio"], fast["ok"]) == (slow["count"], slow["max_ratio"], slow["ok"])
        speed = slow["seconds"] / max(fast["seconds"], 1e-9)
        print(f"{n:>3} {fast['count']:>8} {fast['seconds']:>10.4f} {slow['seconds']:>10.4f} {speed:>8.1f}  {same}")


if __name__ == "__main__":
    main()
