#!/usr/bin/env python3
"""Compare the compiled and pure-Python kernel backends.

Times the three hot paths on both backends, checks that the results agree
bit for bit, and writes one CSV row per (case, backend):

  shoot       shoot_deflection (two Dormand-Prince integrations + Richardson)
  gb_lens     deflection_gb on the lens region (nested adaptive GK15)
  integrate   one raw integrate() call from r = 1e4 b and back out

Usage:
  python benchmarks/bench_kernels.py --repeat 5 --out bench.csv
"""

import argparse
import csv
import math
import statistics
import sys
import time

from optilens import kernels
from optilens.gauss_bonnet import deflection_gb
from optilens.geodesics import shoot_deflection
from optilens.metrics import SpacetimeParams


def _raw_integrate(mod):
    b, r0 = 100.0, 1e6
    E, _, G, _ = mod.metric_terms(2, 1.0, 0.5, r0)
    y0 = (r0, 0.0, -math.sqrt((1 - b * b / G) / E), b / G)
    out = mod.integrate(2, 1.0, 0.5, y0, 0.0, 1e7, r0, 2.5, 1e-10,
                        (1e-12, 1e-12, 1e-12, 0.0), 1e3, 1_000_000, False)
    return out[2][1]


CASES = {
    "shoot": lambda: shoot_deflection("kerr", SpacetimeParams(1.0, 0.5), 100.0).angle,
    "gb_lens": lambda: deflection_gb("kerr", SpacetimeParams(1.0, 0.5), 200.0).angle,
}
ALL_CASES = ("shoot", "gb_lens", "integrate")


def time_case(fn, repeat):
    times = []
    val = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        val = fn()
        times.append(time.perf_counter() - t0)
    return val, min(times), statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timed repetitions per case")
    ap.add_argument("--cases", default=",".join(ALL_CASES), help="comma-separated subset of cases")
    ap.add_argument("--out", default=None, help="CSV path (default: standard output)")
    args = ap.parse_args(argv)

    backends = kernels.available()
    if "cython" not in backends:
        print("note: compiled kernels not built; timing the Python backend only", file=sys.stderr)

    rows = []
    values = {}
    saved = kernels.impl
    try:
        for case in args.cases.split(","):
            if case not in ALL_CASES:
                ap.error(f"unknown case {case!r}")
            for name in backends:
                mod = kernels.get(name)
                kernels.impl = mod
                fn = (lambda m=mod: _raw_integrate(m)) if case == "integrate" else CASES[case]
                val, best, med = time_case(fn, args.repeat)
                values.setdefault(case, {})[name] = val
                rows.append([case, name, args.repeat, "%.6g" % best, "%.6g" % med, "%.17g" % val])
    finally:
        kernels.impl = saved

    # speedup and parity columns
    out_rows = []
    for case, name, rep, best, med, val in rows:
        py_best = next(float(r[3]) for r in rows if r[0] == case and r[1] == "python")
        same = len(set(values[case].values())) == 1
        out_rows.append([case, name, rep, best, med, "%.2f" % (py_best / float(best)), val, int(same)])

    header = ["case", "backend", "repeat", "best_s", "median_s", "speedup_vs_python", "value",
              "backends_agree"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(out_rows)
    finally:
        if args.out:
            fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
