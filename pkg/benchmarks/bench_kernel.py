"""Compiled vs pure-Python time-stepping kernel.

    python3 benchmarks/bench_kernel.py [--steps 1024] [--repeat 3]

Both kernels run the same periodic steady state of a 30 GHz L-match
receiver; the script reports the best wall time of each, the speed-up and
the largest state difference between them.
"""
import argparse
import time

import numpy as np

from mixerfirst import matchsynth, rxmodel
from mixerfirst.lptv import build_network, kernel, lo_for, simulate_pss
from mixerfirst.rxmodel import Architecture, ReceiverSpec

F_LO = 30e9


def receiver():
    seed = matchsynth.synth_l_match(12, 100, F_LO)
    spec = ReceiverSpec(architecture=Architecture.L_MATCH, match=seed, rise_frac=0.0)
    return rxmodel.design_match(spec, F_LO)


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=1024, help="steps per LO period")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    spec = receiver()
    net, lo = build_network(spec), lo_for(spec)
    f_rf = F_LO * (1 + 1 / 31)

    def run(backend):
        return simulate_pss(net, lo, f_rf, args.steps, backend=backend)

    t_py, tr_py = best_of(lambda: run(kernel.advance_py), args.repeat)
    print(f"python   : {t_py * 1e3:9.1f} ms  ({tr_py.periods} windows of {len(tr_py.time)} steps)")
    if not kernel.COMPILED:
        print("compiled : not built (pip install -e . --no-build-isolation builds it)")
        return 0
    t_c, tr_c = best_of(lambda: run(kernel.advance), args.repeat)
    diff = float(np.max(np.abs(tr_c.states - tr_py.states)))
    print(f"compiled : {t_c * 1e3:9.1f} ms")
    print(f"speed-up : {t_py / t_c:9.1f}x   max |state difference| {diff:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
