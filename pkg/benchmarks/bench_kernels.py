"""Time the numba loop kernels against their numpy twins.

Usage::

    python3 benchmarks/bench_kernels.py [--dims 2 4 8 16] [--repeat 5]

Both paths are called directly, so the result does not depend on
``LIOUVILLE_DISABLE_NUMBA``.  The first numba call (compilation or cache load)
is excluded from the timings.
"""
import argparse
import timeit

import numpy as np

from liouville import _accel


def cases(d, rng):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = x + x.conj().T
    s = rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d))
    jumps = np.ascontiguousarray(rng.normal(size=(3, d, d)) + 1j * rng.normal(size=(3, d, d)))
    rates = np.array([0.3, 1.0, 0.1])
    return {
        "kron": (_accel.kron_loops, _accel.kron_numpy, (x, h)),
        "reshuffle": (_accel.reshuffle_loops, _accel.reshuffle_numpy, (s, d)),
        "dissipator": (_accel.dissipator_loops, _accel.dissipator_numpy, (rates, jumps)),
        "unitary": (_accel.unitary_generator_loops, _accel.unitary_generator_numpy, (h,)),
    }


def best_time(fn, args, repeat):
    fn(*args)
    number = max(1, int(0.02 / max(1e-7, timeit.timeit(lambda: fn(*args), number=1))))
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8, 16])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"numba available: {_accel.HAS_NUMBA}; active backend: {_accel.backend()}")
    print(f"{'kernel':<11}{'d':>4}{'numba [us]':>14}{'numpy [us]':>14}{'speedup':>10}")
    for d in args.dims:
        for name, (fast, ref, call) in cases(d, rng).items():
            out_fast, out_ref = fast(*call), ref(*call)
            err = np.abs(out_fast - out_ref).max() / max(1.0, np.abs(out_ref).max())
            if err > 1e-12:
                raise SystemExit(f"{name} d={d}: paths disagree ({err:.2e})")
            t_fast = best_time(fast, call, args.repeat)
            t_ref = best_time(ref, call, args.repeat)
            print(f"{name:<11}{d:>4}{t_fast * 1e6:>14.2f}{t_ref * 1e6:>14.2f}{t_ref / t_fast:>10.2f}")


if __name__ == "__main__":
    main()
