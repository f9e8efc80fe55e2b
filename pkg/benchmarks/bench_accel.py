"""Compare the numba and pure-numpy paths of the hot kernels.

Run ``python benchmarks/bench_accel.py``. Both paths are timed in the same
process (the module always exposes both), after one warm-up call so numba
compilation is excluded. Results are checked for agreement before timing.
"""

import argparse
import timeit

import numpy as np

from tcxy import _accel
from tcxy.edoracle import _sector_states
from tcxy.freefermion import momentum_grid


def _coo_args(n_spins):
    states = _sector_states(n_spins, None)
    lookup = np.full(1 << n_spins, -1, dtype=np.int64)
    lookup[states] = np.arange(states.size)
    return n_spins, 1.0, 0.5, 0.3, states, lookup


def _best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_coo(sizes, repeat):
    print("xy_coo (COO matrix elements of the XY chain)")
    print(f"{'N':>4} {'dim':>7} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8}")
    for n in sizes:
        args = _coo_args(n)
        a = _accel.xy_coo_numpy(*args)
        b = _accel.xy_coo_jit(*args)
        assert np.isclose(a[2].sum(), b[2].sum()) and a[0].size == b[0].size
        number = max(1, 2000 // (1 << n))
        t_np = _best(lambda: _accel.xy_coo_numpy(*args), repeat, number)
        t_nb = _best(lambda: _accel.xy_coo_jit(*args), repeat, number)
        print(f"{n:>4} {1 << n:>7} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} {t_np / t_nb:>8.2f}")


def bench_angles(sizes, repeat):
    print("angle_sums (Bogoliubov angle sums over the momentum grid)")
    print(f"{'N':>7} {'numpy [us]':>12} {'numba [us]':>12} {'speedup':>8}")
    for n in sizes:
        k = momentum_grid(n, "antiperiodic").momenta
        a = _accel.angle_sums_numpy(k, 1.0, 0.5, 0.3, 1e-12)
        b = _accel.angle_sums_jit(k, 1.0, 0.5, 0.3, 1e-12)
        assert np.allclose(a[:2], b[:2], rtol=1e-12) and a[2] == b[2]
        number = max(1, 200000 // n)
        t_np = _best(lambda: _accel.angle_sums_numpy(k, 1.0, 0.5, 0.3, 1e-12), repeat, number)
        t_nb = _best(lambda: _accel.angle_sums_jit(k, 1.0, 0.5, 0.3, 1e-12), repeat, number)
        print(f"{n:>7} {1e6 * t_np:>12.2f} {1e6 * t_nb:>12.2f} {t_np / t_nb:>8.2f}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _accel.NUMBA_ENABLED:
        print("note: numba disabled or missing; the 'numba' column runs the plain-Python loop")
    bench_coo([8, 10, 12, 14], args.repeat)
    print()
    bench_angles([40, 400, 4000, 40000], args.repeat)


if __name__ == "__main__":
    main()
