"""Time the compiled and pure-Python spherical Bessel kernels.

Usage: ``python benchmarks/bench_bessel.py [--points N] [--nmax N] [--repeat N]``.
The workload mirrors a modal solve: one order sweep at many complex radii.
"""
import argparse
import timeit

import numpy as np

from skinlayer import _bessel_py

try:
    from skinlayer import _bessel_cy
except ImportError:  # pragma: no cover
    _bessel_cy = None


def workload(points, seed=0):
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.05, 50.0, points)
    z = r * np.exp(1j * rng.uniform(-np.pi, np.pi, points))
    return z


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--nmax", type=int, default=30)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    z = workload(args.points)
    kernels = {"python": _bessel_py.sph_jy_scaled}
    if _bessel_cy is not None:
        kernels["cython"] = _bessel_cy.sph_jy_scaled
    else:
        print("compiled kernel not built; timing the fallback only")
    times = {}
    for name, fn in kernels.items():
        best = min(timeit.repeat(lambda: fn(args.nmax, z), number=1, repeat=args.repeat))
        times[name] = best
        print(f"{name:>7}: {best * 1e3:9.2f} ms for {args.points} points, nmax={args.nmax}")
    if len(times) == 2:
        jp, yp = kernels["python"](args.nmax, z)
        jc, yc = kernels["cython"](args.nmax, z)
        diff = max(np.max(np.abs(jp - jc)), np.max(np.abs(yp - yc)))
        print(f"speedup: {times['python'] / times['cython']:.1f}x; max |difference| {diff:.1e}")


if __name__ == "__main__":
    main()
