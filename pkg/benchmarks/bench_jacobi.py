"""Time the compiled and pure-Python Jacobi kernels on random Hermitian matrices.

    python benchmarks/bench_jacobi.py [--sizes 2 4 8 16] [--repeat 50] [--seed 0]

Also times 500 Halmos dilations end to end under each backend, which is the
workload where the kernel dominates.
"""

import argparse
import time

import numpy as np

from qtower import _kernels, biaffine, linalg, sampling


def _hermitian(gen, n):
    m = sampling.gaussian(gen, n, n)
    return np.ascontiguousarray(0.5 * (m + m.conj().T))


def time_kernel(kernel, mats):
    start = time.perf_counter()
    sweeps = 0
    for h in mats:
        a = h.copy()
        v = np.eye(h.shape[0], dtype=np.complex128)
        tol = linalg.JACOBI_TOL * max(1.0, float(np.linalg.norm(a)))
        sweeps += kernel(a, v, tol, linalg.JACOBI_MAX_SWEEPS)
    return time.perf_counter() - start, sweeps / len(mats)


def time_dilations(kernel, count, seed):
    gen = sampling.rng(seed)
    shapes = gen.integers(1, 7, size=(count, 2))
    ts = [sampling.contraction(gen, int(r), int(c)) for r, c in shapes]
    saved = _kernels.jacobi_sweeps
    _kernels.jacobi_sweeps = kernel
    try:
        start = time.perf_counter()
        for t in ts:
            biaffine.halmos_dilate(t)
        return time.perf_counter() - start
    finally:
        _kernels.jacobi_sweeps = saved


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8, 16, 32])
    p.add_argument("--repeat", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; timing the Python kernel only")
    gen = sampling.rng(args.seed)

    print(f"{'n':>4} " + " ".join(f"{name:>14}" for name in backends) + "   speedup  sweeps")
    for n in args.sizes:
        mats = [_hermitian(gen, n) for _ in range(args.repeat)]
        times = {}
        for name, kernel in backends.items():
            times[name], sweeps = time_kernel(kernel, mats)
        row = " ".join(f"{1e3 * t / args.repeat:>11.3f} ms" for t in times.values())
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{n:>4} {row}   {speed:>6.1f}x  {sweeps:>5.1f}")

    print("\n500 Halmos dilations, dims 1-6:")
    for name, kernel in backends.items():
        print(f"  {name:>7}: {time_dilations(kernel, 500, args.seed):.3f} s")


if __name__ == "__main__":
    main()
