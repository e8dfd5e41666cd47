"""Compare the numba and pure-numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each backend is timed on the see-saw (separability window), the batched
quasi-pure closed form, and the kernel-polytope feasibility LP.  The numba
timings exclude compilation (one warm-up call first).
"""

import argparse
import time

import numpy as np

from boundlab import _kernels as K
from boundlab.bell import kernel_vertices
from boundlab.witnesses import build_mub_set, mub_operator


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    K4 = mub_operator(build_mub_set(3, 4)).reshape(3, 3, 3, 3).astype(np.complex128)
    b0 = rng.normal(size=(200, 3)) + 1j * rng.normal(size=(200, 3))
    b0 /= np.linalg.norm(b0, axis=1, keepdims=True)
    C = rng.dirichlet(np.ones(9), size=20000).reshape(-1, 3, 3)
    V = np.ascontiguousarray(kernel_vertices(4))
    cs = rng.dirichlet(np.ones(16), size=200)
    return {
        "seesaw 200 restarts (d=3)": (
            lambda: K._seesaw_numpy(K4, b0, 500, 1e-10, 1.0),
            lambda: K._seesaw_impl(K4, b0, 500, 1e-10, 1.0),
        ),
        "quasi-pure closed form x20000": (
            lambda: K._qp_closed_numpy(C),
            lambda: K._qp_impl(C),
        ),
        "kernel LP x200 (d=4)": (
            lambda: [K._phase1(V, c, 1e-12, 10000) for c in cs],
            lambda: [K._phase1_impl(V, c, 1e-12, 10000) for c in cs],
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not K.USE_NUMBA:
        print("numba backend unavailable (not installed or BOUNDLAB_DISABLE_NUMBA set); numpy only")
    print(f"{'kernel':34s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, (np_fn, nb_fn) in cases().items():
        t_np = _best(np_fn, args.repeat)
        if K.USE_NUMBA:
            nb_fn()
            t_nb = _best(nb_fn, args.repeat)
            print(f"{name:34s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:34s} {t_np:10.4f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
