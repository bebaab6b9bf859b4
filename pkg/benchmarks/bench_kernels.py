"""Numba vs numpy timings for the three hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call of each kernel compiles (or loads from cache) and is
timed separately as ``warmup``.
"""

import argparse
import time

import numpy as np

from pseudospec import kernels
from pseudospec._jit import HAVE_NUMBA
from pseudospec.ads3 import standard_presentation
from pseudospec.quadform import Signature, deformed_form


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(1)
    g = np.eye(4) + 0.1 * rng.standard_normal((4, 4))
    S = np.ascontiguousarray(deformed_form(g, Signature(2, 2)).matrix)
    yield "scan_box n=4 M=20", (S, 20, -200.0, 200.0, 4 * np.pi**2), kernels.scan_box_numpy, getattr(kernels, "scan_box_numba", None)

    gens = standard_presentation().letters()
    elems = np.eye(2)[None, None].repeat(2, axis=1)
    last = np.array([-1], dtype=np.int64)
    for _ in range(7):
        elems, last, _ = kernels.extend_words_numpy(elems, last, gens)
    yield f"extend_words N={len(last)}", (elems, last, gens), kernels.extend_words_numpy, getattr(kernels, "extend_words_numba", None)

    mats = np.linalg.qr(rng.standard_normal((200_000, 2, 2, 2)))[0] @ np.diag([3.0, 1 / 3.0])
    yield "top_log_sv2 N=200000", (mats,), kernels.top_log_sv2_numpy, getattr(kernels, "top_log_sv2_numba", None)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':28s} {'numpy s':>10s} {'numba s':>10s} {'warmup s':>10s} {'speedup':>8s}")
    for name, argv, np_fn, nb_fn in cases():
        t_np, ref = best_of(lambda: np_fn(*argv), args.repeat)
        if not HAVE_NUMBA or nb_fn is None:
            print(f"{name:28s} {t_np:10.4f} {'-':>10s} {'-':>10s} {'-':>8s}")
            continue
        t0 = time.perf_counter()
        nb_fn(*argv)
        warm = time.perf_counter() - t0
        t_nb, out = best_of(lambda: nb_fn(*argv), args.repeat)
        a, b = (x[0] if isinstance(x, tuple) else x for x in (ref, out))
        # summation order differs between backends
        assert np.allclose(a, b, rtol=1e-12, atol=1e-13 * np.abs(a).max()), name
        print(f"{name:28s} {t_np:10.4f} {t_nb:10.4f} {warm:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
