"""Compare the compiled and pure-numpy kernels on batched workloads.

    python benchmarks/bench_kernels.py [--k 200000] [--repeat 5] [--threads 4]
"""
import argparse
import time

import numpy as np

from octahedral import kernels
from octahedral.kinematics import CLEARANCE_PAIRS, anchor_arrays


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n, M = anchor_arrays(rng.normal(size=(args.k, 4)), rng.uniform(-2, 2, (args.k, 3)),
                         rng.uniform(0.2, 3, args.k))
    i, j = np.array(CLEARANCE_PAIRS).T
    segs = (M[:, i].reshape(-1, 3), n[:, i].reshape(-1, 3), M[:, j].reshape(-1, 3), n[:, j].reshape(-1, 3))

    backends = kernels.available_backends()
    print(f"{args.k} configurations, best of {args.repeat}")
    print(f"{'kernel':<26}{'backend':<10}{'threads':>8}{'seconds':>10}{'speedup':>9}")
    for label, make in [
        ("spear_dets (unit rows)", lambda impl: lambda: impl.spear_dets(n, M, True)),
        ("spear_dets (polynomial)", lambda impl: lambda: impl.spear_dets(n, M, False)),
        ("segment_distances x9", lambda impl: lambda: impl.segment_distances(*segs)),
    ]:
        base = best_of(make(backends["python"]), args.repeat)
        print(f"{label:<26}{'python':<10}{1:>8}{base:>10.4f}{1.0:>9.1f}")
        if "cython" in backends:
            impl = backends["cython"]
            t = best_of(make(impl), args.repeat)
            print(f"{label:<26}{'cython':<10}{1:>8}{t:>10.4f}{base / t:>9.1f}")
            if "segment" in label:
                par = lambda: kernels.chunked(impl.segment_distances, segs, args.threads)  # noqa: E731
            else:
                unit = "unit" in label
                par = lambda: kernels.chunked(lambda a, b: impl.spear_dets(a, b, unit), (n, M), args.threads)  # noqa: E731
            t = best_of(par, args.repeat)
            print(f"{label:<26}{'cython':<10}{args.threads:>8}{t:>10.4f}{base / t:>9.1f}")


if __name__ == "__main__":
    main()
