"""Backend selection for the batched numeric kernels.

The compiled Cython module is used when it has been built; otherwise the
numpy implementations in ``_pykernels`` take over. ``BACKEND`` names the
active one.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

try:
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:  # extension not built
    _impl = _pykernels
    BACKEND = "python"

spear_dets = _impl.spear_dets
segment_distances = _impl.segment_distances


def available_backends():
    names = {"python": _pykernels}
    if BACKEND == "cython":
        names["cython"] = _impl
    return names


def chunked(func, arrays, threads=1, min_chunk=256):
    """Apply a batched kernel over the leading axis, optionally across threads.

    Results are concatenated in input order, so output does not depend on
    ``threads``.
    """
    K = len(arrays[0])
    if threads <= 1 or K < 2 * min_chunk:
        return func(*arrays)
    bounds = np.linspace(0, K, min(threads * 4, K // min_chunk) + 1).astype(int)
    pieces = [tuple(a[lo:hi] for a in arrays) for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda args: func(*args), pieces))
    if isinstance(results[0], tuple):
        return tuple(np.concatenate(parts) for parts in zip(*results))
    return np.concatenate(results)
