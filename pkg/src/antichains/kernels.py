"""Bitmask kernels for the level-by-level downset dynamic program.

Every kernel has a numba implementation and a numpy implementation with
identical semantics.  Integer kernels work on int64 arrays and guard against
overflow with an explicit ceiling; callers fall back to object (big-integer)
arrays when the guard trips.
"""
import numpy as np

from ._accel import njit, resolve_backend

# Values stay < 2**62 so the sum of two of them never wraps an int64.
INT64_CEILING = 1 << 62


@njit(cache=True)
def _superset_sum_nb(a, ceiling):
    size = a.shape[0]
    half = 1
    while half < size:
        for base in range(0, size, 2 * half):
            for j in range(base, base + half):
                v = a[j] + a[j + half]
                if v >= ceiling:
                    return False
                a[j] = v
        half <<= 1
    return True


@njit(cache=True)
def _requirement_table_nb(down):
    m = down.shape[0]
    req = np.zeros(1 << m, dtype=np.int64)
    for j in range(m):
        h = 1 << j
        dj = down[j]
        for s in range(h):
            req[h + s] = req[s] | dj
    return req


@njit(cache=True)
def _gather_nb(values, index):
    out = np.empty(index.shape[0], dtype=values.dtype)
    for i in range(index.shape[0]):
        out[i] = values[index[i]]
    return out


def _superset_sum_np(a, ceiling=None):
    size = a.shape[0]
    bits = size.bit_length() - 1
    for b in range(bits):
        view = a.reshape(-1, 2, 1 << b)
        view[:, 0, :] += view[:, 1, :]
        if ceiling is not None and view[:, 0, :].max() >= ceiling:
            return False
    return True


def _requirement_table_np(down):
    m = len(down)
    req = np.zeros(1 << m, dtype=np.int64)
    for j in range(m):
        h = 1 << j
        req[h:2 * h] = req[:h] | int(down[j])
    return req


def superset_sum(a, backend=None):
    """In-place superset-sum transform ``a[S] <- sum_{U >= S} a[U]``.

    Bits are processed in ascending order.  For int64 input returns False
    (leaving ``a`` partially transformed) if any intermediate value would
    reach ``INT64_CEILING``; object arrays are exact and always succeed.
    """
    if a.dtype == object:
        _superset_sum_np(a)
        return True
    if resolve_backend(backend) == "numba":
        return bool(_superset_sum_nb(a, INT64_CEILING))
    return _superset_sum_np(a, INT64_CEILING)


def weighted_superset_sum(a, weights):
    """In-place ``a[S] <- sum_{U >= S} a[U] * prod_{x in U \\ S} weights[x]``.

    Works on object arrays (exact rationals); bit ``b`` carries ``weights[b]``.
    """
    for b, w in enumerate(weights):
        view = a.reshape(-1, 2, 1 << b)
        view[:, 0, :] += view[:, 1, :] * w
    return a


def requirement_table(down, backend=None):
    """``req[T]`` = union of ``down[j]`` over the bits ``j`` set in ``T``."""
    down = np.asarray(down, dtype=np.int64)
    if resolve_backend(backend) == "numba":
        return _requirement_table_nb(down)
    return _requirement_table_np(down)


def gather(values, index, backend=None):
    if values.dtype != object and resolve_backend(backend) == "numba":
        return _gather_nb(values, index)
    return values[index]
