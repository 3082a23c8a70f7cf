from fractions import Fraction

import numpy as np
import pytest

from antichains import _accel, kernels


def naive_superset_sum(a):
    size = len(a)
    return np.array([sum(a[u] for u in range(size) if u & s == s) for s in range(size)],
                    dtype=a.dtype)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
@pytest.mark.parametrize("bits", [0, 1, 3, 6])
def test_superset_sum(backend, bits):
    rng = np.random.default_rng(bits)
    a = rng.integers(0, 100, size=1 << bits, dtype=np.int64)
    expect = naive_superset_sum(a)
    assert kernels.superset_sum(a, backend)
    assert np.array_equal(a, expect)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_superset_sum_overflow_guard(backend):
    a = np.full(4, kernels.INT64_CEILING // 2 + 1, dtype=np.int64)
    assert not kernels.superset_sum(a, backend)
    # two values of exactly half the ceiling must also trip the guard
    a = np.full(2, kernels.INT64_CEILING // 2, dtype=np.int64)
    assert not kernels.superset_sum(a, backend)


def test_superset_sum_object_exact():
    a = np.array([2**70, 1, 2**65, 3], dtype=object)
    assert kernels.superset_sum(a)
    assert list(a) == [2**70 + 1 + 2**65 + 3, 4, 2**65 + 3, 3]


def test_weighted_superset_sum():
    a = np.array([Fraction(1)] * 4, dtype=object)
    kernels.weighted_superset_sum(a, [Fraction(2), Fraction(3)])
    # a[S] = sum over U >= S of prod_{x in U \ S} w_x
    assert list(a) == [(1 + 2) * (1 + 3), 1 + 3, 1 + 2, 1]


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_requirement_table_and_gather(backend):
    down = [0b011, 0b110, 0b100]
    req = kernels.requirement_table(down, backend)
    for T in range(8):
        expect = 0
        for j in range(3):
            if T >> j & 1:
                expect |= down[j]
        assert req[T] == expect
    values = np.arange(8, dtype=np.int64) * 10
    assert list(kernels.gather(values, req, backend)) == [10 * r for r in req]


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("ANTICHAINS_BACKEND", "numpy")
    assert _accel.default_backend() == "numpy"
    monkeypatch.setenv("ANTICHAINS_BACKEND", "numba")
    assert _accel.default_backend() == ("numba" if _accel.HAVE_NUMBA else "numpy")
    monkeypatch.setenv("ANTICHAINS_NO_NUMBA", "1")
    assert _accel.default_backend() == "numpy"
    with pytest.raises(ValueError):
        _accel.resolve_backend("cuda")


def test_njit_fallback_is_identity(monkeypatch):
    monkeypatch.setattr(_accel, "HAVE_NUMBA", False)

    def f(x):
        return x + 1

    assert _accel.njit(f) is f
    assert _accel.njit(cache=True)(f) is f
