"""Backend selection for the hot bitmask kernels.

Set ``ANTICHAINS_BACKEND=numpy`` to force the pure-numpy path (or ``numba``,
the default when numba imports cleanly).  ``ANTICHAINS_NO_NUMBA=1`` is
accepted as a shorthand for the numpy path.
"""
import os

try:
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False
    _njit = None


def _env_backend():
    if os.environ.get("ANTICHAINS_NO_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    name = os.environ.get("ANTICHAINS_BACKEND", "").strip().lower()
    if name in ("numpy", "numba"):
        return name
    return "numba"


def default_backend():
    name = _env_backend()
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


def resolve_backend(backend=None):
    if backend is None:
        return default_backend()
    if backend not in ("numpy", "numba"):
        raise ValueError(f"unknown backend {backend!r}; expected 'numpy' or 'numba'")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        return _njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f
