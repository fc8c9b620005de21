"""Numba switch.

Hot kernels are decorated with :func:`njit` from this module.  Setting
``FUJITA_LAB_JIT=0`` in the environment (before import) replaces it with an
identity decorator so the same loops run as plain numpy/Python, which is
handy for debugging and is what ``benchmarks/bench_jit.py`` compares against.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("FUJITA_LAB_JIT", "1").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

JIT_ENABLED = numba is not None and _FLAG not in ("0", "false", "no", "off")

if JIT_ENABLED:

    def njit(func=None, **kwargs):
        kwargs.setdefault("cache", True)
        if func is not None:
            return numba.njit(**kwargs)(func)
        return numba.njit(**kwargs)

else:

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper


def python_impl(func):
    """Return the interpreted version of a (possibly jitted) kernel."""
    return getattr(func, "py_func", func)
