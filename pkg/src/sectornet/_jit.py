"""Optional JIT compilation switch.

Numerical kernels decorated with ``maybe_jit`` compile with numba unless
the environment variable ``SECTORNET_NO_JIT`` is set to a non-empty
value other than ``"0"`` (or numba is unavailable). The pure-Python twin
stays reachable as ``fn.py_func`` either way, so tests can exercise both
paths in one process.
"""

from __future__ import annotations

import os


def _jit_enabled() -> bool:
    flag = os.environ.get("SECTORNET_NO_JIT", "")
    return flag in ("", "0")


if _jit_enabled():
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        _njit = None
else:
    _njit = None

JIT_ENABLED = _njit is not None


def maybe_jit(fn):
    if _njit is None:
        fn.py_func = fn
        return fn
    return _njit(cache=True)(fn)
