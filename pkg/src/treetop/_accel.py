"""Backend selection for the hot kernels.

Numba is used when it imports and ``TREETOP_DISABLE_NUMBA`` is unset or falsy.
Otherwise every kernel dispatches to its vectorised numpy twin.
"""

from __future__ import annotations

import os

DISABLE_ENV = "TREETOP_DISABLE_NUMBA"


def _disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()


def njit(*args, **kwargs):
    """``numba.njit(cache=True, nogil=True)`` when numba is importable, identity otherwise.

    Decoration is independent of ``USE_NUMBA`` so the benchmark can compare
    both paths inside one process.
    """
    if _numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("nogil", True)
    kwargs.setdefault("cache", True)
    return _numba.njit(*args, **kwargs)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
