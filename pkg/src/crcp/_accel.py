"""Numba acceleration shim.

Hot numeric kernels in :mod:`crcp._kernels` are compiled with numba's
``@njit`` when available.  Setting the environment variable
``CRCP_DISABLE_NUMBA=1`` (before import) selects the pure-Python/NumPy
fallback path: the same kernel source runs interpreted.  The fallback is
much slower but bit-identical in results, which the kernel benchmark and
the backend smoke tests rely on.
"""

import os

_flag = os.environ.get("CRCP_DISABLE_NUMBA", "").strip()
NUMBA_DISABLED = _flag not in ("", "0")

if not NUMBA_DISABLED:
    try:
        from numba import njit as _numba_njit
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but be tolerant
        USING_NUMBA = False
else:
    USING_NUMBA = False


if USING_NUMBA:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        if args and callable(args[0]):
            return _numba_njit(cache=kwargs["cache"])(args[0])
        return _numba_njit(*args, **kwargs)

else:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def decorate(fn):
            return fn

        return decorate


def backend_name() -> str:
    return "numba" if USING_NUMBA else "python"
