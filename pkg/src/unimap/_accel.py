"""JIT switch for the numeric kernels.

Set ``UNIMAP_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy. Both paths execute the same source, so results are identical.
"""

import os

_DISABLED = os.environ.get("UNIMAP_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    NUMBA_ENABLED = True

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        return _njit(*args, **kwargs)

except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


def backend():
    return "numba" if NUMBA_ENABLED else "python"
