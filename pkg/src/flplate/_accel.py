"""Optional numba acceleration.

Set ``FLPLATE_DISABLE_NUMBA=1`` to force the pure-numpy code paths (useful for
debugging and for the benchmark that compares both).
"""
import os

_flag = os.environ.get("FLPLATE_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _flag not in ("", "0", "false", "no")

try:
    import numba as nb
except ImportError:  # pragma: no cover
    nb = None

if nb is not None and "NUMBA_THREADING_LAYER" not in os.environ:
    # avoid probing an outdated TBB on every parallel launch
    nb.config.THREADING_LAYER = "workqueue"

USE_NUMBA = nb is not None and not DISABLED_BY_ENV


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if nb is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda func: func
    return nb.njit(*args, **kwargs)


prange = range if nb is None else nb.prange
