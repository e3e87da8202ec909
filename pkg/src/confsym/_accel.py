"""Optional numba acceleration for the hot numeric kernels.

Everything in the package is plain numpy except a handful of sequential
inner loops (trajectory integration) that benefit from JIT compilation.
Those kernels are written in nopython-compatible style and decorated with
:func:`maybe_jit`.  Setting the environment variable ``CONFSYM_NO_NUMBA=1``
(or not having numba installed) selects the pure-numpy fallback, which is
bit-for-bit the same code run by the interpreter.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def numba_requested() -> bool:
    return os.environ.get("CONFSYM_NO_NUMBA", "").strip().lower() in _FALSY


def _resolve():
    if not numba_requested():
        return None
    try:
        from numba import njit
    except ImportError:
        return None
    return njit


_njit = _resolve()
NUMBA_ENABLED = _njit is not None


def maybe_jit(func):
    """Apply ``numba.njit(cache=True)`` when enabled, else return ``func``."""
    if _njit is None:
        return func
    return _njit(cache=True)(func)
