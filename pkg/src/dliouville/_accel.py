"""Numba switch.

Hot kernels are written once as plain Python loops.  When numba is importable
and ``DLIOUVILLE_DISABLE_NUMBA`` is unset (or ``0``), they are compiled with
``numba.njit``; otherwise callers use the vectorised numpy implementations
that live next to each kernel.
"""
import os

_flag = os.environ.get("DLIOUVILLE_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:
    _njit = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when acceleration is on, else ``None``.

    Returning ``None`` (rather than the undecorated function) lets a kernel
    module pick its numpy fallback with a simple ``if jitted is None`` test.
    """
    if not HAVE_NUMBA:
        def deco(func):
            return None
        if args and callable(args[0]):
            return None
        return deco
    return _njit(*args, **kwargs)


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
