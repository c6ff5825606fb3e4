"""Switch between numba-compiled kernels and their plain numpy fallbacks.

Set ``SHOCKFRONT_DISABLE_NUMBA=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``)
before import to run everything through the interpreter.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = numba is not None and not (
    _flag("SHOCKFRONT_DISABLE_NUMBA") or _flag("NUMBA_DISABLE_JIT")
)


def jit(fn):
    """``numba.njit(cache=True)`` when acceleration is on, identity otherwise."""
    if not USE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


def backend():
    return "numba" if USE_NUMBA else "numpy"
