"""Backend selection for the numeric kernels.

The hot loops exist twice: a numba-compiled loop version and a vectorised
numpy version. ``INVLOC_BACKEND=numpy`` forces the numpy path; the default is
numba when it can be imported.
"""

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

BACKENDS = ("numba", "numpy")

_requested = os.environ.get("INVLOC_BACKEND", "numba").strip().lower()
if _requested not in BACKENDS:
    raise ImportError(f"INVLOC_BACKEND must be one of {BACKENDS}, got {_requested!r}")
_current = _requested if (_requested == "numpy" or HAS_NUMBA) else "numpy"


def jit(fn):
    """``numba.njit(cache=True)`` when numba is available, identity otherwise."""
    if HAS_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


def backend():
    return _current


def set_backend(name):
    """Switch the active backend at runtime; returns the previous one."""
    global _current
    name = name.lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _current = _current, name
    return previous
