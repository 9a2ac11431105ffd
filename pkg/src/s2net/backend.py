"""Kernel backend selection.

The solver's inner loop exists in two flavors built from the same source
function: a numba-compiled one and a plain numpy one. The S2NET_BACKEND
environment variable picks which flavor the library calls; "numba" is the
default and silently degrades to "numpy" when numba is not importable.
"""

from __future__ import annotations

import os
import warnings

ENV_VAR = "S2NET_BACKEND"
CHOICES = ("numba", "numpy")

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    njit = None
    NUMBA_AVAILABLE = False


def requested_backend() -> str:
    """Backend named by the environment, before availability is considered."""
    value = os.environ.get(ENV_VAR, "numba").strip().lower()
    if value not in CHOICES:
        raise ValueError(
            f"{ENV_VAR} must be one of {CHOICES}, got {value!r}"
        )
    return value


def resolve_backend() -> str:
    """Backend actually used: the requested one, downgraded if unavailable."""
    value = requested_backend()
    if value == "numba" and not NUMBA_AVAILABLE:
        warnings.warn(
            "numba is not importable; falling back to the numpy backend",
            RuntimeWarning,
            stacklevel=2,
        )
        return "numpy"
    return value


ACTIVE_BACKEND = resolve_backend()


def compile_kernel(func):
    """Return the numba-compiled twin of a kernel source function.

    Compilation is cached on disk so repeated processes skip the JIT cost.
    """
    if not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is unavailable")
    return njit(cache=True)(func)
