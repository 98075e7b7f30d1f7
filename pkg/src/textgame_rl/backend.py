"""Kernel backend selection.

The hot numeric kernels (batched GRU forward/backward, decoder likelihood)
exist twice: a numba @njit build and a pure-numpy fallback with identical
semantics.  The default is picked once at import time from the
TEXTGAME_RL_BACKEND environment variable:

    TEXTGAME_RL_BACKEND=numba   require the JIT build (error if unavailable)
    TEXTGAME_RL_BACKEND=numpy   force the pure-numpy fallback
    unset / auto                numba when importable, else numpy
"""

from __future__ import annotations

import os

_ENV_VAR = "TEXTGAME_RL_BACKEND"
_loaded: dict[str, object] = {}


def load_kernels(name: str):
    """Import and return one kernel module by name ("numpy" or "numba")."""
    if name in _loaded:
        return _loaded[name]
    if name == "numpy":
        from . import _kernels_numpy as mod
    elif name == "numba":
        from . import _kernels_numba as mod
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    _loaded[name] = mod
    return mod


def available_backends() -> list[str]:
    names = ["numpy"]
    try:
        load_kernels("numba")
        names.append("numba")
    except ImportError:
        pass
    return names


def _resolve_default():
    requested = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if requested in ("numpy", "numba"):
        return load_kernels(requested)
    if requested not in ("", "auto"):
        raise ValueError(f"{_ENV_VAR} must be 'numpy', 'numba' or 'auto', got {requested!r}")
    try:
        return load_kernels("numba")
    except ImportError:
        return load_kernels("numpy")


kernels = _resolve_default()


def backend_name() -> str:
    return kernels.NAME
