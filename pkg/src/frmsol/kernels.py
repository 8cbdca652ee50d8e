"""Kernel backend selection: compiled extension if built, NumPy otherwise.

Set ``FRMSOL_KERNELS=numpy`` (or ``cython``) to force a backend for the
whole process; per-run selection goes through ``SolverConfig.backend``.
"""

from __future__ import annotations

import importlib
import os

ENV_VAR = "FRMSOL_KERNELS"
_MODULES = {"cython": "frmsol._kernels_cy", "numpy": "frmsol._kernels_py"}
_cache: dict[str, object] = {}


def load(name: str):
    """Import and return the kernel module for a named backend."""
    if name not in _MODULES:
        raise ValueError(
            f"unknown kernel backend {name!r}; expected one of "
            f"{sorted(_MODULES)}")
    if name not in _cache:
        _cache[name] = importlib.import_module(_MODULES[name])
    return _cache[name]


def default_name() -> str:
    """Backend used when none is requested explicitly."""
    forced = os.environ.get(ENV_VAR)
    if forced:
        if forced not in _MODULES:
            raise ValueError(
                f"{ENV_VAR}={forced!r} is not a known backend; expected "
                f"one of {sorted(_MODULES)}")
        return forced
    try:
        load("cython")
        return "cython"
    except ImportError:
        return "numpy"


def active(name: str | None = None):
    """Kernel module for ``name``, or for the process default."""
    return load(name or default_name())
