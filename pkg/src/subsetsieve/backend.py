"""Kernel backend selection.

The hot loops exist twice: numba @njit kernels (`_kernels_numba`) and a pure
numpy fallback (`_kernels_numpy`). Selection order:

1. explicit :func:`set_backend` call (tests, benchmarks);
2. the ``SUBSETSIEVE_BACKEND`` environment variable: ``numba`` | ``numpy``;
3. default: numba when importable, else numpy.
"""

from __future__ import annotations

import os
from types import ModuleType

_active: tuple[str, ModuleType] | None = None


def _resolve(name: str) -> tuple[str, ModuleType]:
    if name not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown backend {name!r} (expected numba or numpy)")
    if name in ("auto", "numba"):
        try:
            from . import _kernels_numba

            return "numba", _kernels_numba
        except ImportError:
            if name == "numba":
                raise
    from . import _kernels_numpy

    return "numpy", _kernels_numpy


def set_backend(name: str) -> str:
    """Force a backend ("numba", "numpy", or "auto"); returns the active name."""
    global _active
    _active = _resolve(name)
    return _active[0]


def kernels() -> ModuleType:
    """The active kernel module."""
    global _active
    if _active is None:
        _active = _resolve(os.environ.get("SUBSETSIEVE_BACKEND", "auto"))
    return _active[1]


def backend_name() -> str:
    kernels()
    assert _active is not None
    return _active[0]
