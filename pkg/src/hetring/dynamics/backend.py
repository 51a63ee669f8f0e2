"""Kernel backend selection.

The compiled extension is used when it imports; set ``HETRING_BACKEND=python``
to force the pure-Python loops (identical results, 30 to 100 times slower).
"""
from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = ("compiled", "python")


def available() -> tuple[str, ...]:
    return BACKENDS if _compiled is not None else ("python",)


def get(name: str | None = None):
    """Kernel module for ``name`` (``compiled`` or ``python``); None picks the default."""
    if name is None:
        name = os.environ.get("HETRING_BACKEND", "compiled").lower()
        if name == "compiled" and _compiled is None:
            name = "python"
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; reinstall with Cython available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")


def name_of(module) -> str:
    return "python" if module is _pykernels else "compiled"
