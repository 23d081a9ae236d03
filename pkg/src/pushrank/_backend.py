"""Selects the push-kernel backend: compiled extension or pure Python.

The compiled module is optional; ``PUSHRANK_BACKEND`` forces a choice
("c" or "python"), otherwise the compiled kernels are used when present.
"""

from __future__ import annotations

import os

from . import _pykernels


def _load_compiled():
    from . import _kernels  # noqa: F401  (built by setup.py when possible)

    return _kernels


def available_backends() -> list[str]:
    names = []
    try:
        _load_compiled()
        names.append("c")
    except ImportError:
        pass
    names.append("python")
    return names


def resolve_backend(name: str | None = None):
    """Return the kernel module for ``name`` (None: env var, then auto)."""
    if name is None:
        name = os.environ.get("PUSHRANK_BACKEND", "auto")
    name = name.lower()
    if name in ("c", "compiled", "ext"):
        return _load_compiled()
    if name in ("python", "py", "pure"):
        return _pykernels
    if name == "auto":
        try:
            return _load_compiled()
        except ImportError:
            return _pykernels
    raise ValueError(f"unknown backend {name!r} (expected 'c', 'python', or 'auto')")
