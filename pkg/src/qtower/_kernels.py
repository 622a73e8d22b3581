"""Selects the Jacobi kernel: compiled extension if importable, else pure Python.

Set ``QTOWER_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _jacobi_py

BACKEND = "python"
jacobi_sweeps = _jacobi_py.jacobi_sweeps

if os.environ.get("QTOWER_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _jacobi_ext
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        jacobi_sweeps = _jacobi_ext.jacobi_sweeps


def available_backends():
    """Map backend name to kernel for every backend importable in this process."""
    found = {"python": _jacobi_py.jacobi_sweeps}
    try:
        from . import _jacobi_ext
    except ImportError:
        pass
    else:
        found["cython"] = _jacobi_ext.jacobi_sweeps
    return found
