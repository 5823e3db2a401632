"""Backend selection for the eigensolver kernel.

The compiled extension is preferred. Setting ``HISTKIT_PURE_PYTHON=1``
forces the pure-Python implementation, as does a missing build.
"""
import os

from . import _jacobi_py

if os.environ.get("HISTKIT_PURE_PYTHON") == "1":
    jacobi_eigh = _jacobi_py.jacobi_eigh
    BACKEND = "python"
else:
    try:
        from ._jacobi_ext import jacobi_eigh
        BACKEND = "cython"
    except ImportError:
        jacobi_eigh = _jacobi_py.jacobi_eigh
        BACKEND = "python"

BACKENDS = {"python": _jacobi_py.jacobi_eigh}
try:
    from ._jacobi_ext import jacobi_eigh as _ext_eigh
    BACKENDS["cython"] = _ext_eigh
except ImportError:
    pass
