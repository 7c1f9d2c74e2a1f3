"""Kernel backend selection.

The compiled ``geoord._kernels`` extension is used when it imports; otherwise
the numpy versions in ``geoord._kernels_py`` are used.  Setting
``GEOORD_PURE_PYTHON=1`` forces the numpy backend.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

if _compiled is not None and not os.environ.get("GEOORD_PURE_PYTHON"):
    _impl = _compiled
    BACKEND = "cython"
else:
    _impl = _kernels_py
    BACKEND = "python"

se3_distance_rows = _impl.se3_distance_rows
prim_mst = _impl.prim_mst
nn_chain = _impl.nn_chain


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_backend(name):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
