"""Pick the kernel implementation at import time.

``BCC_KERNELS=python`` forces the NumPy kernels, ``BCC_KERNELS=cython``
requires the compiled extension; anything else prefers the extension and
falls back silently.
"""
import importlib
import os

from . import _kernels_py


def load(name=None):
    name = (name or os.environ.get("BCC_KERNELS", "auto")).lower()
    if name == "python":
        return _kernels_py
    try:
        return importlib.import_module("bccbil._kernels")
    except ImportError:
        if name == "cython":
            raise
        return _kernels_py


def available():
    out = ["python"]
    try:
        importlib.import_module("bccbil._kernels")
    except ImportError:
        return out
    return ["cython", *out]


kernels = load()
