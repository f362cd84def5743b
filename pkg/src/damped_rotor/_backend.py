"""Select the integration kernels at import time.

The compiled ``_kernels`` extension is preferred. Setting the environment
variable ``DAMPED_ROTOR_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
import importlib
import os

from . import _pykernels


def load(name: str | None = None):
    """Return a kernel module by name (``"cython"`` or ``"python"``).

    ``None`` picks the active backend; asking for ``"cython"`` when the
    extension is not built raises ``ImportError``.
    """
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("damped_rotor._kernels")
    if name is not None:
        raise ValueError(f"unknown backend {name!r}")
    return kernels


def available() -> list[str]:
    names = ["python"]
    try:
        load("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


if os.environ.get("DAMPED_ROTOR_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        kernels = load("cython")
    except ImportError:
        kernels = _pykernels

BACKEND = kernels.NAME
