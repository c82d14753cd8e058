"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when importable; otherwise the
pure-Python ``_pykernels`` module.  Set ``COMMSIG_BACKEND=python`` to force
the fallback (``cython`` makes a missing extension an ImportError).
"""
import os

from . import _pykernels

_choice = os.environ.get("COMMSIG_BACKEND", "auto").lower()

if _choice == "python":
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        if _choice == "cython":
            raise
        kernels = _pykernels

BACKEND = "cython" if kernels is not _pykernels else "python"


def available_backends():
    """Names of importable kernel modules, mapped to the modules."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
