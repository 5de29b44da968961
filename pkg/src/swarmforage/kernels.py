"""Backend selection for the per-tick kernels.

The compiled extension is used when importable. Set ``SWARMFORAGE_PURE=1``
to force the pure-Python fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("SWARMFORAGE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

sense_all = _impl.sense_all
move_clamped = _impl.move_clamped

__all__ = ["BACKEND", "sense_all", "move_clamped"]
