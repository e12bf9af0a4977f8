"""Backend selection for the matching kernels.

The compiled extension is used when it imports; ``MATCHLAB_PURE=1`` forces
the pure-Python fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("MATCHLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

find_perfect = _impl.find_perfect
enumerate_perfect = _impl.enumerate_perfect

__all__ = ["BACKEND", "find_perfect", "enumerate_perfect"]
