"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set ``TOPODRIFT_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the parity tests).
"""

import os

from . import _fallback

if os.environ.get("TOPODRIFT_PURE_PYTHON", "") == "1":
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _fallback

HAVE_COMPILED = _impl.IMPLEMENTATION == "compiled"
IMPLEMENTATION = _impl.IMPLEMENTATION

reduce_boundary = _impl.reduce_boundary
kuhn_cover = _impl.kuhn_cover
