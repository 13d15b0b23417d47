"""Backend selection for the query-scoring hot kernel.

The compiled extension is preferred; the numpy fallback is used when the
extension is missing or RBI_PURE_PYTHON is set to a non-empty value.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("RBI_PURE_PYTHON"):
    _backend = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _backend  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _backend = _pykernels
        BACKEND = "python"

conditional_entropy_scores = _backend.conditional_entropy_scores
