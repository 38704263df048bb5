"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback
is otherwise used transparently.  Set ``TIERBOUNDS_BACKEND=python`` to
force the fallback (used by the parity tests and the benchmark script).
"""
from __future__ import annotations

import os

if os.environ.get("TIERBOUNDS_BACKEND", "").lower() == "python":
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"

bound_terms = kernels.bound_terms
bound_terms_smooth = kernels.bound_terms_smooth
correction_terms = kernels.correction_terms
correction_terms_smooth = kernels.correction_terms_smooth
