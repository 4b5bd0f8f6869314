"""Kernel selection: the compiled extension when importable, else the Python fallback.

Set ``LASSERRE_HOM_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
hom_pinned = _fallback.hom_pinned
refine_colours = _fallback.refine_colours
cell_code = _fallback.cell_code
glue_code = _fallback.glue_code

if os.environ.get("LASSERRE_HOM_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels
    except ImportError:  # extension not built
        pass
    else:
        hom_pinned = _kernels.hom_pinned
        refine_colours = _kernels.refine_colours
        cell_code = _kernels.cell_code
        glue_code = _kernels.glue_code
        BACKEND = "compiled"
