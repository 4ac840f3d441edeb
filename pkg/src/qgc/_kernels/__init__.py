"""Hot inner loops, compiled when the Cython extension is available.

``BACKEND`` is ``"cython"`` or ``"python"``. Setting ``QGC_PURE_PYTHON=1``
forces the fallback even when the extension is built.
"""

import os

if os.environ.get("QGC_PURE_PYTHON", "") not in ("", "0"):
    from ._fallback import mgs_residual, rk4_flow

    BACKEND = "python"
else:
    try:
        from ._core import mgs_residual, rk4_flow

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._fallback import mgs_residual, rk4_flow

        BACKEND = "python"

__all__ = ["BACKEND", "mgs_residual", "rk4_flow"]
