"""Kernel backend selection.

Importing this module binds ``laurent_mul``, ``dense_mul``, ``poly_mod_reduce``
and ``cyc_mul`` either to the compiled extension (preferred) or to the pure
Python fallback.  Setting the environment variable ``ARTIFACT_PURE=1`` forces
the fallback, which is handy for benchmarking and debugging.
"""

import os

BACKEND = "python"

if os.environ.get("ARTIFACT_PURE") != "1":
    try:
        from ._kernels import (  # type: ignore[attr-defined]
            cyc_mul,
            dense_mul,
            laurent_mul,
            poly_mod_reduce,
        )

        BACKEND = "compiled"
    except ImportError:
        pass

if BACKEND == "python":
    from ._kernels_py import cyc_mul, dense_mul, laurent_mul, poly_mod_reduce

__all__ = ["BACKEND", "laurent_mul", "dense_mul", "poly_mod_reduce", "cyc_mul"]
