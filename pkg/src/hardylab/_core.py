"""Backend selection for the tridiagonal kernels.

The compiled extension is preferred; set ``HARDYLAB_PURE_PYTHON=1`` to force
the NumPy/SciPy fallback.
"""
import os

BACKEND = "python"

if os.environ.get("HARDYLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import (  # noqa: F401
            monotone_iterate,
            tridiag_factor,
            tridiag_factored_solve,
            tridiag_matvec,
            tridiag_solve,
        )

        BACKEND = "cython"
    except ImportError:  # extension not built
        pass

if BACKEND == "python":
    from ._kernels_py import (  # noqa: F401
        monotone_iterate,
        tridiag_factor,
        tridiag_factored_solve,
        tridiag_matvec,
        tridiag_solve,
    )

__all__ = [
    "BACKEND",
    "monotone_iterate",
    "tridiag_factor",
    "tridiag_factored_solve",
    "tridiag_matvec",
    "tridiag_solve",
]
