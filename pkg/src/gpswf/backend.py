"""Kernel backend selection.

The compiled extension ``gpswf._kernels`` (Cython) and the pure-NumPy module
``gpswf._kernels_py`` expose the same three entry points; the compiled one is
preferred when it imported cleanly.  ``benchmarks/bench_kernels.py`` compares
the two.
"""

import os

if os.environ.get("GPSWF_PURE_PYTHON"):
    from . import _kernels_py as _impl

    HAVE_EXTENSION = False
else:
    try:
        from . import _kernels as _impl

        HAVE_EXTENSION = True
    except ImportError:  # extension not built; pure-Python fallback
        from . import _kernels_py as _impl

        HAVE_EXTENSION = False

tridiag_eig = _impl.tridiag_eig
jacobi_series = _impl.jacobi_series
bessel_ladder = _impl.bessel_ladder


def backend_name() -> str:
    return _impl.BACKEND_NAME
