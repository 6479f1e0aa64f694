"""Kernel backend selection.

The hot kernels (Bessel functions, Marcum Q, outage integrands) exist twice:
a compiled Cython extension ``fasris._kernels`` and a pure-Python twin
``fasris._kernels_py``.  The compiled module is preferred when importable;
setting ``FASRIS_PURE_PYTHON=1`` forces the fallback.  Both expose the same
function set and agree to a few ulp, so everything above this module is
backend-agnostic.
"""

import os

if os.environ.get("FASRIS_PURE_PYTHON", "") == "1":
    from fasris import _kernels_py as _impl

    BACKEND = "pure-python (forced)"
else:
    try:
        from fasris import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from fasris import _kernels_py as _impl

        BACKEND = "pure-python"

bessel_j0 = _impl.bessel_j0
bessel_i0e = _impl.bessel_i0e
marcum_q1_pair = _impl.marcum_q1_pair
i0e_array = _impl.i0e_array
one_minus_q1_array = _impl.one_minus_q1_array
rice_pdf = _impl.rice_pdf
bdma_integrand = _impl.bdma_integrand
design_integrand = _impl.design_integrand


def backend_name():
    """Which kernel implementation is active ("compiled" or "pure-python")."""
    return BACKEND
