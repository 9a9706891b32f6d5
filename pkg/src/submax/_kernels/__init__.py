"""Kernel backend selection.

The compiled Cython core is preferred; the numpy reference
implementation is the fallback.  ``SUBMAX_PURE_PYTHON=1`` forces the
fallback (useful for testing and for the backend benchmark).
"""

import os

from . import _ref

if os.environ.get("SUBMAX_PURE_PYTHON"):
    _impl = _ref
    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _ref
        BACKEND = "python"

LINK_LOG1P = _ref.LINK_LOG1P
LINK_QGAIN = _ref.LINK_QGAIN

poly_value = _impl.poly_value
poly_grad = _impl.poly_grad
component_values = _impl.component_values
samp_mean_diffs = _impl.samp_mean_diffs


def backend_name():
    return BACKEND


def backends():
    """All importable backends, for parity tests and benchmarks."""
    available = {"python": _ref}
    try:
        from . import _core

        available["cython"] = _core
    except ImportError:
        pass
    return available
