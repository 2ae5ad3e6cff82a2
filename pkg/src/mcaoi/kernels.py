"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``MCAOI_PURE_PYTHON=1`` to force the fallback (useful for comparing the
two or on machines without a C compiler).
"""

import os

from mcaoi import _fallback

if os.environ.get("MCAOI_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from mcaoi import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = "cython" if _impl is not _fallback else "python"

cycles_from_uniforms = _impl.cycles_from_uniforms
histogram_from_sorted = _impl.histogram_from_sorted
cycle_histogram = _impl.cycle_histogram
power_sums = _impl.power_sums
slot_scan = _impl.slot_scan
discretized_moments = _impl.discretized_moments
fraction_below_direct = _impl.fraction_below_direct


def implementations():
    """Map of backend name to kernel module for every backend available here."""
    impls = {"python": _fallback}
    try:
        from mcaoi import _kernels
    except ImportError:
        pass
    else:
        impls["cython"] = _kernels
    return impls
