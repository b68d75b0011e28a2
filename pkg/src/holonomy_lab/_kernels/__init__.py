"""Hot numerical kernels: compiled Cython core with a pure-Python fallback.

The compiled module is used when importable. Set ``HOLONOMY_LAB_PURE=1``
to force the fallback (the test suite runs both).
"""
import os

from . import _fallback

if os.environ.get("HOLONOMY_LAB_PURE", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = "compiled" if _impl is not _fallback else "python"

eigh2_batch = _impl.eigh2_batch
jacobi_eigh = _impl.jacobi_eigh
jacobi_eigh_batch = _impl.jacobi_eigh_batch
link_overlaps = _impl.link_overlaps
unit_product_angle = _impl.unit_product_angle
transport = _impl.transport
segment_angle_sum = _impl.segment_angle_sum


def backends():
    """Available kernel modules keyed by name."""
    found = {"python": _fallback}
    try:
        from . import _core
        found["compiled"] = _core
    except ImportError:
        pass
    return found
