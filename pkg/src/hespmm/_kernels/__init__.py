"""Kernel backend selection.

Imports the compiled Cython kernels when available, otherwise the exact
pure-Python fallback. Set ``HESPMM_FORCE_PYTHON=1`` to force the fallback
(used by the backend comparison benchmark and for debugging).
"""

import os

if os.environ.get("HESPMM_FORCE_PYTHON"):
    from . import _py as _impl
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _py as _impl

BACKEND = _impl.BACKEND

ntt = _impl.ntt
intt = _impl.intt
add_mod = _impl.add_mod
sub_mod = _impl.sub_mod
neg_mod = _impl.neg_mod
mul_mod = _impl.mul_mod
scalar_mul_mod = _impl.scalar_mul_mod
fma_mod = _impl.fma_mod
extend_mod = _impl.extend_mod


def get_backend() -> str:
    """Name of the active kernel backend ("cython" or "python")."""
    return BACKEND
