"""Encrypted sparse matrix-matrix multiplication on a leveled CKKS scheme.

The hot per-prime polynomial kernels live in a compiled extension with a
pure-Python fallback selected at import time; see ``hespmm.get_backend()``.
"""

from ._kernels import get_backend

__version__ = "0.1.0"

__all__ = ["get_backend", "__version__"]
