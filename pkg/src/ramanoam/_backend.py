"""Pick the compiled Bloch kernels when present, else the pure-Python twin."""

try:
    from ramanoam import _ckernels as kernels
    BACKEND = "cython"
except ImportError:  # extension not built
    from ramanoam import _pykernels as kernels
    BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
