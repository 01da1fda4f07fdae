"""Selects the compiled time-stepping kernel when it is available."""
try:
    from ._kernel import advance
    COMPILED = True
except ImportError:  # extension not built
    from ._kernel_py import advance
    COMPILED = False

from ._kernel_py import advance as advance_py

__all__ = ["advance", "advance_py", "COMPILED"]
