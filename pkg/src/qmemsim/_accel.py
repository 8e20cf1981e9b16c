"""Optional numba acceleration.

Set ``QMEMSIM_DISABLE_NUMBA=1`` to force the pure-numpy kernels, e.g. when
numba is unavailable or to cross-check both paths.
"""
import os

_disabled = os.environ.get("QMEMSIM_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled


def njit(*args, **kw):
    """``numba.njit`` when available, otherwise a passthrough decorator."""
    if HAVE_NUMBA:
        return _njit(*args, **kw)
    if len(args) == 1 and callable(args[0]) and not kw:
        return args[0]
    return lambda f: f
