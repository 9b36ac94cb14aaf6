"""Pick the kernel implementation at import time.

The compiled extension is preferred. Setting ``STREAMSVDD_PURE_PYTHON=1``
forces the numpy fallback, which is also used when the extension was not
built.
"""
import os

from . import _pycore

try:
    from . import _ccore
except ImportError:  # extension not built
    _ccore = None

BACKENDS = {"python": _pycore}
if _ccore is not None:
    BACKENDS["cython"] = _ccore

if os.environ.get("STREAMSVDD_PURE_PYTHON", "") not in ("", "0") or _ccore is None:
    default = _pycore
else:
    default = _ccore


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the import-time choice)."""
    if name is None:
        return default
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; "
                         f"have {sorted(BACKENDS)}") from None
