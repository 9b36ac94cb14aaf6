"""Rank-one growth and removal of the inverse similarity matrix.

The learner only ever adds or removes one support vector at a time, so the
inverse of the k x k similarity matrix is maintained through bordering
(block inverse with the Schur complement) instead of refactorization.
Both directions cost O(k^2).
"""
import numpy as np

from . import _backend
from .errors import IllConditionedError, InputError, InvariantViolation

#: Expansions whose Schur complement falls at or below this are rejected.
BETA_MIN = 1e-12
#: Removal pivot magnitude below which the stored inverse is considered corrupt.
LAMBDA_MIN = 1e-14


def _square(inv):
    inv = np.ascontiguousarray(inv, dtype=np.float64)
    if inv.ndim != 2 or inv.shape[0] != inv.shape[1] or inv.shape[0] == 0:
        raise InputError(f"inverse must be a nonempty square matrix, got shape {inv.shape}")
    return inv


def expand_inverse(inv, v, beta_min=BETA_MIN, backend=None):
    """Border ``inv`` with a new point whose similarities to the old ones are ``v``.

    Returns ``(new_inv, beta)`` where ``beta = 1 - v^T inv v`` and the new
    point occupies the last row/column.

    Raises:
        IllConditionedError: if ``beta <= beta_min``.
    """
    inv = _square(inv)
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.shape != (inv.shape[0],):
        raise InputError(f"similarity vector has length {v.shape}, inverse has order {inv.shape[0]}")
    new, beta = _backend.get_backend(backend).expand_inverse(inv, v, beta_min)
    if new is None:
        raise IllConditionedError(f"Schur complement {beta:.3e} <= {beta_min:.1e}")
    return new, float(beta)


def shrink_inverse(inv, index, backend=None):
    """Inverse of the similarity matrix with point ``index`` removed.

    Remaining points keep their relative order.
    """
    inv = _square(inv)
    k = inv.shape[0]
    if k < 2:
        raise InputError("cannot shrink a 1 x 1 inverse")
    index = int(index)
    if not 0 <= index < k:
        raise InputError(f"index {index} out of range for order {k}")
    new = _backend.get_backend(backend).shrink_inverse(inv, index, LAMBDA_MIN)
    if new is None:
        raise InvariantViolation(f"degenerate pivot {inv[index, index]:.3e} at index {index}")
    return new


def row_sums(inv, backend=None):
    """Row sums of ``inv``, i.e. the solution of ``A x = 1``."""
    return _backend.get_backend(backend).row_sums(_square(inv))
