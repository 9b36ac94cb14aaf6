"""Pure numpy implementation of the hot kernels.

Used when the compiled ``_ccore`` extension is unavailable or when
``STREAMSVDD_PURE_PYTHON`` is set. Both modules expose the same four
functions with identical semantics.
"""
import numpy as np

NAME = "python"


def similarity_vector(z, svs, sigma):
    diff = svs - z
    d2 = np.einsum("ij,ij->i", diff, diff)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def expand_inverse(inv, v, beta_min):
    """Return ``(new_inv, beta)``; ``new_inv`` is None when ``beta <= beta_min``."""
    k = inv.shape[0]
    p = inv @ v
    beta = 1.0 - v @ p
    if not beta > beta_min:
        return None, beta
    out = np.empty((k + 1, k + 1))
    out[:k, :k] = inv + np.outer(p, p) / beta
    out[:k, k] = -p / beta
    out[k, :k] = out[:k, k]
    out[k, k] = 1.0 / beta
    return out, beta


def shrink_inverse(inv, index, lam_min):
    """Drop row/column ``index``; ``None`` when the pivot is degenerate."""
    lam = inv[index, index]
    if abs(lam) < lam_min:
        return None
    keep = np.r_[0:index, index + 1:inv.shape[0]]
    u = inv[keep, index]
    return inv[np.ix_(keep, keep)] - np.outer(u, u) / lam


def row_sums(inv):
    return inv.sum(axis=1)
