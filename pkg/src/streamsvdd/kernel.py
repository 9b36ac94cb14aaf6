"""Gaussian similarity between points and against a support-vector set."""
import numpy as np
from scipy.spatial.distance import cdist

from . import _backend
from .errors import InputError


def as_point(x, dimension=None):
    """Coerce ``x`` to a contiguous float64 vector and validate it."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"expected a 1-D feature vector, got shape {arr.shape}")
    if dimension is not None and arr.shape[0] != dimension:
        raise InputError(f"dimension mismatch: expected {dimension}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InputError("feature vector contains NaN or Inf")
    return arr


def check_sigma(sigma):
    sigma = float(sigma)
    if not (sigma > 0 and np.isfinite(sigma)):
        raise InputError(f"bandwidth must be a positive finite number, got {sigma}")
    return sigma


def gaussian_similarity(x, y, sigma):
    """exp(-||x - y||^2 / (2 sigma^2)); symmetric in x and y."""
    x = as_point(x)
    y = as_point(y, x.shape[0])
    sigma = check_sigma(sigma)
    diff = x - y
    return float(np.exp(-(diff @ diff) / (2.0 * sigma * sigma)))


def similarity_vector(z, svs, sigma, backend=None):
    """Similarities between ``z`` and every row of ``svs``, in row order."""
    svs = np.ascontiguousarray(svs, dtype=np.float64)
    if svs.ndim != 2 or svs.shape[0] == 0:
        raise InputError("support-vector set must be a nonempty 2-D array")
    z = as_point(z, svs.shape[1])
    return _backend.get_backend(backend).similarity_vector(z, svs, check_sigma(sigma))


def similarity_matrix(points, sigma):
    """Full Gaussian similarity matrix of the rows of ``points``."""
    points = np.asarray(points, dtype=np.float64)
    d2 = cdist(points, points, "sqeuclidean")
    return np.exp(-d2 / (2.0 * sigma * sigma))
