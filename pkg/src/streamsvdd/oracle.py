"""Exact reference solutions for small SVDD instances.

The dual ``min alpha^T A alpha`` over the probability simplex is strictly
convex for distinct points, so it has a single KKT point. For ``n <= 20``
we find it by brute force: for every nonempty subset ``S`` solve
``A_S x = 1``; ``S`` is the support set iff ``x > 0`` and every point
outside ``S`` scores inside the resulting boundary.

:func:`projected_gradient` solves the same problem by a completely
different route and is used to cross-check the enumeration.
"""
from dataclasses import dataclass
from itertools import combinations, islice
from math import comb

import numpy as np

from .errors import InputError, OracleFailure
from .kernel import check_sigma, similarity_matrix

MAX_POINTS = 20
#: Non-support points may score up to this much outside and still count as KKT.
KKT_TOL = 1e-10
#: Support points must sit on the boundary within this.
SUPPORT_TOL = 1e-8
#: Keepers whose objectives differ by less than this are the same solution.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class OracleSolution:
    support_indices: tuple
    alpha: np.ndarray
    objective: float


_CHUNK = 8192


def _subset_solutions(gram, size, start):
    n = gram.shape[0]
    idx = np.array(list(islice(combinations(range(n), size), start, start + _CHUNK)),
                   dtype=np.intp)
    blocks = gram[idx[:, :, None], idx[:, None, :]]
    try:
        x = np.linalg.solve(blocks, np.ones((len(idx), size, 1)))[..., 0]
    except np.linalg.LinAlgError:
        # a singular block somewhere in the batch; fall back to one at a time
        x = np.full((len(idx), size), np.nan)
        for r, b in enumerate(blocks):
            try:
                x[r] = np.linalg.solve(b, np.ones(size))
            except np.linalg.LinAlgError:
                pass
    return idx, x


def batch_solve(points, sigma):
    """Globally optimal support set and multipliers of a small instance.

    Raises:
        InputError: for more than 20 points or an empty set.
        OracleFailure: when no subset (or several materially different
            subsets) satisfy the optimality conditions.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    if not 1 <= n <= MAX_POINTS:
        raise InputError(f"enumeration oracle handles 1..{MAX_POINTS} points, got {n}")
    sigma = check_sigma(sigma)
    gram = similarity_matrix(pts, sigma)
    keepers = []
    for size in range(1, n + 1):
        for start in range(0, comb(n, size), _CHUNK):
            idx, x = _subset_solutions(gram, size, start)
            ok = np.all(x > 0.0, axis=1)
            idx, x = idx[ok], x[ok]
            if not len(idx):
                continue
            norm = x.sum(axis=1)
            alpha = x / norm[:, None]
            # q[m, j]: score of point j against candidate subset m
            q = 1.0 / norm[:, None] - np.einsum("msj,ms->mj", gram[idx], alpha)
            inside = q <= KKT_TOL
            inside[np.arange(len(idx))[:, None], idx] = True
            for m in np.flatnonzero(inside.all(axis=1)):
                keepers.append(OracleSolution(
                    tuple(int(i) for i in idx[m]), alpha[m], float(1.0 / norm[m])))
    if not keepers:
        raise OracleFailure("no subset satisfies the KKT conditions")
    keepers.sort(key=lambda s: (s.objective, len(s.support_indices)))
    best = keepers[0]
    for other in keepers[1:]:
        if other.objective - best.objective > TIE_TOL:
            raise OracleFailure(
                f"distinct KKT subsets {best.support_indices} and {other.support_indices} "
                f"(objectives {best.objective!r}, {other.objective!r})")
    return best


def kkt_verify(points, solution, sigma):
    """True iff ``solution`` is a KKT point of the dual on ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    support = np.asarray(solution.support_indices, dtype=np.intp)
    alpha = np.asarray(solution.alpha, dtype=np.float64)
    gram = similarity_matrix(pts, sigma)
    threshold = alpha @ gram[np.ix_(support, support)] @ alpha
    q = threshold - gram[:, support] @ alpha
    mask = np.ones(pts.shape[0], dtype=bool)
    mask[support] = False
    return bool(np.all(np.abs(q[support]) <= SUPPORT_TOL) and np.all(q[mask] <= KKT_TOL))


def project_simplex(y):
    """Euclidean projection onto ``{x >= 0, sum(x) = 1}`` (sort-based)."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(y - css[rho] / (rho + 1.0), 0.0)


def projected_gradient(points, sigma, tol=1e-12, max_iter=1_000_000):
    """Minimize ``alpha^T A alpha`` on the simplex by projected gradient.

    Step size is ``1 / (2 * lambda_max(A))``; stops when an iteration moves
    no coordinate by more than ``tol``. Returns ``(alpha, objective, iters)``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    gram = similarity_matrix(pts, check_sigma(sigma))
    step = 1.0 / (2.0 * np.linalg.eigvalsh(gram)[-1])
    alpha = np.full(pts.shape[0], 1.0 / pts.shape[0])
    for it in range(1, max_iter + 1):
        new = project_simplex(alpha - step * 2.0 * (gram @ alpha))
        moved = np.abs(new - alpha).max()
        alpha = new
        if moved < tol:
            break
    return alpha, float(alpha @ gram @ alpha), it
