"""Per-update timing at a fixed support-vector count.

A small bandwidth in five dimensions makes nearly every uniform point a
boundary point, and capping the model at ``k`` keeps the count pinned
there, so each timed update pays for a full bordering step at size ``k``.
"""
import time

import numpy as np

from .model import Action, HyperParams, initialize


def filled_model(k, backend=None, dim=5, sigma=0.2, seed=0):
    """Model held at exactly ``k`` support vectors, plus the RNG that built it."""
    rng = np.random.default_rng(seed)
    params = HyperParams(sigma=sigma, max_sv=k, eps_far=0.0)
    model = initialize(rng.uniform(size=(1, dim)), params, backend=backend)
    while model.sv_count < k:
        model.process_point(rng.uniform(size=dim))
    return model, rng


#: Actions that end before any bordering work (a single similarity pass).
CHEAP = (Action.DISCARDED_INTERIOR, Action.DISCARDED_FAR_OUTLIER, Action.DISCARDED_NEAR_DUPLICATE)


def update_times(k, n_points=2000, backend=None, dim=5, sigma=0.2, seed=0):
    """Wall time of each of ``n_points`` updates on a model capped at ``k``.

    Returns ``(times, bordered)``; ``bordered`` marks the updates that went
    past the filters into the O(k^2) expand step.
    """
    model, rng = filled_model(k, backend, dim, sigma, seed)
    points = rng.uniform(size=(n_points, dim))
    times = np.empty(n_points)
    bordered = np.empty(n_points, dtype=bool)
    clock = time.perf_counter
    for i, z in enumerate(points):
        t0 = clock()
        out = model.process_point(z)
        times[i] = clock() - t0
        bordered[i] = out.action not in CHEAP
    return times, bordered


def growth_fit(sizes, medians):
    """Least-squares residuals of log-time against fixed exponents 2 and 3.

    Returns ``(slope, resid_quadratic, resid_cubic)`` where ``slope`` is the
    free log-log slope. The intercept is fitted in each case.
    """
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(medians, dtype=float))
    slope = np.polyfit(x, y, 1)[0]

    def resid(p):
        r = y - p * x
        return float(np.sum((r - r.mean()) ** 2))
    return float(slope), resid(2.0), resid(3.0)
