"""Incremental SVDD learner with the Gaussian kernel.

The model keeps only its support vectors, the inverse of their similarity
matrix ``A`` and the row sums of that inverse (``alpha_raw``, the solution
of ``A x = 1``). A set of points are all support vectors exactly when that
solution is strictly positive; the normalized multipliers are
``alpha_raw / sum(alpha_raw)`` and the objective ``alpha^T A alpha`` equals
``1 / sum(alpha_raw)``, which doubles as the scoring threshold.

Every state-changing step replaces arrays rather than mutating them, so a
snapshot of the model is just a tuple of references and rollback is free.
"""
from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import linalg

from . import _backend
from .errors import IllConditionedError, InputError, InvariantViolation
from .inverse import BETA_MIN, LAMBDA_MIN
from .kernel import as_point, check_sigma, similarity_matrix

#: Relative slack on the objective-monotonicity guard, absorbs rounding only.
MONOTONE_RTOL = 1e-12
#: Q values up to this count as inside. Support vectors evaluate to Q = 0 only
#: up to rounding (about 1e-13), and a positive residue would send an existing
#: SV back into expand with a vanishing Schur complement.
INSIDE_TOL = 1e-10
#: A shrink whose pivot (the removed diagonal entry of the inverse) exceeds
#: this cancels about eps * pivot of accuracy per step; past it the surviving
#: inverse is rebuilt directly instead of downdated.
PIVOT_REFRESH = 1e4
#: Multipliers within this relative distance of the minimum count as tied
#: when picking which SV to shrink out; the lowest index wins.
TIE_RTOL = 1e-9


class Label(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    FAR_OUTLIER = "far_outlier"
    NEAR_DUPLICATE = "near_duplicate"


class Action(str, Enum):
    DISCARDED_INTERIOR = "discarded_interior"
    DISCARDED_FAR_OUTLIER = "discarded_far_outlier"
    DISCARDED_NEAR_DUPLICATE = "discarded_near_duplicate"
    DISCARDED_AT_CAP = "discarded_at_cap"
    ABSORBED_AS_SV = "absorbed_as_sv"
    ABSORBED_WITH_SHRINK = "absorbed_with_shrink"
    REPLACED_UNDER_CAP = "replaced_under_cap"
    REVERTED = "reverted"


@dataclass(frozen=True)
class HyperParams:
    """Learner configuration.

    Attributes:
        sigma: Gaussian bandwidth.
        max_sv: cap on the number of support vectors.
        eps_far: points whose largest similarity to the support vectors is
            below this are flagged as far outliers and never learned.
        eps_near: points whose largest similarity exceeds ``1 - eps_near``
            are treated as duplicates of an existing support vector.
        refresh_every: recompute the inverse from scratch after this many
            model changes; 0 disables.
    """

    sigma: float
    max_sv: int = 1024
    eps_far: float = 1e-6
    eps_near: float = 1e-9
    refresh_every: int = 0

    def __post_init__(self):
        check_sigma(self.sigma)
        if int(self.max_sv) != self.max_sv or self.max_sv < 1:
            raise InputError(f"max_sv must be a positive integer, got {self.max_sv}")
        if not 0.0 <= self.eps_far < 1.0:
            raise InputError(f"eps_far must lie in [0, 1), got {self.eps_far}")
        if not 0.0 <= self.eps_near < 1.0:
            raise InputError(f"eps_near must lie in [0, 1), got {self.eps_near}")
        if not self.eps_far < 1.0 - self.eps_near:
            raise InputError("eps_far must be below 1 - eps_near")
        if int(self.refresh_every) != self.refresh_every or self.refresh_every < 0:
            raise InputError(f"refresh_every must be a nonnegative integer, got {self.refresh_every}")


@dataclass(frozen=True)
class ScoreOutcome:
    q: float
    label: Label


@dataclass(frozen=True)
class UpdateOutcome:
    action: Action
    sv_count: int
    objective: float


def _frozen(arr):
    arr.flags.writeable = False
    return arr


def direct_inverse(svs, sigma, pivot_min=0.0):
    """Invert the similarity matrix of ``svs`` through a Cholesky factorization.

    The squared Cholesky pivots are the Schur complements each point would
    get if the set were grown in order, so ``pivot_min`` applies the same
    floor the streaming path uses.
    """
    a = similarity_matrix(svs, sigma)
    try:
        factor = linalg.cho_factor(a, lower=True)
    except linalg.LinAlgError as exc:
        raise IllConditionedError(
            "similarity matrix is numerically singular; increase eps_near") from exc
    smallest = float(np.min(np.diag(factor[0]) ** 2))
    if not smallest > pivot_min:
        raise IllConditionedError(f"Cholesky pivot {smallest:.3e} <= {pivot_min:.1e}")
    inv = linalg.cho_solve(factor, np.eye(a.shape[0]))
    return (inv + inv.T) / 2.0


class SvddModel:
    """Support-vector state plus the incremental update rules.

    Build one with :func:`initialize` (from burn-in data) or
    :meth:`from_support_vectors` (e.g. when loading from disk), then feed
    points to :meth:`process_point`. Scoring is read-only; updates require
    exclusive access.
    """

    def __init__(self, support_vectors, inverse, alpha_raw, params, backend=None):
        self.params = params
        self._core = _backend.get_backend(backend)
        self._updates = 0
        self._set_state(np.ascontiguousarray(support_vectors, dtype=np.float64),
                        np.ascontiguousarray(inverse, dtype=np.float64),
                        np.ascontiguousarray(alpha_raw, dtype=np.float64))

    @classmethod
    def from_support_vectors(cls, support_vectors, params, alpha_raw=None, backend=None,
                             pivot_min=0.0):
        """Rebuild a model from its support vectors, recomputing the inverse.

        ``alpha_raw`` is taken as given when supplied (so a stored model
        reproduces its multipliers bit for bit), otherwise recomputed.
        """
        svs = np.atleast_2d(np.asarray(support_vectors, dtype=np.float64))
        inv = direct_inverse(svs, params.sigma, pivot_min)
        if alpha_raw is None:
            alpha_raw = inv.sum(axis=1)
        return cls(svs, inv, alpha_raw, params, backend=backend)

    # state handling -----------------------------------------------------

    def _set_state(self, svs, inv, alpha_raw):
        self._svs = _frozen(svs)
        self._inv = _frozen(inv)
        self._alpha_raw = _frozen(alpha_raw)
        norm = alpha_raw.sum()
        self._threshold = float(1.0 / norm)
        self._alpha = _frozen(alpha_raw / norm)

    def _snapshot(self):
        return self._svs, self._inv, self._alpha_raw

    def _restore(self, snap):
        self._set_state(*snap)

    def copy(self):
        other = SvddModel.__new__(SvddModel)
        other.__dict__.update(self.__dict__)
        return other

    def refresh(self):
        """Recompute the inverse and multipliers directly from the support vectors."""
        inv = direct_inverse(self._svs, self.params.sigma)
        self._set_state(self._svs, inv, inv.sum(axis=1))

    # read-only views ----------------------------------------------------

    @property
    def support_vectors(self):
        return self._svs

    @property
    def inverse(self):
        return self._inv

    @property
    def alpha_raw(self):
        return self._alpha_raw

    @property
    def alpha(self):
        return self._alpha

    @property
    def threshold(self):
        return self._threshold

    @property
    def sigma(self):
        return self.params.sigma

    @property
    def sv_count(self):
        return self._svs.shape[0]

    @property
    def dimension(self):
        return self._svs.shape[1]

    @property
    def backend(self):
        return self._core.NAME

    def objective_value(self):
        """Dual objective ``alpha^T A alpha``, computed as ``1 / ||alpha_raw||_1``."""
        return self._threshold

    # scoring ------------------------------------------------------------

    def similarities(self, z):
        return self._core.similarity_vector(z, self._svs, self.params.sigma)

    def _q(self, v):
        return self._threshold - float(self._alpha @ v)

    def _classify(self, v):
        vmax = v.max()
        q = self._q(v)
        if vmax < self.params.eps_far:
            return ScoreOutcome(q, Label.FAR_OUTLIER)
        if vmax > 1.0 - self.params.eps_near:
            return ScoreOutcome(q, Label.NEAR_DUPLICATE)
        return ScoreOutcome(q, Label.INSIDE if q <= INSIDE_TOL else Label.OUTSIDE)

    def score(self, z):
        """Classify ``z`` against the current boundary.

        ``q`` is half the squared feature-space distance to the centre minus
        the squared radius; ``q <= 0`` (up to ``INSIDE_TOL``) means inside. The far/duplicate
        filters take precedence over the sign of ``q``.
        """
        return self._classify(self.similarities(as_point(z, self.dimension)))

    def score_many(self, points):
        return [self.score(z) for z in np.atleast_2d(points)]

    # elementary steps ---------------------------------------------------

    def _append(self, z, inv, alpha_raw):
        self._set_state(np.vstack([self._svs, z[None, :]]), inv, alpha_raw)

    def _remove(self, index):
        inv = self._core.shrink_inverse(self._inv, index, LAMBDA_MIN)
        if inv is None:
            raise InvariantViolation(
                f"degenerate pivot {self._inv[index, index]:.3e} at index {index}")
        svs = np.delete(self._svs, index, axis=0)
        if self._inv[index, index] > PIVOT_REFRESH:
            inv = direct_inverse(svs, self.sigma)
        self._set_state(svs, inv, self._core.row_sums(inv))

    def _bordered(self, v):
        inv, beta = self._core.expand_inverse(self._inv, v, BETA_MIN)
        if inv is None:
            raise IllConditionedError(f"Schur complement {beta:.3e} <= {BETA_MIN:.1e}")
        return inv, self._core.row_sums(inv)

    def expand(self, z, v=None):
        """Try to add ``z`` as a support vector.

        Returns False (model untouched) when the new multiplier is
        nonpositive, i.e. ``z`` is interior. On success the older
        multipliers may have turned nonpositive; :meth:`shrink` restores a
        valid state.

        Raises:
            IllConditionedError: ``z`` nearly duplicates the current set.
        """
        z = as_point(z, self.dimension)
        if v is None:
            v = self.similarities(z)
        inv, alpha_raw = self._bordered(v)
        if alpha_raw[-1] <= 0.0:
            return False
        self._append(z, inv, alpha_raw)
        return True

    def shrink(self, backup=None):
        """Drop the smallest-multiplier support vector until all are positive.

        Removed points are appended to ``backup`` (a new list when None),
        which is returned. Ties go to the lowest index.
        """
        if backup is None:
            backup = []
        while self._alpha_raw.min() <= 0.0:
            if self.sv_count < 2:
                raise InvariantViolation("single support vector with nonpositive multiplier")
            a = self._alpha_raw
            low = a.min()
            p = int(np.flatnonzero(a <= low + TIE_RTOL * abs(low))[0])
            backup.append(self._svs[p].copy())
            self._remove(p)
        return backup

    def _rescan(self, backup):
        """One FIFO pass over ``backup``, re-admitting points now outside.

        A re-admission can push other multipliers nonpositive; the points
        shrunk out then join the end of the queue. Each point is re-admitted
        at most once per pass, which bounds the loop.
        """
        queue = deque(backup)
        readmitted = set()
        while queue:
            x = queue.popleft()
            key = x.tobytes()
            if key in readmitted or self.sv_count >= self.params.max_sv:
                continue
            v = self.similarities(x)
            if self._q(v) <= INSIDE_TOL:
                continue
            try:
                inv, alpha_raw = self._bordered(v)
            except IllConditionedError:
                continue
            if alpha_raw[-1] <= 0.0:
                continue
            self._append(x, inv, alpha_raw)
            readmitted.add(key)
            if alpha_raw.min() <= 0.0:
                queue.extend(self.shrink())

    def _absorb(self, z, v):
        try:
            inv, alpha_raw = self._bordered(v)
        except IllConditionedError:
            return Action.DISCARDED_NEAR_DUPLICATE
        if alpha_raw[-1] <= 0.0:
            return Action.DISCARDED_INTERIOR
        all_positive = alpha_raw[:-1].min() > 0.0
        if self.sv_count + 1 > self.params.max_sv and all_positive:
            smallest = int(np.argmin(alpha_raw[:-1]))
            if alpha_raw[-1] < alpha_raw[smallest]:
                return Action.DISCARDED_AT_CAP
            self._append(z, inv, alpha_raw)
            self._remove(smallest)
            if self._alpha_raw[-1] <= 0.0:
                return None
            if self._alpha_raw.min() <= 0.0:
                backup = self.shrink()
                if len(backup) > 1:
                    self._rescan(backup)
            return Action.REPLACED_UNDER_CAP
        self._append(z, inv, alpha_raw)
        if all_positive:
            return Action.ABSORBED_AS_SV
        backup = self.shrink()
        if len(backup) > 1:
            self._rescan(backup)
        return Action.ABSORBED_WITH_SHRINK

    # main loop ----------------------------------------------------------

    def _outcome(self, action):
        return UpdateOutcome(action, self.sv_count, self._threshold)

    def process_point(self, z):
        """Feed one point to the learner and report what happened to it.

        Any exception leaves the model exactly as it was before the call.
        """
        z = as_point(z, self.dimension)
        v = self.similarities(z)
        outcome = self._classify(v)
        if outcome.label is Label.FAR_OUTLIER:
            return self._outcome(Action.DISCARDED_FAR_OUTLIER)
        if outcome.label is Label.NEAR_DUPLICATE:
            return self._outcome(Action.DISCARDED_NEAR_DUPLICATE)
        if outcome.label is Label.INSIDE:
            return self._outcome(Action.DISCARDED_INTERIOR)

        snap = self._snapshot()
        old_norm = self._alpha_raw.sum()
        try:
            action = self._absorb(z, v)
        except BaseException:
            self._restore(snap)
            raise
        if action is None:
            # cap replacement left z interior: undo the whole transaction
            self._restore(snap)
            return self._outcome(Action.DISCARDED_AT_CAP)
        if self._svs is snap[0]:
            return self._outcome(action)
        if (action is not Action.REPLACED_UNDER_CAP
                and self._alpha_raw.sum() < old_norm * (1.0 - MONOTONE_RTOL)):
            self._restore(snap)
            return self._outcome(Action.REVERTED)
        self._updates += 1
        if self.params.refresh_every and self._updates % self.params.refresh_every == 0:
            self.refresh()
        return self._outcome(action)

    def partial_fit(self, points):
        """Stream ``points`` through :meth:`process_point`; return per-action counts."""
        counts = Counter()
        for z in points:
            counts[self.process_point(z).action] += 1
        return counts

    # verification -------------------------------------------------------

    def check_invariants(self, tol=1e-8):
        """Raise :class:`InvariantViolation` unless the state is self-consistent.

        ``A`` is rebuilt from the stored support vectors, so this is O(k^2 d)
        and meant for tests and end-of-run checks, not the hot path.
        """
        a = self._alpha
        if not np.all(a > 0.0):
            raise InvariantViolation("nonpositive multiplier")
        if abs(a.sum() - 1.0) > 1e-12:
            raise InvariantViolation(f"multipliers sum to {a.sum()!r}")
        if abs(self._threshold - 1.0 / self._alpha_raw.sum()) > 1e-12:
            raise InvariantViolation("threshold out of sync with alpha_raw")
        if self.sv_count > self.params.max_sv:
            raise InvariantViolation(f"{self.sv_count} support vectors exceed cap {self.params.max_sv}")
        if np.abs(self._inv - self._inv.T).max() > 1e-10:
            raise InvariantViolation("inverse is not symmetric")
        gram = similarity_matrix(self._svs, self.params.sigma)
        residual = np.abs(gram @ self._alpha_raw - 1.0).max()
        if residual > tol:
            raise InvariantViolation(f"A alpha_raw = 1 residual {residual:.3e} > {tol:.1e}")
        q = np.abs(self._threshold - gram @ a).max()
        if q > tol:
            raise InvariantViolation(f"support vector off the boundary by {q:.3e}")


def objective_value(model):
    return model.objective_value()


def initialize(burn_in, params, backend=None):
    """Build a model from a batch of burn-in points.

    Near-duplicates (similarity above ``1 - eps_near`` to an already kept
    point) are dropped first, then the similarity matrix of the rest is
    inverted directly and interior points are shrunk out. The inverse is
    recomputed from the survivors, and the shrunk-out points get the same
    single FIFO re-check as on the streaming path. A burn-in whose
    similarity matrix is too close to singular is fed point by point instead.
    """
    pts = [as_point(x) for x in burn_in]
    if not pts:
        raise InputError("burn-in set is empty")
    dim = pts[0].shape[0]
    core = _backend.get_backend(backend)
    kept = [pts[0]]
    for x in pts[1:]:
        if x.shape[0] != dim:
            raise InputError(f"dimension mismatch in burn-in: expected {dim}, got {x.shape[0]}")
        v = core.similarity_vector(x, np.array(kept), params.sigma)
        vmax = v.max()
        if vmax > 1.0 - params.eps_near or vmax == 1.0:
            continue
        kept.append(x)
    try:
        model = SvddModel.from_support_vectors(np.array(kept), params, backend=backend,
                                               pivot_min=BETA_MIN)
    except IllConditionedError:
        # Too close to singular for a direct inverse (wide sigma, many
        # points). Grow the model one point at a time instead, where the
        # Schur-complement floor rejects the offending points.
        model = SvddModel.from_support_vectors(np.array(kept[:1]), params, backend=backend)
        model.partial_fit(kept[1:])
        return model
    if model.alpha_raw.min() <= 0.0:
        backup = model.shrink()
        model.refresh()
        model._rescan(backup)
    while model.sv_count > params.max_sv:
        model._remove(int(np.argmin(model.alpha_raw)))
        model.shrink()
    return model


def fit_stream(points, params, burn_in=10, backend=None):
    """Initialize on the first ``burn_in`` points and stream the rest.

    Returns ``(model, counts)`` where ``counts`` tallies update actions.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise InputError("need a nonempty 2-D array of points")
    if burn_in < 1:
        raise InputError(f"burn-in must be at least 1, got {burn_in}")
    model = initialize(points[:burn_in], params, backend=backend)
    return model, model.partial_fit(points[burn_in:])
