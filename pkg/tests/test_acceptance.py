"""Acceptance suite: one recorded pass/fail line per criterion.

Tolerances are fixed by the criteria themselves and are not tuned here.
Criteria 1 and 3 fail as stated. The recorded detail lines carry the
measurements, and the decisions ledger explains why these are not reachable
in float64 or with a one-pass learner.
"""
import os
import time

import numpy as np
import pytest

from streamsvdd import (Action, HyperParams, IllConditionedError, InvariantViolation, batch_solve,
                        dumps, expand_inverse, fit_stream, initialize, loads, shrink_inverse,
                        similarity_matrix, similarity_vector)
from streamsvdd._backend import BACKENDS, get_backend
from streamsvdd.bench import growth_fit, update_times
from streamsvdd.cli import main
from streamsvdd.csvio import read_csv

pytestmark = pytest.mark.slow


def sv_q(model):
    """Q at every support vector, from a freshly built similarity matrix."""
    a = similarity_matrix(model.support_vectors, model.sigma)
    return model.threshold - a @ model.alpha


def checked_stream(points, params, burn_in):
    """Stream ``points`` and track the per-update quantities criteria 2 to 4 need."""
    model = initialize(points[:burn_in], params)
    prev = model.objective_value()
    worst_q = float(np.abs(sv_q(model)).max())
    increases = 0
    reverts = 0
    for z in points[burn_in:]:
        out = model.process_point(z)
        reverts += out.action is Action.REVERTED
        obj = model.objective_value()
        increases += obj > prev
        prev = obj
        worst_q = max(worst_q, float(np.abs(sv_q(model)).max()))
    return model, worst_q, increases, reverts


# 1 --------------------------------------------------------------------------

def inverse_trial(rng):
    d = int(rng.choice([2, 5, 10]))
    sigma = float(rng.uniform(0.3, 3.0))
    k_max = int(rng.integers(2, 51))
    pts = rng.uniform(size=(1, d))
    inv = np.array([[1.0]])
    for _ in range(3 * k_max):
        grow = pts.shape[0] < 2 or (pts.shape[0] < k_max and rng.random() < 0.6)
        if grow:
            z = rng.uniform(size=d)
            try:
                inv, _ = expand_inverse(inv, similarity_vector(z, pts, sigma))
            except IllConditionedError:
                continue
            pts = np.vstack([pts, z])
        else:
            i = int(rng.integers(pts.shape[0]))
            try:
                inv = shrink_inverse(inv, i)
            except InvariantViolation:
                return np.inf, np.inf, np.inf
            pts = np.delete(pts, i, axis=0)
    a = similarity_matrix(pts, sigma)
    direct = np.linalg.inv(a)
    dev = float(np.abs(inv - direct).max())
    return dev, dev / float(np.abs(direct).max()), float(np.linalg.cond(a))


def test_criterion_1_inverse_maintenance(record_criterion):
    rng = np.random.default_rng(20240501)
    start = time.perf_counter()
    results = np.array([inverse_trial(rng) for _ in range(1000)])
    elapsed = time.perf_counter() - start
    dev, rel, cond = results.T
    bad = dev >= 1e-8
    passed = bool(not bad.any() and elapsed < 10.0)
    well = cond < 1e6
    detail = (f"{int(bad.sum())}/1000 trials at or above 1e-8 absolute; worst {dev.max():.2e}; "
              f"max cond {cond.max():.1e}; trials with final cond < 1e6: {int(well.sum())}, "
              f"worst there {dev[well].max() if well.any() else 0:.1e}; "
              f"worst relative {rel.max():.1e}; {elapsed:.2f}s")
    record_criterion(1, "inverse maintenance vs dense inversion", passed, detail)
    assert passed, detail


# 2 and 4 ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def long_stream():
    pts = np.random.default_rng(7).standard_normal((10_000, 2))
    start = time.perf_counter()
    model, worst_q, increases, reverts = checked_stream(pts, HyperParams(sigma=1.5), burn_in=10)
    return model, worst_q, increases, reverts, time.perf_counter() - start


def test_criterion_2_equidistance(long_stream, record_criterion):
    model, worst_q, _, _, elapsed = long_stream
    passed = worst_q < 1e-8 and elapsed < 5.0
    detail = f"worst |Q| at an SV {worst_q:.2e} over 10000 points; sv_count {model.sv_count}; {elapsed:.2f}s"
    record_criterion(2, "support-vector equidistance", passed, detail)
    assert passed, detail


# 3 and 4 ----------------------------------------------------------------------

def oracle_instances(count=200, seed=31337):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(5, 13))
        yield rng.uniform(size=(n, 2)), float(rng.uniform(0.3, 0.8)), rng


def compare_with_oracle(burn_in):
    rows = []
    increases = reverts = 0
    for pts, sigma, rng in oracle_instances():
        exact = batch_solve(pts, sigma)
        order = rng.permutation(len(pts))
        model, _, inc, rev = checked_stream(pts[order], HyperParams(sigma=sigma), burn_in)
        increases += inc
        reverts += rev
        got = sorted(int(order[np.flatnonzero((pts[order] == sv).all(axis=1))[0]])
                     for sv in model.support_vectors)
        rows.append((model.objective_value(), exact.objective, tuple(got) == exact.support_indices))
    obj, best, same = map(np.array, zip(*rows))
    return obj, best, same, increases, reverts


@pytest.fixture(scope="module")
def oracle_runs():
    return compare_with_oracle(burn_in=1)


def test_criterion_3_oracle_equivalence(oracle_runs, record_criterion):
    obj, best, same, _, _ = oracle_runs
    gap = (obj - best) / best
    within = gap <= 0.01
    never_below = obj >= best - 1e-9
    match_rate = same.mean()
    passed = bool(within.all() and never_below.all() and match_rate >= 0.9)
    # the default pipeline (batch burn-in of 10 points) for reference only
    d_obj, d_best, d_same, _, _ = compare_with_oracle(burn_in=10)
    d_gap = (d_obj - d_best) / d_best
    detail = (f"one point at a time: {int(within.sum())}/200 within 1%, worst gap {gap.max():.2%}, "
              f"{int((~never_below).sum())} below optimum, support sets equal in {match_rate:.1%}; "
              f"with burn-in 10 (informational): {int((d_gap <= 0.01).sum())}/200 within 1%, "
              f"worst gap {d_gap.max():.2%}, sets equal in {d_same.mean():.1%}")
    record_criterion(3, "oracle equivalence", passed, detail)
    assert passed, detail


def test_criterion_4_monotonicity(long_stream, oracle_runs, record_criterion):
    _, _, inc2, rev2, _ = long_stream
    _, _, _, inc3, rev3 = oracle_runs
    increases, reverts = inc2 + inc3, rev2 + rev3
    passed = increases == 0 and reverts == 0
    detail = f"objective increases {increases}, revert-guard firings {reverts}"
    record_criterion(4, "objective monotonicity", passed, detail)
    assert passed, detail


# 5 ----------------------------------------------------------------------------

def test_criterion_5_update_complexity(record_criterion):
    sizes = (50, 100, 200)
    lines = []
    verdicts = []
    for name in sorted(BACKENDS):
        runs = {k: update_times(k, n_points=3000, backend=name) for k in sizes}
        # medians over updates that reach the bordering step; throughput over all points
        medians = [float(np.median(t[hard])) for t, hard in (runs[k] for k in sizes)]
        slope, r2, r3 = growth_fit(sizes, medians)
        rate = 1.0 / float(np.mean(runs[100][0]))
        lines.append(f"{name}: median us " + "/".join(f"{m * 1e6:.0f}" for m in medians)
                     + f", slope {slope:.2f}, {rate:,.0f} points/s at k=100")
        if name == get_backend().NAME:
            verdicts.append(r2 < r3 and rate >= 10_000)
    passed = all(verdicts)
    detail = "; ".join(lines) + f"; gated on {get_backend().NAME}"
    record_criterion(5, "per-update complexity and throughput", passed, detail)
    assert passed, detail


# 6 ----------------------------------------------------------------------------

def cap_cases():
    exact = dict(sigma=1.0, eps_near=0.0, max_sv=2)
    seen = {}
    for start, z in [([(0.0, 0.0), (1.0, 0.0)], (2.0, 0.0)),
                     ([(0.0, 0.0), (3.0, 0.0)], (1.5, 1.2)),
                     ([(0.0, 0.0), (0.5, 0.0)], (4.0, 0.0))]:
        model = initialize(start, HyperParams(**exact))
        seen[model.process_point(z).action] = model.sv_count
    return seen


def test_criterion_6_memory_cap(record_criterion):
    ang = np.random.default_rng(5).permutation(np.linspace(0, 2 * np.pi, 300, endpoint=False))
    ring = np.column_stack([np.cos(ang), np.sin(ang)])
    uncapped, _ = fit_stream(ring, HyperParams(sigma=0.1), burn_in=1)
    model = initialize(ring[:1], HyperParams(sigma=0.1, max_sv=16))
    peak = model.sv_count
    invariant_failures = 0
    for z in ring[1:]:
        model.process_point(z)
        peak = max(peak, model.sv_count)
        try:
            model.check_invariants()
        except InvariantViolation:
            invariant_failures += 1
    cases = cap_cases()
    wanted = {Action.ABSORBED_WITH_SHRINK, Action.DISCARDED_AT_CAP, Action.REPLACED_UNDER_CAP}
    passed = (uncapped.sv_count > 16 and peak <= 16 and invariant_failures == 0
              and set(cases) == wanted and all(k <= 2 for k in cases.values()))
    detail = (f"uncapped stream ends with {uncapped.sv_count} SVs; capped peak {peak}; "
              f"invariant failures {invariant_failures}; cases hit: "
              + ", ".join(sorted(a.value for a in cases)))
    record_criterion(6, "memory cap", passed, detail)
    assert passed, detail


# 7 ----------------------------------------------------------------------------

SMTP_ENV = "STREAMSVDD_SMTP_CSV"


def test_criterion_7_smtp(record_criterion):
    path = os.environ.get(SMTP_ENV)
    if not path or not os.path.exists(path):
        record_criterion(7, "SMTP reproduction", None, f"dataset absent; set {SMTP_ENV} to a CSV of the training rows")
        pytest.skip("SMTP dataset not available")
    data, _ = read_csv(path)
    start = time.perf_counter()
    model, _ = fit_stream(data, HyperParams(sigma=6.0))
    elapsed = time.perf_counter() - start
    obj = model.objective_value()
    passed = model.sv_count == 5 and abs(obj - 0.393) <= 0.005 and elapsed < 30.0
    detail = f"{data.shape[0]} rows; sv_count {model.sv_count}; objective {obj:.4f}; {elapsed:.2f}s"
    record_criterion(7, "SMTP reproduction", passed, detail)
    assert passed, detail


# 8 ----------------------------------------------------------------------------

def test_criterion_8_synthetic_f1(tmp_path, record_criterion, capsys):
    import io
    start = time.perf_counter()
    tr, te = tmp_path / "train.csv", tmp_path / "test.csv"
    assert main(["synth", str(tr), str(te), "--seed", "0"], out=io.StringIO()) == 0
    out = io.StringIO()
    assert main(["eval", str(tr), str(te), "--train", "--sigma", "1.5"], out=out) == 0
    elapsed = time.perf_counter() - start
    rep = dict(line.split("=", 1) for line in out.getvalue().splitlines())
    f1 = float(rep["f1"])
    passed = f1 >= 0.9 and elapsed < 5.0
    detail = (f"f1 {f1:.4f} (precision {float(rep['precision']):.4f}, recall {float(rep['recall']):.4f}); "
              f"sv_count {rep['sv_count']}; {elapsed:.2f}s")
    record_criterion(8, "synthetic F1", passed, detail)
    assert passed, detail


# 9 ----------------------------------------------------------------------------

def test_criterion_9_serialization(record_criterion):
    rng = np.random.default_rng(99)
    worst = 0.0
    label_mismatch = 0
    not_identical = 0
    for _ in range(100):
        d = int(rng.integers(1, 6))
        sigma = float(rng.uniform(0.3, 3.0))
        pts = rng.standard_normal((int(rng.integers(1, 300)), d))
        model, _ = fit_stream(pts, HyperParams(sigma=sigma, max_sv=int(rng.integers(1, 64))))
        text = dumps(model)
        back = loads(text)
        not_identical += dumps(back) != text
        for z in rng.standard_normal((100, d)) * 2:
            a, b = model.score(z), back.score(z)
            worst = max(worst, abs(a.q - b.q))
            label_mismatch += a.label is not b.label
    passed = worst <= 1e-12 and label_mismatch == 0 and not_identical == 0
    detail = (f"worst score difference {worst:.1e}; label mismatches {label_mismatch}; "
              f"non-identical re-saves {not_identical}")
    record_criterion(9, "serialization round trip", passed, detail)
    assert passed, detail
