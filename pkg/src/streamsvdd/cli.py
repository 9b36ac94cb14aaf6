"""Command-line front end: ``train``, ``score``, ``eval``, ``inspect`` and ``synth``.

Reports go to stdout as ``key=value`` lines, diagnostics to stderr.
Exit status: 0 success, 2 usage or input error, 3 internal invariant
violation.
"""
import argparse
import sys
import time

import numpy as np

from . import store
from .csvio import read_csv, write_csv
from .errors import InvariantViolation, SvddError
from .model import Action, HyperParams, Label, fit_stream

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INVARIANT = 3

# end-of-run sanity check on the rebuilt similarity matrix
FINAL_CHECK_TOL = 1e-6


class CliError(Exception):
    """Input problem that should exit with status 2."""


def _emit(stream, **fields):
    for key, value in fields.items():
        if isinstance(value, float):
            value = repr(value)  # shortest text that parses back to the same double
        print(f"{key}={value}", file=stream)


def _add_training_flags(p, sigma_required=True):
    p.add_argument("--sigma", type=float, required=sigma_required, help="Gaussian bandwidth")
    p.add_argument("--burn-in", type=int, default=10, help="rows used to initialize (default 10)")
    p.add_argument("--max-sv", type=int, default=1024, help="support-vector cap (default 1024)")
    p.add_argument("--eps-far", type=float, default=1e-6,
                   help="far-outlier similarity floor (default 1e-6)")
    p.add_argument("--eps-near", type=float, default=1e-9,
                   help="near-duplicate similarity margin (default 1e-9)")
    p.add_argument("--refresh-every", type=int, default=0,
                   help="recompute the inverse every R model changes; 0 disables")


def _train(path, args):
    data, _ = read_csv(path)
    if args.burn_in < 1:
        raise CliError("--burn-in must be at least 1")
    params = HyperParams(sigma=args.sigma, max_sv=args.max_sv, eps_far=args.eps_far,
                         eps_near=args.eps_near, refresh_every=args.refresh_every)
    start = time.perf_counter()
    model, counts = fit_stream(data, params, burn_in=args.burn_in)
    elapsed = time.perf_counter() - start
    model.check_invariants(tol=FINAL_CHECK_TOL)
    return model, counts, elapsed, data.shape[0]


def cmd_train(args, out):
    model, counts, elapsed, n_rows = _train(args.input, args)
    store.save(model, args.out)
    _emit(out, rows=n_rows, burn_in=min(args.burn_in, n_rows),
          objective=model.objective_value(), sv_count=model.sv_count)
    for action in Action:
        _emit(out, **{f"count_{action.value}": counts.get(action, 0)})
    _emit(out, train_seconds=elapsed, backend=model.backend, model=args.out)
    return EXIT_OK


def _load_for_rows(model_path, data):
    model = store.load(model_path)
    if data.shape[1] != model.dimension:
        raise CliError(f"dimension mismatch: model expects {model.dimension} features, "
                       f"input has {data.shape[1]}")
    return model


def cmd_score(args, out):
    data, _ = read_csv(args.input, labeled=args.labeled)
    model = _load_for_rows(args.model, data)
    rows = []
    for z in data:
        s = model.score(z)
        rows.append((repr(s.q), s.label.value))
    if args.out:
        write_csv(args.out, ["q", "label"], rows)
        _emit(out, rows=len(rows), out=args.out)
    else:
        print("q,label", file=out)
        for row in rows:
            print(",".join(row), file=out)
    return EXIT_OK


def confusion_report(predicted_outlier, labels):
    """Confusion counts plus precision, recall and F1 for the outlier class."""
    pred = np.asarray(predicted_outlier, dtype=bool)
    truth = np.asarray(labels) == 1
    tp = int(np.sum(pred & truth))
    fp = int(np.sum(pred & ~truth))
    tn = int(np.sum(~pred & ~truth))
    fn = int(np.sum(~pred & truth))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"true_pos": tp, "false_pos": fp, "true_neg": tn, "false_neg": fn,
            "precision": precision, "recall": recall, "f1": f1}


def cmd_eval(args, out):
    data, labels = read_csv(args.labeled_csv, labeled=True)
    if args.train:
        if args.sigma is None:
            raise CliError("--train requires --sigma")
        model, _, elapsed, _ = _train(args.model, args)
        if model.dimension != data.shape[1]:
            raise CliError(f"dimension mismatch: training data has {model.dimension} features, "
                           f"evaluation data has {data.shape[1]}")
    else:
        model = _load_for_rows(args.model, data)
        elapsed = 0.0
    outlier_labels = (Label.OUTSIDE, Label.FAR_OUTLIER)
    predicted = [model.score(z).label in outlier_labels for z in data]
    report = confusion_report(predicted, labels)
    _emit(out, **report)
    _emit(out, objective=model.objective_value(), sv_count=model.sv_count, train_seconds=elapsed)
    return EXIT_OK


def cmd_inspect(args, out):
    model = store.load(args.model)
    p = model.params
    _emit(out, format_version=store.FORMAT_VERSION, sigma=p.sigma, eps_far=p.eps_far,
          eps_near=p.eps_near, max_sv=p.max_sv, dimension=model.dimension,
          sv_count=model.sv_count, objective=model.objective_value(),
          alpha_min=float(model.alpha.min()), alpha_max=float(model.alpha.max()))
    return EXIT_OK


def ring_scenario(n_normal=500, n_outlier=50, radius=6.0, seed=0):
    """Normals from a 2-D unit Gaussian, outliers at uniform angles on a ring.

    Returns ``(points, labels)`` in shuffled order.
    """
    rng = np.random.default_rng(seed)
    normals = rng.standard_normal((n_normal, 2))
    theta = rng.uniform(0.0, 2.0 * np.pi, n_outlier)
    ring = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    pts = np.vstack([normals, ring])
    labels = np.r_[np.zeros(n_normal, dtype=int), np.ones(n_outlier, dtype=int)]
    order = rng.permutation(len(pts))
    return pts[order], labels[order]


def cmd_synth(args, out):
    pts, labels = ring_scenario(args.normals, args.outliers, args.radius, args.seed)
    normal = pts[labels == 0]
    n_train = int(round(len(normal) * args.train_fraction))
    train = normal[:n_train]
    test_pts = np.vstack([normal[n_train:], pts[labels == 1]])
    test_lab = np.r_[np.zeros(len(normal) - n_train, dtype=int), np.ones(int(labels.sum()), dtype=int)]
    fmt = lambda row: [repr(float(x)) for x in row]  # noqa: E731
    write_csv(args.train_out, ["x0", "x1"], (fmt(r) for r in train))
    write_csv(args.test_out, ["x0", "x1", "label"],
              (fmt(r) + [str(l)] for r, l in zip(test_pts, test_lab)))
    _emit(out, train_rows=len(train), test_rows=len(test_pts), seed=args.seed)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser():
    parser = _Parser(prog="streamsvdd",
                     description="Incremental SVDD with the Gaussian kernel over CSV data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="fit a model from a CSV stream")
    p.add_argument("input")
    _add_training_flags(p)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score CSV rows against a model")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("--out", help="scores CSV to write (default: stdout)")
    p.add_argument("--labeled", action="store_true", help="input's last column is a label; ignore it")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="precision/recall/F1 on a labeled CSV")
    p.add_argument("model", help="model file, or training CSV with --train")
    p.add_argument("labeled_csv")
    p.add_argument("--train", action="store_true",
                   help="treat MODEL as a training CSV and fit first (reports train_seconds)")
    _add_training_flags(p, sigma_required=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", help="print model metadata")
    p.add_argument("model")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("synth", help="write the Gaussian-plus-ring train/test CSVs")
    p.add_argument("train_out")
    p.add_argument("test_out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normals", type=int, default=500)
    p.add_argument("--outliers", type=int, default=50)
    p.add_argument("--radius", type=float, default=6.0)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InvariantViolation as exc:
        print(f"streamsvdd: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (CliError, SvddError, OSError) as exc:
        print(f"streamsvdd: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
