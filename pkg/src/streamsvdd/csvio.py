"""Minimal numeric CSV reading for the command-line tool."""
import numpy as np

from .errors import InputError


def _is_numeric_row(cells):
    try:
        [float(c) for c in cells]
    except ValueError:
        return False
    return True


def read_csv(path, labeled=False):
    """Read a purely numeric, comma-separated file.

    A first row that does not parse as numbers is taken as a header and
    skipped. Quoted cells are rejected. With ``labeled`` the last column
    must be 0 (normal) or 1 (outlier) and is returned separately.

    Returns:
        ``(features, labels)``; ``labels`` is None unless ``labeled``.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    rows = []
    width = None
    for lineno, line in enumerate(raw, start=1):
        if not line.strip():
            continue
        if '"' in line or "'" in line:
            raise InputError(f"{path}:{lineno}: quoted fields are not supported")
        cells = [c.strip() for c in line.split(",")]
        if width is None:
            width = len(cells)
            if not _is_numeric_row(cells):
                continue  # header
        if len(cells) != width:
            raise InputError(f"{path}:{lineno}: expected {width} columns, got {len(cells)}")
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise InputError(f"{path}:{lineno}: non-numeric cell") from None
        if not np.all(np.isfinite(vals)):
            raise InputError(f"{path}:{lineno}: non-finite value")
        rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no data rows")
    data = np.array(rows)
    if not labeled:
        return data, None
    if data.shape[1] < 2:
        raise InputError(f"{path}: labeled data needs at least one feature column plus a label")
    labels = data[:, -1]
    if not np.all((labels == 0) | (labels == 1)):
        raise InputError(f"{path}: last column must hold 0/1 labels")
    return data[:, :-1], labels.astype(int)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
