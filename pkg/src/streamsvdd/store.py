"""Plain-text model files.

Layout, one key per line in this fixed order::

    format_version = 1
    sigma = <real>
    eps_far = <real>
    eps_near = <real>
    max_sv = <int>
    dimension = <int>
    k = <int>
    support_vectors =
    <dimension reals>        (k lines)
    alpha_raw = <k reals>
    threshold = <real>

Reals use 17 significant digits, so files round-trip exactly. The inverse
similarity matrix is not stored; :func:`load` rebuilds it and uses the
rebuild to check the file's integrity.
"""
import os

import numpy as np

from .errors import (CorruptModelError, IllConditionedError, ModelFormatError,
                     UnsupportedVersionError)
from .model import HyperParams, SvddModel
from .kernel import similarity_matrix

FORMAT_VERSION = 1
RESIDUAL_TOL = 1e-6
THRESHOLD_TOL = 1e-9


def _num(x):
    return format(float(x), ".17g")


def dumps(model):
    """Serialize ``model`` to the canonical text form."""
    p = model.params
    lines = [
        f"format_version = {FORMAT_VERSION}",
        f"sigma = {_num(p.sigma)}",
        f"eps_far = {_num(p.eps_far)}",
        f"eps_near = {_num(p.eps_near)}",
        f"max_sv = {int(p.max_sv)}",
        f"dimension = {model.dimension}",
        f"k = {model.sv_count}",
        "support_vectors =",
    ]
    lines.extend(" ".join(_num(x) for x in row) for row in model.support_vectors)
    lines.append("alpha_raw = " + " ".join(_num(a) for a in model.alpha_raw))
    lines.append(f"threshold = {_num(model.threshold)}")
    return "\n".join(lines) + "\n"


def save(model, destination):
    """Write ``model`` to ``destination`` (a path or a text file object)."""
    text = dumps(model)
    if hasattr(destination, "write"):
        destination.write(text)
        return text.encode("utf-8")
    try:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write model to {os.fspath(destination)}: {exc}") from exc
    return text.encode("utf-8")


class _Reader:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    def fail(self, msg):
        raise ModelFormatError(f"line {self.pos}: {msg}")

    def next_line(self):
        if self.pos >= len(self.lines):
            self.pos += 1
            self.fail("unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def field(self, key):
        line = self.next_line()
        name, sep, value = line.partition("=")
        if not sep or name.strip() != key:
            self.fail(f"expected '{key} = ...', got {line!r}")
        return value.strip()

    def reals(self, text, count):
        try:
            vals = [float(t) for t in text.split()]
        except ValueError:
            self.fail(f"non-numeric value in {text!r}")
        if len(vals) != count:
            self.fail(f"expected {count} numbers, got {len(vals)}")
        if not all(np.isfinite(vals)):
            self.fail("non-finite number")
        return vals

    def integer(self, key):
        value = self.field(key)
        try:
            return int(value)
        except ValueError:
            self.fail(f"{key} must be an integer, got {value!r}")

    def real(self, key):
        return self.reals(self.field(key), 1)[0]


def loads(text, backend=None):
    """Parse a model from text, rebuild its inverse and validate it."""
    r = _Reader(text)
    version = r.integer("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"model format version {version} is not supported "
                                      f"(expected {FORMAT_VERSION})")
    sigma = r.real("sigma")
    eps_far = r.real("eps_far")
    eps_near = r.real("eps_near")
    max_sv = r.integer("max_sv")
    dim = r.integer("dimension")
    k = r.integer("k")
    if dim < 1 or k < 1:
        r.fail("dimension and k must be positive")
    if r.field("support_vectors"):
        r.fail("support_vectors header takes no inline value")
    svs = np.array([r.reals(r.next_line(), dim) for _ in range(k)])
    alpha_raw = np.array(r.reals(r.field("alpha_raw"), k))
    threshold = r.real("threshold")
    while r.pos < len(r.lines):
        if r.next_line().strip():
            r.fail("trailing content after threshold")

    try:
        params = HyperParams(sigma=sigma, max_sv=max_sv, eps_far=eps_far, eps_near=eps_near)
    except ValueError as exc:
        raise CorruptModelError(f"invalid hyperparameters: {exc}") from exc
    if k > max_sv:
        raise CorruptModelError(f"{k} support vectors exceed max_sv={max_sv}")
    if not np.all(alpha_raw > 0):
        raise CorruptModelError("alpha_raw has nonpositive entries")
    if abs(1.0 / alpha_raw.sum() - threshold) > THRESHOLD_TOL:
        raise CorruptModelError(
            f"stored threshold {threshold!r} disagrees with 1/sum(alpha_raw) = {1.0 / alpha_raw.sum()!r}")
    residual = np.abs(similarity_matrix(svs, sigma) @ alpha_raw - 1.0).max()
    if residual > RESIDUAL_TOL:
        raise CorruptModelError(f"A alpha_raw = 1 residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}")
    try:
        return SvddModel.from_support_vectors(svs, params, alpha_raw=alpha_raw, backend=backend)
    except IllConditionedError as exc:
        raise CorruptModelError(str(exc)) from exc


def load(source, backend=None):
    """Load a model from a path or a text file object."""
    if hasattr(source, "read"):
        return loads(source.read(), backend=backend)
    with open(source, encoding="utf-8") as fh:
        return loads(fh.read(), backend=backend)
