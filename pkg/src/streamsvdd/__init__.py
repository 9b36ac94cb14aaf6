"""Incremental support vector data description with the Gaussian kernel."""
from ._backend import get_backend
from .errors import (CorruptModelError, IllConditionedError, InputError, InvariantViolation,
                     ModelFormatError, OracleFailure, SvddError, UnsupportedVersionError)
from .inverse import expand_inverse, row_sums, shrink_inverse
from .kernel import gaussian_similarity, similarity_matrix, similarity_vector
from .model import (Action, HyperParams, Label, ScoreOutcome, SvddModel, UpdateOutcome,
                    fit_stream, initialize, objective_value)
from .oracle import OracleSolution, batch_solve, kkt_verify, projected_gradient
from .store import load, loads, dumps, save

BACKEND = get_backend().NAME

__all__ = [
    "Action", "BACKEND", "CorruptModelError", "HyperParams", "IllConditionedError",
    "InputError", "InvariantViolation", "Label", "ModelFormatError", "OracleFailure",
    "OracleSolution", "ScoreOutcome", "SvddError", "SvddModel", "UnsupportedVersionError",
    "UpdateOutcome", "batch_solve", "expand_inverse", "fit_stream", "gaussian_similarity",
    "get_backend", "initialize", "kkt_verify", "load", "loads", "dumps", "save", "objective_value", "projected_gradient",
    "row_sums", "shrink_inverse", "similarity_matrix", "similarity_vector",
]
