"""Weighted composition operators on the Hardy space of the unit disk.

Thin wrapper over the compiled ``_hspec`` extension. Matrices come back as
complex NumPy arrays; experiment runs take a plain ``dict`` configuration.
"""

import json as _json

from ._hspec import (
    BranchError,
    ConfigError,
    DomainError,
    HoloMap,
    HspecError,
    NumericalError,
    PreconditionError,
    QuadratureError,
    __version__,
    build_wco,
    content_hash,
    corpus_names,
    count_zeros,
    eigenpairs,
    essential_norm,
    exterior_power,
    fock_norm,
    gram_matrix,
    singular_values,
    taylor_coeffs,
    validate,
)
from . import _hspec

EXIT_PASS = 0
EXIT_ASSERTION = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 64


def run_experiment(config):
    """Run one suite; returns ``(exit_code, log_text)``."""
    return _hspec.run_experiment(_json.dumps(config))


__all__ = [name for name in dir() if not name.startswith("_")]
