"""Exact and numerical calculus of Riesz distributions on differential forms."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (HypothesisViolation, NotDifferentialOperatorError, NumericError, PoleError,
                     RieszFormsError, UnsupportedError, UnsupportedPoleError, UsageError)
from .report import CheckResult
from .scalars import Affine, GammaExpr, LambdaRational
from .riesz import DiffOpLP, Multiplier, RieszParams, family, fourier, residue_at

__all__ = [
    "__version__",
    "Affine", "CheckResult", "DiffOpLP", "GammaExpr", "HypothesisViolation", "LambdaRational",
    "Multiplier", "NotDifferentialOperatorError", "NumericError", "PoleError", "RieszFormsError",
    "RieszParams", "UnsupportedError", "UnsupportedPoleError", "UsageError",
    "family", "fourier", "residue_at",
]
