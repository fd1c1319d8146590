"""Polynomials in two orthogonal projections.

Submodules:

``ncpoly``
    polynomials in two idempotent variables, parsing and abelianization
``psi``
    symbol functions and the universal norm bound ``M_f``
``pairs``
    principal-angle analysis of concrete projection pairs and norms
``spin``
    spectral projections of spin operators and closed-form entries
``randmat``
    Haar-random pairs, Monte Carlo norms and the limit law
``concentration``
    eigenvalue clustering for spin windows
"""

from .errors import ConsistencyError, DomainError, ParseError, ProjectionError, UnsupportedCaseError
from .ncpoly import NcPoly, abelianize, decompose, in_ker_T, parse
from .pairs import analyze, eval_matrix, norm_via_formula, op_norm
from .psi import m_f, max_on_interval, psi_eval

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "DomainError",
    "ParseError",
    "ProjectionError",
    "UnsupportedCaseError",
    "NcPoly",
    "parse",
    "decompose",
    "abelianize",
    "in_ker_T",
    "psi_eval",
    "max_on_interval",
    "m_f",
    "analyze",
    "eval_matrix",
    "op_norm",
    "norm_via_formula",
]
