"""Symbolic verification of null-plane quantum Poincare algebras.

Typical use::

    from nullplane import load, build_R, RMatrixFactorization, check_qybe
    pres = load("poincare-1+1-quantum", order=4)
    R = build_R(RMatrixFactorization.of(pres), 4)
    print(check_qybe(R).line())
"""

__version__ = "0.1.0"

from .algebras import AlgebraPresentation, load, parse_presentation
from .exprtext import evaluate, parse, series_to_text, tensor_to_text
from .hopf import CheckReport
from .ncpoly import NCSeries, PBWAlgebra
from .rmatrix import RMatrixFactorization, build_R, check_intertwine, check_qybe, check_triangular
from .tensor import TensorElement

__all__ = [
    "AlgebraPresentation",
    "CheckReport",
    "NCSeries",
    "PBWAlgebra",
    "RMatrixFactorization",
    "TensorElement",
    "build_R",
    "check_intertwine",
    "check_qybe",
    "check_triangular",
    "evaluate",
    "load",
    "parse",
    "parse_presentation",
    "series_to_text",
    "tensor_to_text",
]
