"""Exact field arithmetic and dense exact linear algebra."""

from .linalg import (
    Matrix,
    RationalSolver,
    in_span,
    kernel_basis,
    rank,
    rref,
    solve_linear,
    span_reduce,
)
from .scalars import (
    QQ,
    FunctionField,
    MultiPoly,
    PoleError,
    RatFunc,
    Rational,
    RationalField,
    field_for,
    poly_gcd,
    specialize,
    substitute,
)

__all__ = [
    "QQ",
    "FunctionField",
    "Matrix",
    "RationalSolver",
    "MultiPoly",
    "PoleError",
    "RatFunc",
    "Rational",
    "RationalField",
    "field_for",
    "in_span",
    "kernel_basis",
    "poly_gcd",
    "rank",
    "rref",
    "solve_linear",
    "span_reduce",
    "specialize",
    "substitute",
]
