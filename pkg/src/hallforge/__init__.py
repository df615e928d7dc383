"""hallforge: a desk-scale Hall algebra engine over small finite fields."""

from hallforge.qlinalg import (
    FiniteField,
    Matrix,
    QPolynomial,
    Subspace,
    enumerate_subspaces,
    gaussian_binomial,
    general_linear_group,
    general_linear_order,
    make_field,
    q_multinomial,
    quotient_map,
)

__all__ = [
    "FiniteField",
    "Matrix",
    "QPolynomial",
    "Subspace",
    "enumerate_subspaces",
    "gaussian_binomial",
    "general_linear_group",
    "general_linear_order",
    "make_field",
    "q_multinomial",
    "quotient_map",
]
