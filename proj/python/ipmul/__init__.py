"""In-place accumulating multiplication kernels over prime fields."""

from ._core import (
    Field,
    NoSuchRootError,
    ShapeMismatchError,
    brdft,
    generate_program,
    generate_program_from,
    mat_mul_acc,
    poly_mul_acc,
    predicted_counts,
    program_counts,
    run_program,
)

__all__ = [
    "Field",
    "NoSuchRootError",
    "ShapeMismatchError",
    "brdft",
    "generate_program",
    "generate_program_from",
    "mat_mul_acc",
    "poly_mul_acc",
    "predicted_counts",
    "program_counts",
    "run_program",
]
