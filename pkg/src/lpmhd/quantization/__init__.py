"""su(N) quantization of zero-mean functions on the sphere."""

from .basis import (
    QuantizationContext,
    build_basis,
    laplacian_apply,
    laplacian_solve,
    project,
    spin_generators,
    to_coeffs,
)
from .bracket import bracket_consistency_error, bracket_scale, hbar
from .sphere import SphCoeffs, evaluate_on_grid, poisson_bracket_coeffs
from .wigner import wigner3j

__all__ = [
    "QuantizationContext",
    "SphCoeffs",
    "bracket_consistency_error",
    "bracket_scale",
    "build_basis",
    "evaluate_on_grid",
    "hbar",
    "laplacian_apply",
    "laplacian_solve",
    "poisson_bracket_coeffs",
    "project",
    "spin_generators",
    "to_coeffs",
    "wigner3j",
]
