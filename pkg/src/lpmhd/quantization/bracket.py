"""Empirical check that the matrix commutator tracks the sphere Poisson bracket."""

import numpy as np

from .basis import build_basis, project
from .sphere import poisson_bracket_coeffs


def hbar(N):
    """Quantization parameter 2 / sqrt(N^2 - 1)."""
    return 2.0 / np.sqrt(N * N - 1.0)


def bracket_scale(N):
    """Factor c_N with p_N({f, g}) ~ c_N [p_N f, p_N g] as N grows.

    The basis T_lm is Frobenius-orthonormal, which is sqrt(4 pi / N) smaller
    than the Berezin-Toeplitz normalisation where [., .] / hbar is the
    quantized bracket. With the orientation df ^ dg = {f, g} sin(theta)
    dtheta ^ dphi and Condon-Shortley harmonics the limit also carries a
    minus sign.
    """
    return -np.sqrt(N / (4.0 * np.pi)) / hbar(N)


def bracket_consistency_error(f_coeffs, g_coeffs, N):
    """|| p_N({f, g}) - c_N [p_N f, p_N g] ||_F for bandlimited f, g.

    {f, g} is computed exactly in coefficient space (spectral derivatives,
    exact quadrature) and truncated at degree N - 1 before quantizing.
    """
    ctx = build_basis(N)
    b = poisson_bracket_coeffs(f_coeffs, g_coeffs)
    if b.L_max > N - 1:
        b = b.resized(N - 1)
    F = project(f_coeffs, ctx)
    G = project(g_coeffs, ctx)
    return float(np.linalg.norm(project(b, ctx) - bracket_scale(N) * (F @ G - G @ F)))
