"""The su(N) quantization of zero-mean functions on the sphere.

Row i of every matrix corresponds to the spin projection m1 = s - i with
s = (N-1)/2 (descending), column j to m2 = s - j. The basis matrix T_lm is
then supported on the single diagonal of offset m (entries (i, i+m)),

    (T_lm)_{m1 m2} = (-1)^(s - m1) sqrt(2l+1) (s l s; -m1 m m2),

where s - m1 = i is always an integer, also for even N.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..algebra import SU, check_member
from ..errors import DomainError
from .laplacian import TridiagonalLaplacian, commutator_laplacian, diagonal_indices
from .sphere import SphCoeffs
from .wigner import wigner3j_twice


def spin_generators(n):
    """Hermitian X1, X2, X3 of the spin-(n-1)/2 irrep, scaled so sum X_a^2 = I.

    [X_a, X_b] = 2i eps_abc X_c / sqrt(n^2 - 1); X3 is diagonal and
    descending, X1 +- i X2 are real ladder matrices.
    """
    s = (n - 1) / 2
    ms = s - np.arange(n)
    ladder = np.zeros((n, n))
    # raising operator: (S+)_{i-1, i} = sqrt(s(s+1) - m(m+1)) with m = ms[i]
    ladder[np.arange(n - 1), np.arange(1, n)] = np.sqrt(s * (s + 1) - ms[1:] * (ms[1:] + 1))
    scale = 2.0 / np.sqrt(n * n - 1)
    X1 = scale * 0.5 * (ladder + ladder.T) + 0j
    X2 = scale * (ladder - ladder.T) / 2j
    X3 = scale * np.diag(ms) + 0j
    return X1, X2, X3


@dataclass(frozen=True, eq=False)
class QuantizationContext:
    """Everything precomputed for one matrix size N. Immutable; share freely.

    ``diag_basis[m]`` is a real array with N-|m| rows whose column
    l - max(|m|, 1) holds the nonzero diagonal of T_lm.
    """

    N: int
    diag_basis: dict
    generators: tuple
    lap_eigs: np.ndarray
    tridiag: TridiagonalLaplacian
    diag_index: dict

    def basis(self, l, m):
        """Dense T_lm."""
        if not (1 <= l <= self.N - 1 and abs(m) <= l):
            raise DomainError(f"no basis element for (l, m) = ({l}, {m}) at N = {self.N}")
        out = np.zeros(self.N * self.N)
        out[self.diag_index[m]] = self.diag_basis[m][:, l - max(abs(m), 1)]
        return out.reshape(self.N, self.N)

    def labels(self):
        return [(l, m) for l in range(1, self.N) for m in range(-l, l + 1)]


def _diagonal_of_T(n, l, m):
    """Nonzero diagonal of T_lm for m >= 0, straight from the 3j formula."""
    tl = 2 * l
    tm = 2 * m
    out = np.empty(n - m)
    for i in range(n - m):
        tm1 = (n - 1) - 2 * i
        tm2 = tm1 - tm
        phase = -1.0 if i % 2 else 1.0
        out[i] = phase * np.sqrt(2 * l + 1) * wigner3j_twice(n - 1, tl, n - 1, -tm1, tm, tm2)
    return out


@lru_cache(maxsize=8)
def build_basis(N):
    """Precompute basis, generators and the Laplacian factorisation for N.

    Only m >= 0 diagonals are evaluated from 3j symbols; the m < 0 ones
    follow from T_{l,-m} = (-1)^m T_lm^T.
    """
    N = int(N)
    if N < 2:
        raise DomainError("N must be at least 2")
    diag_basis = {}
    for m in range(N):
        cols = [_diagonal_of_T(N, l, m) for l in range(max(m, 1), N)]
        diag_basis[m] = np.column_stack(cols) if cols else np.zeros((N, 0))
        if m:
            diag_basis[-m] = (-1.0) ** m * diag_basis[m]
    # l = 0 is not part of su(N); the m = 0 block is N x (N-1)
    generators = spin_generators(N)
    tri = TridiagonalLaplacian.from_operator(N, lambda A: commutator_laplacian(A, generators))
    return QuantizationContext(
        N=N,
        diag_basis=diag_basis,
        generators=generators,
        lap_eigs=-np.array([l * (l + 1.0) for l in range(N)]),
        tridiag=tri,
        diag_index={k: diagonal_indices(N, k) for k in range(-(N - 1), N)},
    )


def project(coeffs, ctx):
    """p_N: sum_{l,m} i omega^{lm} T_lm, an element of su(N)."""
    if coeffs.L_max > ctx.N - 1:
        raise DomainError(f"L_max = {coeffs.L_max} exceeds N - 1 = {ctx.N - 1}")
    coeffs.check_reality()
    N, L = ctx.N, coeffs.L_max
    out = np.zeros(N * N, dtype=complex)
    for m in range(-L, L + 1):
        lo = max(abs(m), 1)
        if lo > L:
            continue
        B = ctx.diag_basis[m][:, : L - lo + 1]
        out[ctx.diag_index[m]] = 1j * (B @ coeffs.data[lo: L + 1, L + m])
    return out.reshape(N, N)


def to_coeffs(W, ctx, check=True):
    """Inverse of :func:`project`: omega^{lm} = <i T_lm, W>."""
    N = ctx.N
    if check:
        check_member(W, SU, name="W")
    if W.shape != (N, N):
        raise DomainError(f"expected a {N}x{N} matrix, got {W.shape}")
    out = SphCoeffs.zeros(N - 1)
    flat = W.ravel()
    L = N - 1
    for m in range(-L, L + 1):
        lo = max(abs(m), 1)
        B = ctx.diag_basis[m]
        out.data[lo: L + 1, L + m] = -1j * (B.T @ flat[ctx.diag_index[m]])
    return out


def laplacian_apply(W, ctx):
    """Delta_N W by the nested-commutator formula."""
    return commutator_laplacian(np.asarray(W), ctx.generators)


def laplacian_solve(W, ctx, method="fast"):
    """Delta_N^{-1} W for W in su(N).

    ``method="fast"`` runs the banded per-diagonal solver (O(N^2));
    ``method="reference"`` divides spectral coefficients by -l(l+1).
    """
    W = np.asarray(W)
    scale = max(np.linalg.norm(W), 1.0)
    if abs(np.trace(W)) > 1e-12 * scale:
        raise DomainError("Delta_N is only invertible on traceless matrices")
    if method == "fast":
        return ctx.tridiag.solve(W)
    if method == "reference":
        c = to_coeffs(W, ctx, check=False)
        inv = np.zeros(ctx.N)
        inv[1:] = 1.0 / ctx.lap_eigs[1:]
        return project(c.scaled_by_degree(inv), ctx)
    raise DomainError(f"unknown solve method {method!r}")
