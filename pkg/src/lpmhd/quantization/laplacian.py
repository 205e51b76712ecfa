"""The quantized (Hoppe-Yau) Laplacian on su(N) and its inverse.

Delta_N is a nested-commutator operator built from the spin generators. It
maps every matrix diagonal into itself and acts on the k-th diagonal as a
real symmetric tridiagonal matrix, which gives an O(N^2) solver once all
diagonals are factorised together.
"""

import numpy as np
from scipy.linalg import lapack

from ..algebra import comm


def commutator_laplacian(W, generators):
    """Delta_N W through nested commutators; valid on all of gl(N).

    With Hermitian generators X_a normalised so that sum X_a^2 = I,

        Delta_N W = -((N^2 - 1)/4) ([X3,[X3,W]] + 1/2 [X+,[X-,W]] + 1/2 [X-,[X+,W]]),

    X+- = X1 +- i X2, whose eigenvalue on T_lm is exactly -l(l+1).
    """
    X1, X2, X3 = generators
    n = W.shape[0]
    Xp = X1 + 1j * X2
    Xm = X1 - 1j * X2
    nested = (comm(X3, comm(X3, W))
              + 0.5 * comm(Xp, comm(Xm, W))
              + 0.5 * comm(Xm, comm(Xp, W)))
    return -0.25 * (n * n - 1) * nested


def diagonal_indices(n, k):
    """Flat indices of the k-th diagonal of an n x n matrix (k > 0 above)."""
    p = np.arange(n - abs(k))
    if k >= 0:
        return p * (n + 1) + k
    return p * (n + 1) - k * n


class TridiagonalLaplacian:
    """Delta_N stored as one tridiagonal system per matrix diagonal.

    All 2N - 1 diagonals are laid end to end in a single vector of length
    N^2 - 1 (the main diagonal loses its last slot, see below) with zero
    coupling across segment boundaries, so one LAPACK gttrf factorisation
    and one gttrs call per right-hand side handle the whole matrix.

    The main-diagonal block has the constant vector (the identity matrix)
    as its kernel. Its range is the traceless vectors, so for a traceless
    right-hand side the system restricted to the first N - 1 unknowns with
    the last one grounded to zero is nonsingular; the solution is then
    shifted to zero trace.
    """

    def __init__(self, n, lower, main, upper):
        self.n = n
        # per-diagonal bands over the full length N^2 (main diagonal untruncated)
        self.lower = lower
        self.main = main
        self.upper = upper
        self._order = np.concatenate([diagonal_indices(n, k) for k in range(-(n - 1), n)])
        self._solve_order = np.delete(self._order, self._main_last())
        dl, d, du = self._bands(grounded=True)
        self._lu = lapack.dgttrf(dl, d, du)
        if self._lu[-1] != 0:
            raise np.linalg.LinAlgError("tridiagonal Laplacian factorisation failed")

    def _main_last(self):
        # position of entry (n-1, n-1) inside the concatenated ordering
        return sum(self.n - abs(k) for k in range(-(self.n - 1), 1)) - 1

    def _bands(self, grounded):
        dl, d, du = self.lower.copy(), self.main.copy(), self.upper.copy()
        if grounded:
            cut = self._main_last()
            d = np.delete(d, cut)
            # drop the couplings into and out of the removed slot
            dl = np.delete(dl, cut - 1)
            du = np.delete(du, cut - 1)
        return dl, d, du

    @classmethod
    def from_operator(cls, n, apply):
        """Probe a linear operator on gl(n) that preserves every diagonal.

        Three probes suffice: probe c has ones in all rows i = c (mod 3), and
        since the operator only couples an entry to its two neighbours along
        the same diagonal, each response entry comes from exactly one source.
        """
        order = np.concatenate([diagonal_indices(n, k) for k in range(-(n - 1), n)])
        rows = order // n
        size = n * n
        main = np.zeros(size)
        upper = np.zeros(size - 1)
        lower = np.zeros(size - 1)
        pos = np.empty(size, dtype=int)
        pos[order] = np.arange(size)
        responses = []
        for c in range(3):
            probe = np.zeros((n, n))
            probe[c::3, :] = 1.0
            responses.append(np.real(apply(probe)).ravel())
        for q in range(size):
            src = order[q]
            resp = responses[rows[q] % 3]
            main[q] = resp[src]
            # neighbours along the same diagonal are one row above / below
            if q + 1 < size and rows[q + 1] == rows[q] + 1 and order[q + 1] == src + n + 1:
                lower[q] = resp[order[q + 1]]
            if q > 0 and rows[q - 1] == rows[q] - 1 and order[q - 1] == src - n - 1:
                upper[q - 1] = resp[order[q - 1]]
        return cls(n, lower, main, upper)

    def apply(self, W):
        """Delta_N W by banded multiplication, O(N^2)."""
        v = W.ravel()[self._order]
        out = self.main * v
        out[:-1] += self.upper * v[1:]
        out[1:] += self.lower * v[:-1]
        res = np.empty(self.n * self.n, dtype=out.dtype)
        res[self._order] = out
        return res.reshape(self.n, self.n)

    def solve(self, W):
        """Pseudo-inverse of Delta_N applied to W, O(N^2).

        The identity spans the kernel of Delta_N, so the trace of W is
        dropped first and the result is traceless. Midpoint stage iterates
        are skew-Hermitian but not traceless, which is why this matters.
        """
        n = self.n
        W = np.array(W)
        W[np.diag_indices(n)] -= np.trace(W) / n
        b = W.ravel()[self._solve_order]
        if np.iscomplexobj(b):
            rhs = np.stack([b.real, b.imag], axis=1)
        else:
            rhs = b[:, None]
        dl, d, du, du2, ipiv, _ = self._lu
        x, info = lapack.dgttrs(dl, d, du, du2, ipiv, rhs)
        if info != 0:
            raise np.linalg.LinAlgError("tridiagonal Laplacian solve failed")
        sol = x[:, 0] + 1j * x[:, 1] if x.shape[1] == 2 else x[:, 0]
        res = np.zeros(n * n, dtype=sol.dtype)
        res[self._solve_order] = sol
        out = res.reshape(n, n)
        out[np.diag_indices(n)] -= np.trace(out) / n
        return out
