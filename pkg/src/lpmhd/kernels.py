"""Compiled stage loops for models whose M-maps are linear in the state.

Every model here has M-maps that are linear in the fields, so they can be
stored as one dense matrix K acting on the stacked, flattened fields. For
small N this turns the Python-level overhead of the generic steppers into a
few compiled loops. The schemes are the same as in :mod:`lpmhd.integrators`
and are tested against them step by step.
"""

import numba as nb
import numpy as np

# beyond this the dense K (size (k N^2)^2) stops paying off
MAX_DENSE_N = 16


def dense_linear_map(M_fn, n, n_fields):
    """Dense K with vec(M_fn(*fields)) = K @ concat(vec(fields)).

    Probes ``M_fn`` with unit matrices made traceless. This is exact on
    traceless input, which is all the steppers ever feed in.
    """
    size = n * n
    cols = []
    for f in range(n_fields):
        for j in range(size):
            E = np.zeros(size)
            E[j] = 1.0
            E = E.reshape(n, n)
            E[np.diag_indices(n)] -= np.trace(E) / n
            probe = [np.zeros((n, n)) for _ in range(n_fields)]
            probe[f] = E
            out = M_fn(*probe)
            cols.append(np.concatenate([np.asarray(m, dtype=complex).ravel() for m in out]))
    return np.ascontiguousarray(np.column_stack(cols))


@nb.njit(cache=True)
def _mm(A, B):
    n = A.shape[0]
    C = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for k in range(n):
            a = A[i, k]
            if a != 0:
                for j in range(n):
                    C[i, j] += a * B[k, j]
    return C


@nb.njit(cache=True)
def _apply(K, fields, n_out):
    n = fields.shape[1]
    x = fields.ravel()
    y = K @ x
    return y.reshape(n_out, n, n)


@nb.njit(cache=True)
def _sqnorm(A):
    s = 0.0
    for v in A.ravel():
        s += v.real * v.real + v.imag * v.imag
    return s


@nb.njit(cache=True)
def isospectral_step(V, K, h, tol, max_iters):
    """Isospectral midpoint on one field; K maps vec(V) to vec(M)."""
    a = 0.5 * h
    X = np.empty((1, V.shape[0], V.shape[0]), dtype=np.complex128)
    Vt = V.copy()
    res = np.inf
    it = 0
    converged = False
    for it in range(1, max_iters + 1):
        X[0] = Vt
        M = _apply(K, X, 1)[0]
        MV = _mm(M, Vt)
        new = V + a * (_mm(Vt, M) - MV) + a * a * _mm(MV, M)
        res = np.sqrt(_sqnorm(new - Vt)) / max(1.0, np.sqrt(_sqnorm(Vt)))
        Vt = new
        if res <= tol:
            converged = True
            break
        if not np.isfinite(res):
            break
    X[0] = Vt
    M = _apply(K, X, 1)[0]
    return V + h * (_mm(Vt, M) - _mm(M, Vt)), it, res, converged


@nb.njit(cache=True)
def magnetic_step(W, T, K, h, tol, max_iters):
    """Magnetic midpoint on (W, Theta); K maps [vec W, vec Theta] to [vec M1, vec M2]."""
    a = 0.5 * h
    aa = a * a
    n = W.shape[0]
    X = np.empty((2, n, n), dtype=np.complex128)
    Wt = W.copy()
    Tt = T.copy()
    res = np.inf
    it = 0
    converged = False
    for it in range(1, max_iters + 1):
        X[0] = Wt
        X[1] = Tt
        M = _apply(K, X, 2)
        M1 = M[0].copy()
        M2 = M[1].copy()
        P = _mm(Tt, M1)
        Q = _mm(M1, Tt)
        MW = _mm(M1, Wt)
        T_new = T + a * (P - Q) + aa * _mm(Q, M1)
        W_new = (W + a * (_mm(Wt, M1) - MW + _mm(Tt, M2) - _mm(M2, Tt))
                 + aa * (_mm(MW, M1) + _mm(M2, P) + _mm(Q, M2)))
        res = (np.sqrt(_sqnorm(W_new - Wt) + _sqnorm(T_new - Tt))
               / max(1.0, np.sqrt(_sqnorm(Wt) + _sqnorm(Tt))))
        Wt = W_new
        Tt = T_new
        if res <= tol:
            converged = True
            break
        if not np.isfinite(res):
            break
    X[0] = Wt
    X[1] = Tt
    M = _apply(K, X, 2)
    M1 = M[0].copy()
    M2 = M[1].copy()
    TM2 = _mm(Tt, M2) - _mm(M2, Tt)
    W_next = W + h * (_mm(Wt, M1) - _mm(M1, Wt) + TM2)
    T_next = T + h * (_mm(Tt, M1) - _mm(M1, Tt))
    return W_next, T_next, it, res, converged


@nb.njit(cache=True)
def hazeltine_step(W, T, C, K, alpha, h, tol, max_iters):
    """Hazeltine scheme on (W, Theta, chi); K maps [vec W, vec Theta] to [vec M1, vec M2]."""
    a = 0.5 * h
    aa = a * a
    n = W.shape[0]
    X = np.empty((2, n, n), dtype=np.complex128)
    Wt = W.copy()
    Tt = T.copy()
    Ct = C.copy()
    res = np.inf
    it = 0
    converged = False
    for it in range(1, max_iters + 1):
        X[0] = Wt
        X[1] = Tt
        M = _apply(K, X, 2)
        M1 = M[0].copy()
        M2 = M[1].copy()
        M3 = M1 - alpha * Ct
        C2 = _mm(Ct, Ct)
        cross = _mm(_mm(M2, Tt), M3) + _mm(_mm(M3, Tt), M2)
        TM2 = _mm(Tt, M2) - _mm(M2, Tt)
        T_new = T + a * (_mm(Tt, M3) - _mm(M3, Tt)) + aa * _mm(_mm(M3, Tt), M3)
        W_new = (W + a * (_mm(Wt, M1) - _mm(M1, Wt) + TM2)
                 + aa * (_mm(_mm(M1, Wt), M1) + cross - alpha * (_mm(M1, C2) + _mm(C2, M1))
                         + alpha * alpha * _mm(C2, Ct)))
        C_new = (C + a * (_mm(Ct, M3) - _mm(M3, Ct) + TM2)
                 + aa * (_mm(_mm(M3, Ct), M3) + cross))
        res = (np.sqrt(_sqnorm(W_new - Wt) + _sqnorm(T_new - Tt) + _sqnorm(C_new - Ct))
               / max(1.0, np.sqrt(_sqnorm(Wt) + _sqnorm(Tt) + _sqnorm(Ct))))
        Wt = W_new
        Tt = T_new
        Ct = C_new
        if res <= tol:
            converged = True
            break
        if not np.isfinite(res):
            break
    X[0] = Wt
    X[1] = Tt
    M = _apply(K, X, 2)
    M1 = M[0].copy()
    M2 = M[1].copy()
    M3 = M1 - alpha * Ct
    TM2 = _mm(Tt, M2) - _mm(M2, Tt)
    W_next = W + h * (_mm(Wt, M1) - _mm(M1, Wt) + TM2)
    T_next = T + h * (_mm(Tt, M3) - _mm(M3, Tt))
    C_next = C + h * (_mm(Ct, M3) - _mm(M3, Ct) + TM2)
    return W_next, T_next, C_next, it, res, converged
