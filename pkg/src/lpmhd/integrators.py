"""Implicit-midpoint Lie-Poisson steppers for J-quadratic matrix algebras.

States are tuples of square arrays. Every structure-preserving stepper solves
its stage equations with :func:`fixed_point_solve` (plain Picard iteration)
and returns ``(new_state, StageReport)``. After each step the fields are
projected back onto the algebra to remove rounding drift.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import SU, membership_defect, project
from .errors import ConfigError, DomainError, StageConvergenceError

# a step whose raw output leaves the algebra by more than this is a bug
STEP_MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    h: float
    fp_tol: float = 1e-13
    fp_max_iters: int = 100
    baseline: bool = False
    # use the compiled dense-map kernels where a model offers them
    accelerate: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.h) and self.h > 0):
            raise ConfigError(f"h must be positive, got {self.h}", key="h")
        if not (self.fp_tol > 0):
            raise ConfigError(f"fp_tol must be positive, got {self.fp_tol}", key="fp_tol")
        if int(self.fp_max_iters) != self.fp_max_iters or self.fp_max_iters < 1:
            raise ConfigError("fp_max_iters must be an integer >= 1", key="fp_max_iters")


@dataclass(frozen=True)
class StageReport:
    iterations: int
    residual: float
    converged: bool


def _norm(state):
    return np.sqrt(sum(np.linalg.norm(x) ** 2 for x in state))


def _diff_norm(a, b):
    return np.sqrt(sum(np.linalg.norm(x - y) ** 2 for x, y in zip(a, b)))


def fixed_point_solve(stage_map, guess, cfg):
    """Picard iteration x <- stage_map(x) on a tuple of arrays.

    Stops as soon as |stage_map(x) - x| <= fp_tol * max(1, |x|) (Frobenius
    norm over the concatenated tuple) and returns the last image together
    with a :class:`StageReport`. Raises :class:`StageConvergenceError` after
    ``fp_max_iters`` maps without convergence.
    """
    x = tuple(guess)
    residual = np.inf
    for it in range(1, cfg.fp_max_iters + 1):
        y = tuple(stage_map(x))
        residual = _diff_norm(y, x) / max(1.0, _norm(x))
        x = y
        if residual <= cfg.fp_tol:
            return x, StageReport(it, float(residual), True)
        if not np.isfinite(residual):
            break
    report = StageReport(cfg.fp_max_iters if np.isfinite(residual) else it,
                         float(residual), False)
    raise StageConvergenceError(
        f"stage fixed point did not converge: residual {residual:.3e} after "
        f"{report.iterations} iterations (tol {cfg.fp_tol:.1e})", report)


def _finish(fields, algebra):
    out = []
    for name, f in fields:
        defect = membership_defect(f, algebra) if np.any(f) else 0.0
        if defect > STEP_MEMBERSHIP_TOL:
            raise DomainError(f"{name} left the algebra during the step "
                              f"(relative defect {defect:.2e})")
        out.append(project(f, algebra))
    return tuple(out)


def isospectral_midpoint_step(V, M_fn, cfg, algebra=SU):
    """One isospectral midpoint step for dV/dt = [V, M(V)].

    Solves V_n = (I + h/2 M) V~ (I - h/2 M) with M = M(V~) through the
    fixed point V~ = V_n + h/2 [V~, M] + h^2/4 M V~ M, then sets
    V_{n+1} = V_n + h [V~, M(V~)].
    """
    a = 0.5 * cfg.h

    def stage(x):
        (Vt,) = x
        M = M_fn(Vt)
        return (V + a * (Vt @ M - M @ Vt) + a * a * (M @ Vt @ M),)

    (Vt,), report = fixed_point_solve(stage, (V,), cfg)
    M = M_fn(Vt)
    (V_new,) = _finish([("V", V + cfg.h * (Vt @ M - M @ Vt))], algebra)
    return V_new, report


def magnetic_midpoint_step(state, M_fns, cfg, algebra=SU):
    """One magnetic midpoint step for (W, Theta).

    ``M_fns(W, Theta)`` must return (M1(W), M2(Theta)). The stage pair
    (W~, Theta~) solves

        Theta_n = Theta~ - h/2 [Theta~, M1] - h^2/4 M1 Theta~ M1
        W_n     = W~ - h/2 [W~, M1] - h/2 [Theta~, M2]
                  - h^2/4 (M1 W~ M1 + M2 Theta~ M1 + M1 Theta~ M2)

    and the update is Theta_{n+1} = Theta_n + h [Theta~, M1],
    W_{n+1} = W_n + h [W~, M1] + h [Theta~, M2].
    """
    W, Th = state
    a = 0.5 * cfg.h
    aa = a * a

    def stage(x):
        Wt, Tt = x
        M1, M2 = M_fns(Wt, Tt)
        M1T = M1 @ Tt
        TM1 = Tt @ M1
        Th_new = Th + a * (TM1 - M1T) + aa * (M1T @ M1)
        W_new = (W + a * (Wt @ M1 - M1 @ Wt) + a * (Tt @ M2 - M2 @ Tt)
                 + aa * (M1 @ Wt @ M1 + M2 @ TM1 + M1T @ M2))
        return W_new, Th_new

    (Wt, Tt), report = fixed_point_solve(stage, (W, Th), cfg)
    M1, M2 = M_fns(Wt, Tt)
    h = cfg.h
    Th_next = Th + h * (Tt @ M1 - M1 @ Tt)
    W_next = W + h * (Wt @ M1 - M1 @ Wt) + h * (Tt @ M2 - M2 @ Tt)
    return _finish([("W", W_next), ("Theta", Th_next)], algebra), report


def block_matrix(upper_left, lower_left):
    """[[A, 0], [B, A]], the semidirect-product embedding of (B, A)."""
    n = upper_left.shape[0]
    dtype = np.result_type(upper_left, lower_left)
    out = np.zeros((2 * n, 2 * n), dtype=dtype)
    out[:n, :n] = upper_left
    out[n:, n:] = upper_left
    out[n:, :n] = lower_left
    return out


def block_embedding_step(state, M_fns, cfg, algebra=SU):
    """Magnetic midpoint step computed through the 2N x 2N block embedding.

    V = [[Theta, 0], [W, Theta]] and M = [[M1, 0], [M2, M1]] turn the pair
    system into the single isospectral flow dV/dt = [V, M(V)]; one
    isospectral midpoint step on V is taken and (W, Theta) read back off
    the blocks. Used as an independent check of
    :func:`magnetic_midpoint_step`.
    """
    W, Th = state
    n = W.shape[0]

    def M_block(V):
        M1, M2 = M_fns(V[n:, :n], V[:n, :n])
        return block_matrix(M1, M2)

    V = block_matrix(Th, W)
    a = 0.5 * cfg.h

    def stage(x):
        (Vt,) = x
        M = M_block(Vt)
        return (V + a * (Vt @ M - M @ Vt) + a * a * (M @ Vt @ M),)

    (Vt,), report = fixed_point_solve(stage, (V,), cfg)
    M = M_block(Vt)
    V_next = V + cfg.h * (Vt @ M - M @ Vt)
    # the embedding is not itself in su(2N); check the blocks instead
    fields = [("W", V_next[n:, :n]), ("Theta", 0.5 * (V_next[:n, :n] + V_next[n:, n:]))]
    return _finish(fields, algebra), report


def hazeltine_midpoint_step(state, alpha, M_fns, cfg, algebra=SU):
    """One step of the three-field Hazeltine scheme for (W, Theta, chi).

    With M1 = M1(W~), M2 = M2(Theta~) from ``M_fns`` and M3 = M1 - alpha chi~,
    the stage triple solves

        Theta_n = Theta~ - h/2 [Theta~, M3] - h^2/4 M3 Theta~ M3
        W_n     = W~ - h/2 [W~, M1] - h/2 [Theta~, M2]
                  - h^2/4 (M1 W~ M1 + M2 Theta~ M3 + M3 Theta~ M2
                           - alpha M1 chi~^2 - alpha chi~^2 M1 + alpha^2 chi~^3)
        chi_n   = chi~ - h/2 [chi~, M3] - h/2 [Theta~, M2]
                  - h^2/4 (M3 chi~ M3 + M2 Theta~ M3 + M3 Theta~ M2)

    followed by Theta_{n+1} = Theta_n + h [Theta~, M3],
    W_{n+1} = W_n + h [W~, M1] + h [Theta~, M2] and
    chi_{n+1} = chi_n + h [chi~, M3] + h [Theta~, M2].
    """
    W, Th, chi = state
    a = 0.5 * cfg.h
    aa = a * a

    def stage(x):
        Wt, Tt, Ct = x
        M1, M2 = M_fns(Wt, Tt)
        M3 = M1 - alpha * Ct
        C2 = Ct @ Ct
        cross = M2 @ Tt @ M3 + M3 @ Tt @ M2
        Th_new = Th + a * (Tt @ M3 - M3 @ Tt) + aa * (M3 @ Tt @ M3)
        W_new = (W + a * (Wt @ M1 - M1 @ Wt) + a * (Tt @ M2 - M2 @ Tt)
                 + aa * (M1 @ Wt @ M1 + cross - alpha * (M1 @ C2 + C2 @ M1)
                         + alpha * alpha * (C2 @ Ct)))
        C_new = (chi + a * (Ct @ M3 - M3 @ Ct) + a * (Tt @ M2 - M2 @ Tt)
                 + aa * (M3 @ Ct @ M3 + cross))
        return W_new, Th_new, C_new

    (Wt, Tt, Ct), report = fixed_point_solve(stage, (W, Th, chi), cfg)
    M1, M2 = M_fns(Wt, Tt)
    M3 = M1 - alpha * Ct
    h = cfg.h
    TM2 = Tt @ M2 - M2 @ Tt
    Th_next = Th + h * (Tt @ M3 - M3 @ Tt)
    W_next = W + h * (Wt @ M1 - M1 @ Wt) + h * TM2
    C_next = chi + h * (Ct @ M3 - M3 @ Ct) + h * TM2
    fields = [("W", W_next), ("Theta", Th_next), ("chi", C_next)]
    return _finish(fields, algebra), report


def rk4_baseline_step(state, vector_field, h):
    """Classical explicit RK4 step. Not structure preserving; for contrast."""
    state = tuple(state)

    def axpy(k, c):
        return tuple(x + c * dx for x, dx in zip(state, k))

    k1 = tuple(vector_field(state))
    k2 = tuple(vector_field(axpy(k1, 0.5 * h)))
    k3 = tuple(vector_field(axpy(k2, 0.5 * h)))
    k4 = tuple(vector_field(axpy(k3, h)))
    return tuple(x + (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
                 for x, d1, d2, d3, d4 in zip(state, k1, k2, k3, k4))


def kernel_step(kind, state, K, cfg, algebra=SU, alpha=0.0):
    """Same as the generic steppers, run by :mod:`lpmhd.kernels`.

    ``kind`` is "isospectral", "magnetic" or "hazeltine"; ``K`` is the dense
    linear M-map from :func:`kernels.dense_linear_map`.
    """
    x = [np.ascontiguousarray(f, dtype=complex) for f in state]
    args = (cfg.h, cfg.fp_tol, cfg.fp_max_iters)
    if kind == "isospectral":
        V, it, res, ok = kernels.isospectral_step(x[0], K, *args)
        fields = [("V", V)]
    elif kind == "magnetic":
        W, T, it, res, ok = kernels.magnetic_step(x[0], x[1], K, *args)
        fields = [("W", W), ("Theta", T)]
    elif kind == "hazeltine":
        W, T, C, it, res, ok = kernels.hazeltine_step(x[0], x[1], x[2], K, float(alpha), *args)
        fields = [("W", W), ("Theta", T), ("chi", C)]
    else:
        raise ValueError(f"unknown kernel {kind!r}")
    report = StageReport(int(it), float(res), bool(ok))
    if not ok:
        raise StageConvergenceError(
            f"stage fixed point did not converge: residual {res:.3e} after "
            f"{it} iterations (tol {cfg.fp_tol:.1e})", report)
    return _finish(fields, algebra), report
