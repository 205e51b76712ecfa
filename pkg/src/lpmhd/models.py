"""Hamiltonian models: Euler-Zeitlin, quantized MHD, Hazeltine and Kirchhoff.

Each model bundles its M-maps, Hamiltonian, right-hand side and the stepper
that preserves its Casimirs. States are tuples of arrays, in the order given
by ``model.fields``.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import SO3, SU, check_member, comm, hat, vee
from .errors import DomainError
from .integrators import (
    StageReport,
    hazeltine_midpoint_step,
    isospectral_midpoint_step,
    kernel_step,
    magnetic_midpoint_step,
    rk4_baseline_step,
)
from .kernels import MAX_DENSE_N, dense_linear_map
from .quantization import SphCoeffs, build_basis, project

# imaginary residue allowed in a trace that should be real, relative to scale
REAL_TOL = 1e-12
PRESET_TOL = 1e-12


def _real(z, scale, what):
    if abs(z.imag) > REAL_TOL * max(1.0, scale):
        raise DomainError(f"{what} has imaginary part {z.imag:.3e}")
    return float(z.real)


def mhd_M(W, Th, ctx):
    """(M1, M2) = (Delta_N^{-1} W, Delta_N Theta), both by the banded paths."""
    return ctx.tridiag.solve(W), ctx.tridiag.apply(Th)


def mhd_hamiltonian(W, Th, ctx):
    """H = 1/2 (tr(W^dagger M1) + tr(Theta^dagger M2))."""
    M1, M2 = mhd_M(W, Th, ctx)
    z = 0.5 * (np.vdot(W, M1) + np.vdot(Th, M2))
    return _real(z, np.linalg.norm(W) ** 2 + np.linalg.norm(Th) ** 2, "MHD Hamiltonian")


def hazeltine_M(W, Th, chi, alpha, ctx):
    """(M1, M2, M3) with M3 = M1 - alpha chi."""
    M1, M2 = mhd_M(W, Th, ctx)
    return M1, M2, M1 - alpha * chi


def hazeltine_hamiltonian(W, Th, chi, alpha, ctx):
    """H = 1/2 tr(W M1 + Theta M2 - alpha chi^2), without daggers."""
    M1, M2 = mhd_M(W, Th, ctx)
    z = 0.5 * (np.sum(W.T * M1) + np.sum(Th.T * M2) - alpha * np.sum(chi.T * chi))
    scale = sum(np.linalg.norm(x) ** 2 for x in (W, Th, chi))
    return _real(z, scale, "Hazeltine Hamiltonian")


class _Model:
    """Shared stepping logic; subclasses define M, vector_field, hamiltonian."""

    kernel = None
    n_inputs = 2

    def step(self, state, cfg):
        """Advance one step; returns (state, StageReport).

        ``cfg.baseline`` selects explicit RK4 (reported as zero iterations).
        Otherwise the compiled kernel runs when available and enabled, and
        the generic stepper from :mod:`lpmhd.integrators` in all other cases.
        """
        if cfg.baseline:
            return rk4_baseline_step(state, self.vector_field, cfg.h), StageReport(0, 0.0, True)
        K = self.dense_map() if cfg.accelerate else None
        if K is not None:
            out, report = kernel_step(self.kernel, state, K, cfg, self.algebra,
                                      getattr(self, "alpha", 0.0))
            if self.algebra == SO3:
                out = tuple(np.real(x) for x in out)
            return out, report
        return self.generic_step(state, cfg)

    def dense_map(self):
        if self.N > MAX_DENSE_N:
            return None
        if getattr(self, "_dense", None) is None:
            self._dense = dense_linear_map(self.M, self.N, self.n_inputs)
        return self._dense


class EulerModel(_Model):
    """Euler-Zeitlin: dW/dt = [W, Delta_N^{-1} W] on su(N)."""

    fields = ("W",)
    algebra = SU
    name = "euler"
    kernel = "isospectral"
    n_inputs = 1

    def __init__(self, ctx):
        self.ctx = ctx

    @property
    def N(self):
        return self.ctx.N

    def M(self, W):
        return self.ctx.tridiag.solve(W)

    def generic_step(self, state, cfg):
        W, report = isospectral_midpoint_step(state[0], self.M, cfg, self.algebra)
        return (W,), report

    def vector_field(self, state):
        (W,) = state
        return (comm(W, self.M(W)),)

    def hamiltonian(self, state):
        (W,) = state
        z = 0.5 * np.vdot(W, self.M(W))
        return _real(z, np.linalg.norm(W) ** 2, "Euler Hamiltonian")


class MhdModel(_Model):
    """Quantized MHD: dW/dt = [W, M1] + [Theta, M2], dTheta/dt = [Theta, M1]."""

    fields = ("W", "Theta")
    algebra = SU
    name = "mhd"
    kernel = "magnetic"

    def __init__(self, ctx):
        self.ctx = ctx

    @property
    def N(self):
        return self.ctx.N

    def M(self, W, Th):
        return mhd_M(W, Th, self.ctx)

    def generic_step(self, state, cfg):
        return magnetic_midpoint_step(state, self.M, cfg, self.algebra)

    def vector_field(self, state):
        W, Th = state
        M1, M2 = self.M(W, Th)
        return comm(W, M1) + comm(Th, M2), comm(Th, M1)

    def hamiltonian(self, state):
        return mhd_hamiltonian(*state, self.ctx)


class HazeltineModel(_Model):
    """Three-field Hazeltine model on (W, Theta, chi)."""

    fields = ("W", "Theta", "chi")
    algebra = SU
    name = "hazeltine"
    kernel = "hazeltine"

    def __init__(self, ctx, alpha):
        if not np.isfinite(alpha):
            raise DomainError("alpha must be finite")
        self.ctx = ctx
        self.alpha = float(alpha)

    @property
    def N(self):
        return self.ctx.N

    def M(self, W, Th):
        return mhd_M(W, Th, self.ctx)

    def generic_step(self, state, cfg):
        return hazeltine_midpoint_step(state, self.alpha, self.M, cfg, self.algebra)

    def vector_field(self, state):
        W, Th, chi = state
        M1, M2, M3 = hazeltine_M(W, Th, chi, self.alpha, self.ctx)
        TM2 = comm(Th, M2)
        return comm(W, M1) + TM2, comm(Th, M3), comm(chi, M3) + TM2

    def hamiltonian(self, state):
        return hazeltine_hamiltonian(*state, self.alpha, self.ctx)


@dataclass(frozen=True)
class KirchhoffParams:
    """Coefficients of the quadratic Kirchhoff Hamiltonian.

    H = 1/2 (sum a_k m_k^2 + 2 m . b p + p . c p) with b, c symmetric.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    preset_tag: str = "custom"

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(3)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if b.shape != (3, 3) or c.shape != (3, 3):
            raise DomainError("b and c must be 3x3")
        for name, mat in (("b", b), ("c", c)):
            if np.max(np.abs(mat - mat.T)) > PRESET_TOL * max(1.0, np.max(np.abs(mat))):
                raise DomainError(f"{name} must be symmetric")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        violation = preset_violation(self.preset_tag, a, b, c)
        if violation > PRESET_TOL:
            raise DomainError(f"parameters violate the {self.preset_tag} constraints "
                              f"by {violation:.3e}")

    @classmethod
    def diagonal(cls, a, b_diag, c_diag, preset_tag="custom"):
        return cls(np.asarray(a, float), np.diag(b_diag), np.diag(c_diag), preset_tag)


PRESETS = ("kirchhoff", "clebsch", "lsk", "custom")


def preset_violation(tag, a, b, c):
    """Largest violation of the integrability constraints for ``tag``."""
    if tag == "custom":
        return 0.0
    if tag not in PRESETS:
        raise DomainError(f"unknown Kirchhoff preset {tag!r}")
    off = max(np.max(np.abs(b - np.diag(np.diag(b)))), np.max(np.abs(c - np.diag(np.diag(c)))))
    b1, b2, b3 = np.diag(b)
    c1, c2, c3 = np.diag(c)
    a1, a2, a3 = a
    if tag == "kirchhoff":
        return max(off, abs(a1 - a2), abs(b1 - b2), abs(c1 - c2))
    if np.any(a == 0):
        raise DomainError(f"{tag} preset needs nonzero a_k")
    if tag == "clebsch":
        lin = (c1 - c2) / a3 + (c3 - c1) / a2 + (c2 - c3) / a1
        return max(off, abs(b1 - b2), abs(b2 - b3), abs(lin))
    lin = (b1 - b2) / a3 + (b3 - b1) / a2 + (b2 - b3) / a1
    q1 = c1 - (b2 - b3) ** 2 / a1
    q2 = c2 - (b3 - b1) ** 2 / a2
    q3 = c3 - (b1 - b2) ** 2 / a3
    return max(off, abs(lin), abs(q1 - q2), abs(q2 - q3))


def preset(tag, rng=None):
    """A parameter set satisfying the constraints of an integrable case.

    Without ``rng`` fixed reference values are returned; with a generator the
    free parameters are drawn at random and the constrained ones solved for.
    """
    if tag not in PRESETS:
        raise DomainError(f"unknown Kirchhoff preset {tag!r}")
    while True:
        if rng is None:
            free = np.array([1.0, 0.7, 0.5, 0.3, 0.2, 0.4, 0.6, 0.9, 0.8])
        else:
            free = rng.uniform(0.5, 1.5, size=9)
        a, b, c = free[:3].copy(), free[3:6].copy(), free[6:9].copy()
        # the solved-for entries divide by 1/a1 - 1/a2; keep that away from 0
        if rng is None or tag in ("kirchhoff", "custom") or abs(1 / a[0] - 1 / a[1]) > 0.2:
            break
    a1, a2, a3 = a
    if tag == "kirchhoff":
        a[1], b[1], c[1] = a[0], b[0], c[0]
    elif tag == "clebsch":
        b[:] = b[0]
        c1, c2 = c[0], c[1]
        c[2] = ((c2 - c1) / a3 + c1 / a2 - c2 / a1) / (1.0 / a2 - 1.0 / a1)
    elif tag == "lsk":
        b1, b2 = b[0], b[1]
        b[2] = ((b1 - b2) / a3 - b1 / a2 + b2 / a1) / (1.0 / a1 - 1.0 / a2)
        b3 = b[2]
        k = c[0] - (b2 - b3) ** 2 / a1
        c[1] = k + (b3 - b1) ** 2 / a2
        c[2] = k + (b1 - b2) ** 2 / a3
    return KirchhoffParams.diagonal(a, b, c, tag)


def kirchhoff_M(m_mat, p_mat, params):
    """hat(omega), hat(u) with omega = dH/dm and u = dH/dp."""
    m = vee(m_mat)
    p = vee(p_mat)
    omega = params.a * m + params.b @ p
    u = params.b @ m + params.c @ p
    return hat(omega), hat(u)


def kirchhoff_hamiltonian(m_mat, p_mat, params):
    m = vee(m_mat)
    p = vee(p_mat)
    return float(0.5 * (params.a @ (m * m) + 2.0 * m @ params.b @ p + p @ params.c @ p))


class KirchhoffModel(_Model):
    """Rigid body in ideal fluid as a Lie-Poisson flow on so(3) x so(3)*."""

    fields = ("W", "Theta")
    algebra = SO3
    name = "kirchhoff"
    kernel = "magnetic"

    def __init__(self, params):
        self.params = params

    N = 3

    def M(self, W, Th):
        return kirchhoff_M(W, Th, self.params)

    def generic_step(self, state, cfg):
        return magnetic_midpoint_step(state, self.M, cfg, self.algebra)

    def vector_field(self, state):
        W, Th = state
        M1, M2 = self.M(W, Th)
        return comm(W, M1) + comm(Th, M2), comm(Th, M1)

    def hamiltonian(self, state):
        return kirchhoff_hamiltonian(*state, self.params)


def random_coeffs(L_cut, gamma, rng):
    """Complex Gaussian omega^{lm} scaled by l^-gamma, reality rule applied."""
    out = SphCoeffs.zeros(L_cut)
    for l in range(1, L_cut + 1):
        s = float(l) ** -gamma
        out[l, 0] = s * rng.standard_normal()
        for m in range(1, l + 1):
            z = s * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0)
            out[l, m] = z
            out[l, -m] = (-1) ** m * np.conj(z)
    return out


def random_state(model, L_cut=None, gamma=2.0, seed=0, amplitude=1.0):
    """Deterministic random initial data for ``model``.

    Quantized models get one independent :func:`random_coeffs` draw per
    field, projected to su(N) and multiplied by ``amplitude``. Kirchhoff
    gets Gaussian m, p vectors (times ``amplitude``) as so(3) matrices.
    """
    rng = np.random.default_rng(seed)
    if isinstance(model, KirchhoffModel):
        return tuple(amplitude * hat(rng.standard_normal(3)) for _ in model.fields)
    N = model.ctx.N
    if L_cut is None:
        L_cut = N - 1
    if not 1 <= L_cut <= N - 1:
        raise DomainError(f"L_cut must lie in [1, {N - 1}], got {L_cut}")
    out = []
    for _ in model.fields:
        W = amplitude * project(random_coeffs(L_cut, gamma, rng), model.ctx)
        out.append(check_member(W, SU, name="random field"))
    return tuple(out)


def make_model(name, N=None, alpha=0.0, params=None):
    """Construct a model by its config name."""
    if name == "kirchhoff":
        return KirchhoffModel(params if params is not None else preset("kirchhoff"))
    ctx = build_basis(N)
    if name == "euler":
        return EulerModel(ctx)
    if name == "mhd":
        return MhdModel(ctx)
    if name == "hazeltine":
        return HazeltineModel(ctx, alpha)
    raise DomainError(f"unknown model {name!r}")
