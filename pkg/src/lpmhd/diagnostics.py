"""Conserved quantities, their time series, and drift reports."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

DEFAULT_K = (2, 3, 4)
DEFAULT_D = (1, 2, 3)
JACOBI_MAX_SWEEPS = 60
REAL_TOL = 1e-12


class EigenConvergenceError(RuntimeError):
    pass


def hermitian_eigvalsh(H, tol=1e-15, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each pivot (p, q) first gets a diagonal phase change that makes H_pq real
    and is then annihilated by a real plane rotation. Sweeps continue until
    the off-diagonal Frobenius norm is below ``tol`` times the total norm.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[0]
    total = np.linalg.norm(A)
    if total == 0.0 or n == 1:
        return np.sort(np.real(np.diag(A)))
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * total:
            return np.sort(np.real(np.diag(A)))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                # diagonal similarity making the pivot real and positive
                ph = np.conj(apq) / mag
                A[:, q] *= ph
                A[q, :] *= np.conj(ph)
                app = A[p, p].real
                aqq = A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = A[p, :].copy()
                A[p, :] = c * rp - s * A[q, :]
                A[q, :] = s * rp + c * A[q, :]
                cp = A[:, p].copy()
                A[:, p] = c * cp - s * A[:, q]
                A[:, q] = s * cp + c * A[:, q]
                A[p, q] = A[q, p] = 0.0
    raise EigenConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def spectrum(A):
    """Ascending eigenvalues of the Hermitian matrix -iA for skew-Hermitian A."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("spectrum needs a square matrix")
    scale = max(np.linalg.norm(A), 1e-300)
    if np.linalg.norm(A + A.conj().T) > 1e-12 * scale:
        raise DomainError("spectrum needs a skew-Hermitian matrix")
    H = -1j * A
    return hermitian_eigvalsh(0.5 * (H + H.conj().T))


def _real_trace(z, scale, what):
    if abs(z.imag) > REAL_TOL * max(1.0, scale):
        raise DomainError(f"{what} has imaginary part {z.imag:.3e}")
    return float(z.real)


def trace_casimir(A, k):
    """tr((-iA)^k), the k-th power sum of the spectrum of -iA.

    For skew-Hermitian A the raw trace is tr(A^k) = i^k tr((-iA)^k), purely
    imaginary for odd k; the Hermitian form is real for every k.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    P = np.linalg.matrix_power(-1j * A, k)
    return _real_trace(np.trace(P), np.linalg.norm(A) ** k, f"tr((-iA)^{k})")


def cross_helicity(W, Th, d):
    """tr((-iW)(-i Theta)^d) = (-i)^(d+1) tr(W Theta^d), real for any d."""
    if d < 1:
        raise DomainError("d must be >= 1")
    z = np.sum((-1j * W).T * np.linalg.matrix_power(-1j * Th, d))
    return _real_trace(z, np.linalg.norm(W) * np.linalg.norm(Th) ** d, f"tr(W Theta^{d})")


def hazeltine_casimirs(W, Th, chi, degrees=DEFAULT_K, cross_degrees=DEFAULT_D):
    """tr((W - chi)^k), tr(Theta^k) and tr(chi Theta^d) keyed by name."""
    psi = W - chi
    out = {}
    for k in degrees:
        out[f"tr_psi^{k}"] = trace_casimir(psi, k)
    for k in degrees:
        out[f"tr_theta^{k}"] = trace_casimir(Th, k)
    for d in cross_degrees:
        out[f"tr_chi_theta^{d}"] = cross_helicity(chi, Th, d)
    return out


def casimirs(model_name, state, degrees=DEFAULT_K, cross_degrees=DEFAULT_D):
    """The trace Casimirs appropriate to a model, as an ordered dict."""
    if model_name == "euler":
        (W,) = state
        return {f"tr_w^{k}": trace_casimir(W, k) for k in degrees}
    if model_name in ("mhd", "kirchhoff"):
        W, Th = state
        out = {f"tr_theta^{k}": trace_casimir(Th, k) for k in degrees}
        out.update({f"tr_w_theta^{d}": cross_helicity(W, Th, d) for d in cross_degrees})
        return out
    if model_name == "hazeltine":
        return hazeltine_casimirs(*state, degrees, cross_degrees)
    raise DomainError(f"unknown model {model_name!r}")


def spectra(model_name, state):
    """Spectra that the model conserves, keyed by field name."""
    if model_name == "euler":
        return {"W": spectrum(state[0])}
    if model_name in ("mhd", "kirchhoff"):
        return {"Theta": spectrum(state[1])}
    if model_name == "hazeltine":
        W, Th, chi = state
        return {"Theta": spectrum(Th), "Psi": spectrum(W - chi)}
    raise DomainError(f"unknown model {model_name!r}")


@dataclass
class DiagnosticsRecord:
    """Sampled time series of one run. Append with :meth:`add`."""

    times: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    iterations: list = field(default_factory=list)

    def add(self, t, values, iterations=0):
        if self.times and not t > self.times[-1]:
            raise DomainError("sample times must be strictly increasing")
        if self.times and set(values) != set(self.series):
            raise DomainError("every sample must carry the same quantities")
        for name, v in values.items():
            self.series.setdefault(name, []).append(np.atleast_1d(np.asarray(v, dtype=float)))
        self.times.append(float(t))
        self.iterations.append(int(iterations))

    def __len__(self):
        return len(self.times)

    def array(self, name):
        """Samples of ``name`` as a (n_samples, width) array."""
        return np.array(self.series[name])


@dataclass(frozen=True)
class DriftReport:
    """Max |x(t) - x(0)| per quantity (inf if any sample is not finite),
    plus Hamiltonian slope and amplitude."""

    deviations: dict
    hamiltonian_slope: float = 0.0
    hamiltonian_amplitude: float = 0.0
    duration: float = 0.0

    def max_deviation(self, prefix=""):
        vals = [v for k, v in self.deviations.items() if k.startswith(prefix)]
        return max(vals) if vals else 0.0

    def hamiltonian_drift_ok(self, ratio=1e-3):
        """|slope| * T <= ratio * amplitude."""
        return abs(self.hamiltonian_slope) * self.duration <= ratio * self.hamiltonian_amplitude


def drift_report(record, hamiltonian_key="H"):
    """Summarise a record: deviations, least-squares slope and amplitude of H."""
    if len(record) == 0:
        raise DomainError("empty record")
    t = np.asarray(record.times)
    deviations = {}
    for name in record.series:
        x = record.array(name)
        # a blown-up run (non-finite samples) counts as unbounded drift
        dev = np.abs(x - x[0])
        deviations[name] = float(np.max(dev)) if np.all(np.isfinite(dev)) else np.inf
    slope = amplitude = 0.0
    if hamiltonian_key in record.series:
        H = record.array(hamiltonian_key)[:, 0]
        amplitude = float(H.max() - H.min())
        if len(t) > 1:
            tc = t - t.mean()
            slope = float(np.dot(tc, H - H.mean()) / np.dot(tc, tc))
    return DriftReport(deviations, slope, amplitude, float(t[-1] - t[0]))

