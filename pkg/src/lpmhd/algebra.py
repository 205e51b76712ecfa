"""Matrix Lie algebra helpers for su(N) and so(3).

Algebra elements are plain numpy arrays; the algebra they belong to is
identified by a tag string, ``"su"`` or ``"so3"``. Both algebras are
J-quadratic with J = I, which is all the integrators rely on.
"""

import numpy as np

from .errors import DomainError

SU = "su"
SO3 = "so3"
ALGEBRAS = (SU, SO3)

# relative to the Frobenius norm of the input
MEMBERSHIP_TOL = 1e-12


def comm(a, b):
    """Matrix commutator [a, b] = ab - ba."""
    return a @ b - b @ a


def frobenius(a, b):
    """Frobenius pairing <a, b> = tr(a^dagger b)."""
    return np.vdot(a, b)


def membership_defect(a, tag=SU):
    """Size of the part of ``a`` lying outside the algebra, relative to |a|_F."""
    a = np.asarray(a)
    scale = max(np.linalg.norm(a), 1e-300)
    if tag == SU:
        skew = np.linalg.norm(a + a.conj().T)
        trace = abs(np.trace(a)) / np.sqrt(a.shape[0])
        return max(skew, trace) / scale
    if tag == SO3:
        if a.shape != (3, 3):
            return np.inf
        imag = np.linalg.norm(np.imag(a)) if np.iscomplexobj(a) else 0.0
        return max(np.linalg.norm(a + a.T), imag) / scale
    raise DomainError(f"unknown algebra tag {tag!r}")


def check_member(a, tag=SU, tol=MEMBERSHIP_TOL, name="argument"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be a square matrix, got shape {a.shape}")
    if np.linalg.norm(a) == 0.0:
        return a
    defect = membership_defect(a, tag)
    if defect > tol:
        raise DomainError(f"{name} is not in {tag} (relative defect {defect:.2e})")
    return a


def project(a, tag=SU):
    """Orthogonal projection onto the algebra.

    For su(N) this is (A - A^dagger)/2 with the trace removed; for so(3)
    the real skew-symmetric part.
    """
    if tag == SU:
        out = 0.5 * (a - a.conj().T)
        tr = np.trace(out) / out.shape[0]
        out[np.diag_indices_from(out)] -= tr
        return out
    if tag == SO3:
        a = np.real(a)
        return 0.5 * (a - a.T)
    raise DomainError(f"unknown algebra tag {tag!r}")


def hat(v):
    """R^3 -> so(3), so that hat(a) @ b == cross(a, b)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(a):
    """Inverse of :func:`hat`; reads the skew part only."""
    a = np.real(a)
    return 0.5 * np.array([a[2, 1] - a[1, 2], a[0, 2] - a[2, 0], a[1, 0] - a[0, 1]])


def random_su(n, rng, scale=1.0):
    """Gaussian element of su(n), mainly for tests and examples."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * project(z, SU)
