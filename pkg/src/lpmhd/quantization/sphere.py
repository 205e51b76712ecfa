"""Spherical-harmonic coefficients and evaluation on latitude/longitude grids.

Harmonics use the orthonormal convention

    Y_lm(theta, phi) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(cos theta) e^{i m phi}

with the Condon-Shortley phase inside P_l^m, so Y_{l,-m} = (-1)^m conj(Y_lm).
"""

import numpy as np

from ..errors import DomainError


class SphCoeffs:
    """Coefficients omega^{lm}, 1 <= l <= L_max, of a real zero-mean field.

    Stored densely as a complex array ``data[l, L_max + m]``; row 0 and the
    slots with |m| > l are kept at zero.
    """

    def __init__(self, data):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 2 * data.shape[0] - 1:
            raise DomainError(f"coefficient array must have shape (L+1, 2L+1), got {data.shape}")
        L = data.shape[0] - 1
        if np.any(data[0] != 0):
            raise DomainError("l = 0 coefficient must vanish (zero-mean field)")
        for l in range(1, L + 1):
            if np.any(data[l, : L - l] != 0) or np.any(data[l, L + l + 1:] != 0):
                raise DomainError(f"entries with |m| > l present at l = {l}")
        self.data = data

    @classmethod
    def zeros(cls, L_max):
        if L_max < 1:
            raise DomainError("L_max must be at least 1")
        return cls(np.zeros((L_max + 1, 2 * L_max + 1), dtype=complex))

    @classmethod
    def from_dict(cls, values, L_max=None):
        """Build from ``{(l, m): value}``; missing entries are zero."""
        if L_max is None:
            L_max = max(l for l, _ in values)
        out = cls.zeros(L_max)
        for (l, m), v in values.items():
            out[l, m] = v
        return out

    @property
    def L_max(self):
        return self.data.shape[0] - 1

    def _slot(self, key):
        l, m = key
        if not (1 <= l <= self.L_max and -l <= m <= l):
            raise DomainError(f"(l, m) = {key} outside 1 <= l <= {self.L_max}, |m| <= l")
        return l, self.L_max + m

    def __getitem__(self, key):
        return self.data[self._slot(key)]

    def __setitem__(self, key, value):
        self.data[self._slot(key)] = value

    def items(self):
        for l in range(1, self.L_max + 1):
            for m in range(-l, l + 1):
                yield (l, m), self[l, m]

    def copy(self):
        return SphCoeffs(self.data.copy())

    def scaled_by_degree(self, factors):
        """New coefficients with row l multiplied by ``factors[l]``."""
        factors = np.asarray(factors)
        return SphCoeffs(self.data * factors[: self.L_max + 1, None])

    def resized(self, L_max):
        """Zero-pad or truncate to a new maximal degree."""
        out = SphCoeffs.zeros(L_max)
        L = min(L_max, self.L_max)
        for l in range(1, L + 1):
            out.data[l, L_max - l: L_max + l + 1] = self.data[l, self.L_max - l: self.L_max + l + 1]
        return out

    def reality_defect(self):
        """max |omega^{l,-m} - (-1)^m conj(omega^{lm})| over stored entries."""
        worst = 0.0
        L = self.L_max
        for l in range(1, L + 1):
            m = np.arange(1, l + 1)
            pos = self.data[l, L + m]
            neg = self.data[l, L - m]
            worst = max(worst, np.max(np.abs(neg - (-1.0) ** m * np.conj(pos))))
            worst = max(worst, abs(self.data[l, L].imag))
        return worst

    def check_reality(self, tol=1e-12):
        scale = max(1.0, np.max(np.abs(self.data)))
        if self.reality_defect() > tol * scale:
            raise DomainError("coefficients violate the reality condition "
                              "omega^{l,-m} = (-1)^m conj(omega^{lm})")
        return self

    def __repr__(self):
        return f"SphCoeffs(L_max={self.L_max})"


def legendre_table(L_max, x):
    """Orthonormalised associated Legendre values for 0 <= m <= l <= L_max.

    Returns an array ``P[l, m, k]`` holding
    sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x_k), Condon-Shortley phase
    included. Uses the standard forward recurrence in l at fixed m.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros((L_max + 1, L_max + 1, x.size))
    pmm = np.full(x.size, np.sqrt(1.0 / (4.0 * np.pi)))
    for m in range(L_max + 1):
        if m > 0:
            pmm = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pmm
        P[m, m] = pmm
        if m + 1 <= L_max:
            P[m + 1, m] = np.sqrt(2.0 * m + 3.0) * x * pmm
        for l in range(m + 2, L_max + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[l, m] = a * (x * P[l - 1, m] - b * P[l - 2, m])
    return P


def legendre_dtheta(P, theta):
    """d/dtheta of the table from :func:`legendre_table` at angles ``theta``.

    Uses dP_lm/dtheta = m cot(theta) P_lm + sqrt((l-m)(l+m+1)) P_{l,m+1}.
    """
    L = P.shape[0] - 1
    cot = np.cos(theta) / np.sin(theta)
    dP = np.zeros_like(P)
    for l in range(L + 1):
        for m in range(l + 1):
            dP[l, m] = m * cot * P[l, m]
            if m < l:
                dP[l, m] += np.sqrt((l - m) * (l + m + 1.0)) * P[l, m + 1]
    return dP


def colatitudes(n_lat):
    """Cell-centred colatitudes in (0, pi)."""
    return (np.arange(n_lat) + 0.5) * np.pi / n_lat


def longitudes(n_lon):
    return 2.0 * np.pi * np.arange(n_lon) / n_lon


def _synthesis(coeffs, P, phi):
    """Sum_lm omega^{lm} P_l^{|m|} (with phase for m<0) e^{i m phi}.

    ``P`` is a legendre-like table at the desired colatitudes; returns the
    complex field of shape (n_theta, n_phi).
    """
    L = coeffs.L_max
    ms = np.arange(-L, L + 1)
    # F[m, k] = sum_l omega^{lm} Pbar_{l,|m|}(theta_k), with Y_{l,-m} = (-1)^m conj(Y_lm)
    F = np.zeros((2 * L + 1, P.shape[2]), dtype=complex)
    for i, m in enumerate(ms):
        am = abs(m)
        sign = (-1.0) ** am if m < 0 else 1.0
        ls = np.arange(max(am, 1), L + 1)
        if ls.size:
            F[i] = sign * (coeffs.data[ls, L + m] @ P[ls, am])
    return F.T @ np.exp(1j * np.outer(ms, phi))


def evaluate_on_grid(coeffs, n_lat, n_lon):
    """Real field Re sum omega^{lm} Y_lm on an n_lat x n_lon grid.

    Rows are the cell-centred colatitudes of :func:`colatitudes`, columns
    the longitudes 2 pi b / n_lon.
    """
    if n_lat < 2 or n_lon < 2:
        raise DomainError("grid needs n_lat, n_lon >= 2")
    theta = colatitudes(n_lat)
    P = legendre_table(coeffs.L_max, np.cos(theta))
    return _synthesis(coeffs, P, longitudes(n_lon)).real


def gauss_grid(n_theta, n_phi):
    """Gauss-Legendre colatitudes, their weights, and uniform longitudes."""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    return np.arccos(x), w, longitudes(n_phi)


def poisson_bracket_coeffs(f, g, L_out=None):
    """Coefficients of the sphere Poisson bracket {f, g}.

    {f, g} = (f_theta g_phi - f_phi g_theta) / sin(theta), i.e.
    df ^ dg = {f, g} sin(theta) dtheta ^ dphi. Derivatives are taken
    spectrally and the product is projected back by Gauss-Legendre x
    trapezoidal quadrature sized to integrate it exactly.
    """
    L_b = f.L_max + g.L_max - 1
    if L_out is None:
        L_out = max(L_b, 1)
    L = max(f.L_max, g.L_max, L_out)
    n_theta = (L_b + L_out) // 2 + 2
    n_phi = L_b + L_out + 2
    theta, w, phi = gauss_grid(n_theta, n_phi)

    P = legendre_table(L, np.cos(theta))
    dP = legendre_dtheta(P, theta)

    def fields(c):
        c = c.resized(L)
        ms = np.arange(-L, L + 1)
        val = _synthesis(c, P, phi)
        d_theta = _synthesis(c, dP, phi)
        d_phi = _synthesis(SphCoeffs(c.data * (1j * ms)[None, :]), P, phi)
        return val.real, d_theta.real, d_phi.real

    _, f_t, f_p = fields(f)
    _, g_t, g_p = fields(g)
    bracket = (f_t * g_p - f_p * g_t) / np.sin(theta)[:, None]

    out = SphCoeffs.zeros(L_out)
    # analysis: omega^{lm} = int bracket conj(Y_lm) dOmega
    fm = np.fft.fft(bracket, axis=1) * (2.0 * np.pi / n_phi)  # fm[:, k] ~ int e^{-i k phi}
    for l in range(1, L_out + 1):
        for m in range(0, l + 1):
            val = np.sum(w * P[l, m] * fm[:, m])
            out[l, m] = val
            if m:
                out[l, -m] = (-1.0) ** m * np.conj(val)
    return out
