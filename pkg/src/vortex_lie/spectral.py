"""Fourier calculus for periodic functions on T = R/Z.

Samples live on the uniform grid xi_j = j/N, j = 0..N-1 (no endpoint
duplication).  Coefficients are normalized so that ``coeff(k)`` approximates
the integral of u(xi) exp(-2 pi i k xi) over one period, i.e. the discrete
transform divided by N.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DataIntegrityError

# x_xi^(k+2) is needed by the energy functional for k up to 6
MAX_DERIVATIVE_ORDER = 8
HERMITIAN_TOL = 1e-10


def check_grid_size(n):
    n = int(n)
    if n < 4 or n % 2:
        raise ConfigurationError(f"grid size must be even and >= 4, got {n}")
    if n & (n - 1):
        raise ConfigurationError(f"grid size must be a power of two, got {n}")
    return n


def wavenumbers(n):
    """Integer wavenumbers in FFT order."""
    return np.fft.fftfreq(n, 1.0 / n)


def grid(n):
    return np.arange(n) / n


def _broadcast(mult, arr):
    return mult.reshape((-1,) + (1,) * (arr.ndim - 1))


def derivative(samples, order=1, cutoff=None):
    """p-th derivative of grid samples along axis 0.

    ``cutoff`` optionally zeroes every mode with |k| > cutoff before
    differentiating.  The Nyquist mode is always dropped.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    k = wavenumbers(n)
    c = np.fft.fft(samples, axis=0)
    mult = (2j * np.pi * k) ** order
    mult[n // 2] = 0.0
    if cutoff is not None:
        mult[np.abs(k) > cutoff] = 0.0
    return np.fft.ifft(c * _broadcast(mult, c), axis=0).real


def truncate(samples, cutoff):
    """Project grid samples onto the modes |k| <= cutoff."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    c = np.fft.fft(samples, axis=0)
    keep = (np.abs(wavenumbers(n)) <= cutoff).astype(float)
    return np.fft.ifft(c * _broadcast(keep, c), axis=0).real


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a real periodic (vector-valued) function.

    ``coeffs`` has shape (N,) or (N, d) in FFT order: row j holds wavenumber
    ``wavenumbers(N)[j]``.  The Nyquist row is shared by k = +-N/2.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        check_grid_size(c.shape[0])
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def grid_size(self):
        return self.coeffs.shape[0]

    @property
    def max_wavenumber(self):
        return self.grid_size // 2

    def coeff(self, k):
        k = int(k)
        if abs(k) > self.max_wavenumber:
            raise IndexError(f"wavenumber {k} outside |k| <= {self.max_wavenumber}")
        return self.coeffs[k % self.grid_size]

    def hermitian_defect(self):
        c = self.coeffs
        mirrored = np.roll(c[::-1], 1, axis=0)
        return float(np.max(np.abs(c - np.conj(mirrored)))) if c.size else 0.0

    def __add__(self, other):
        return SpectralField(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return SpectralField(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.coeffs * scalar)

    __rmul__ = __mul__


def analyze(samples):
    """Discrete Fourier coefficients of N uniformly spaced real samples."""
    samples = np.asarray(samples, dtype=float)
    check_grid_size(samples.shape[0])
    return SpectralField(np.fft.fft(samples, axis=0) / samples.shape[0])


def synthesize(field, n=None):
    """Evaluate the truncated Fourier series at xi_j = j/n.

    With ``n`` larger than the field's grid the series is zero-padded, so a
    band-limited function is resampled exactly; a smaller ``n`` truncates.
    """
    scale = max(1.0, float(np.max(np.abs(field.coeffs), initial=0.0)))
    defect = field.hermitian_defect()
    if defect > HERMITIAN_TOL * scale:
        raise DataIntegrityError(f"coefficients are not Hermitian-symmetric (defect {defect:.3e})")
    m = field.grid_size
    n = m if n is None else check_grid_size(n)
    c = field.coeffs
    if n != m:
        km = wavenumbers(m)
        out = np.zeros((n,) + c.shape[1:], dtype=complex)
        keep = np.abs(km) < min(m, n) // 2
        out[(km[keep].astype(int)) % n] = c[keep]
        c = out
    return np.fft.ifft(c * n, axis=0).real


def spectral_derivative(field, order):
    """Apply the multiplier (2 pi i k)^p; the Nyquist mode is zeroed."""
    order = int(order)
    if order < 1 or order > MAX_DERIVATIVE_ORDER:
        raise ConfigurationError(f"derivative order must lie in [1, {MAX_DERIVATIVE_ORDER}], got {order}")
    n = field.grid_size
    mult = (2j * np.pi * wavenumbers(n)) ** order
    mult[n // 2] = 0.0
    return SpectralField(field.coeffs * _broadcast(mult, field.coeffs))


def sobolev_norm(field, m):
    """H^m norm via Parseval: sqrt(sum_k sum_{j<=m} (2 pi k)^{2j} |c_k|^2)."""
    if m < 0:
        raise ConfigurationError(f"Sobolev order must be >= 0, got {m}")
    c = field.coeffs
    power = np.abs(c) ** 2
    if power.ndim > 1:
        power = power.reshape(power.shape[0], -1).sum(axis=1)
    w2 = (2 * np.pi * wavenumbers(field.grid_size)) ** 2
    weight = np.zeros_like(w2)
    for j in range(int(m) + 1):
        weight += w2**j
    return float(np.sqrt(np.sum(weight * power)))
