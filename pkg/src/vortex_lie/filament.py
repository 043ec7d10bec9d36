"""Closed filaments on the torus and their pointwise differential geometry."""
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import spectral
from .errors import FilamentDegenerateError, HasimotoUndefinedError, InputError

DEGENERACY_THRESHOLD = 1e-6
CURVATURE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class Filament:
    """Samples x(xi_j), xi_j = j/N, of a closed curve at time ``time``."""

    positions: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        x = np.array(self.positions, dtype=float)
        if x.ndim != 2 or x.shape[1] != 3:
            raise InputError(f"positions must have shape (N, 3), got {x.shape}")
        spectral.check_grid_size(x.shape[0])
        if not np.all(np.isfinite(x)):
            raise InputError("positions contain non-finite values")
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "time", float(self.time))

    @property
    def n(self):
        return self.positions.shape[0]

    @cached_property
    def spectrum(self):
        return spectral.analyze(self.positions)

    def derivative(self, order):
        return spectral.derivative(self.positions, order)

    @cached_property
    def speed(self):
        return np.linalg.norm(self.derivative(1), axis=1)

    @property
    def min_speed(self):
        return float(self.speed.min())

    def argmin_speed_xi(self):
        return float(np.argmin(self.speed)) / self.n

    def translated(self, offset):
        return Filament(self.positions + np.asarray(offset, dtype=float), self.time)


@dataclass
class GeometryReport:
    min_speed: float
    arc_length: float
    curvature: np.ndarray
    torsion: np.ndarray
    arclength: np.ndarray
    hasimoto: Optional[np.ndarray] = None
    total_torsion: float = 0.0
    # phase mismatch of psi around the loop, i.e. total torsion modulo 2 pi
    periodicity_defect: float = 0.0


def binormal_velocity(v, a, floor=0.0):
    """(v x a) / (|v|^3 + floor), pointwise."""
    s = np.linalg.norm(v, axis=1)
    return np.cross(v, a) / (s**3 + floor)[:, None]


def check_speed(speed, threshold, stage=None, time=None):
    j = int(np.argmin(speed))
    if speed[j] < threshold:
        raise FilamentDegenerateError(speed[j], j / speed.shape[0], stage=stage, time=time)


def tangent_field(f):
    """x_xi on the grid."""
    return f.derivative(1)


def lie_velocity(f, threshold=DEGENERACY_THRESHOLD):
    """Self-induced velocity (x_xi x x_xixi) / |x_xi|^3."""
    v = f.derivative(1)
    check_speed(np.linalg.norm(v, axis=1), threshold, time=f.time)
    return binormal_velocity(v, f.derivative(2))


def _cumulative_trapezoid_periodic(values, h):
    """Running integral from the first node; returns (node values, total)."""
    increments = 0.5 * h * (values + np.roll(values, -1))
    run = np.concatenate(([0.0], np.cumsum(increments)))
    return run[:-1], float(run[-1])


def geometry_report(f, with_hasimoto=False):
    """Speed, curvature, torsion, arc length and optionally the Hasimoto field.

    The phase integral of torsion is taken in arclength: the grid is resampled
    to uniform s through a monotone cubic fit of xi -> s, torsion is
    Fourier-interpolated there, integrated by the trapezoidal rule and mapped
    back to the xi grid.
    """
    v = f.derivative(1)
    a = f.derivative(2)
    b = f.derivative(3)
    speed = np.linalg.norm(v, axis=1)
    check_speed(speed, DEGENERACY_THRESHOLD, time=f.time)
    vxa = np.cross(v, a)
    nvxa = np.linalg.norm(vxa, axis=1)
    curvature = nvxa / speed**3
    with np.errstate(divide="ignore", invalid="ignore"):
        torsion = np.einsum("ij,ij->i", vxa, b) / nvxa**2
    n = f.n
    s_nodes, length = _cumulative_trapezoid_periodic(speed, 1.0 / n)

    # theta = int_0^s tau ds, evaluated on uniform s and mapped back
    xi = spectral.grid(n)
    theta_nodes = np.zeros(n)
    total = 0.0
    if np.all(np.isfinite(torsion)):
        s_ext = np.append(s_nodes, length)
        xi_ext = np.append(xi, 1.0)
        xi_of_s = PchipInterpolator(s_ext, xi_ext)
        sigma = np.linspace(0.0, length, n + 1)
        tau_sigma = _fourier_eval(torsion, xi_of_s(sigma))
        theta_sigma = np.concatenate(
            ([0.0], np.cumsum(0.5 * (tau_sigma[1:] + tau_sigma[:-1]) * (length / n)))
        )
        total = float(theta_sigma[-1])
        theta_nodes = PchipInterpolator(sigma, theta_sigma)(s_nodes)

    report = GeometryReport(
        min_speed=float(speed.min()),
        arc_length=length,
        curvature=curvature,
        torsion=torsion,
        arclength=s_nodes,
        total_torsion=total,
        periodicity_defect=float(np.angle(np.exp(1j * total))),
    )
    if with_hasimoto:
        kmin = float(curvature.min())
        if kmin < CURVATURE_THRESHOLD:
            raise HasimotoUndefinedError(kmin, report)
        report.hasimoto = curvature * np.exp(1j * theta_nodes)
    return report


def _fourier_eval(samples, points):
    """Evaluate the trigonometric interpolant of grid samples at arbitrary points."""
    n = samples.shape[0]
    c = np.fft.fft(samples) / n
    c[n // 2] = 0.0
    k = spectral.wavenumbers(n)
    return np.real(np.exp(2j * np.pi * np.outer(points, k)) @ c)


def nls_residual_series(reports, times):
    """Per-frame L2 norm of i psi_t - psi_ss - |psi|^2 psi / 2 (nan at the end frames).

    psi_t uses central differences between frames, psi_ss is spectral in s
    with s = L xi (the frames must come from an arclength-preserving run).
    """
    times = np.asarray(times, dtype=float)
    if len(reports) != len(times):
        raise InputError("one time per report is required")
    if len(reports) < 3:
        raise InputError("at least 3 frames are needed")
    steps = np.diff(times)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.mean():
        raise InputError("frame times must be uniformly spaced")
    if any(r.hasimoto is None for r in reports):
        raise InputError("every report must carry the Hasimoto field")
    dt = steps.mean()
    out = np.full(len(reports), np.nan)
    for i in range(1, len(reports) - 1):
        psi = reports[i].hasimoto
        psi_t = (reports[i + 1].hasimoto - reports[i - 1].hasimoto) / (2 * dt)
        length = reports[i].arc_length
        psi_ss = (spectral.derivative(psi.real, 2) + 1j * spectral.derivative(psi.imag, 2)) / length**2
        res = 1j * psi_t - psi_ss - 0.5 * np.abs(psi) ** 2 * psi
        out[i] = np.sqrt(np.mean(np.abs(res) ** 2))
    return out


def nls_residual(reports, times):
    """Largest interior-frame NLS residual; a diagnostic, not a pass/fail test."""
    return float(np.nanmax(nls_residual_series(reports, times)))


def circle(radius, n, center=(0.0, 0.0, 0.0), time=0.0):
    xi = spectral.grid(n)
    th = 2 * np.pi * xi
    x = np.stack([radius * np.cos(th), radius * np.sin(th), np.zeros(n)], axis=1)
    return Filament(x + np.asarray(center, dtype=float), time)


def ellipse(a, b, n, time=0.0):
    th = 2 * np.pi * spectral.grid(n)
    return Filament(np.stack([a * np.cos(th), b * np.sin(th), np.zeros(n)], axis=1), time)


def perturbed_circle(radius, mode, amplitude, n, time=0.0):
    """Circle with a radial and out-of-plane ripple of the given mode number."""
    th = 2 * np.pi * spectral.grid(n)
    r = radius + amplitude * np.cos(mode * th)
    x = np.stack([r * np.cos(th), r * np.sin(th), amplitude * np.sin(mode * th)], axis=1)
    return Filament(x, time)
