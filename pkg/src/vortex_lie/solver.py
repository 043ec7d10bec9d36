"""Time integration of x_t = (x_xi x x_xixi)/|x_xi|^3 + F(x, t) on the torus.

Two integrators are provided:

``exp_euler_regularized``
    the fourth-order regularized problem
    x_t = -eps x_xixixixi + (x_xi x x_xixi)/(|x_xi|^3 + eps^alpha) + F(x, t).
    The linear part is propagated exactly per Fourier mode and the nonlinear
    part G enters through a frozen-G Duhamel step; each time step is refined
    by a Picard iteration with G evaluated at the midpoint state.

``rk4_dealiased``
    classical RK4 for the unregularized equation (eps = 0) with spectral
    truncation of every stage evaluation.
"""
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import flows, spectral
from .errors import ConfigurationError, FilamentDegenerateError, PicardDivergedError
from .filament import DEGENERACY_THRESHOLD, Filament, binormal_velocity, check_speed

INTEGRATORS = ("exp_euler_regularized", "rk4_dealiased")
ALPHA_MAX = 3.0 / 8.0
# |z| bound on the imaginary axis inside the RK4 stability region (exact: 2*sqrt(2))
RK4_IMAG_LIMIT = 2.5


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 0.0
    alpha: float = 0.3
    dt: float = 1e-4
    horizon: float = 0.1
    grid: int = 128
    sobolev_order: int = 5
    integrator: Optional[str] = None
    picard_tol: float = 1e-10
    picard_max_iter: int = 25
    degeneracy_floor: Optional[float] = None

    def __post_init__(self):
        for name in ("epsilon", "alpha", "dt", "horizon", "picard_tol"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        if self.epsilon < 0:
            raise ConfigurationError("epsilon must be >= 0")
        if not 0 < self.alpha < ALPHA_MAX:
            raise ConfigurationError("alpha must lie in (0, 3/8)")
        if self.dt <= 0 or self.horizon <= 0:
            raise ConfigurationError("dt and horizon must be positive")
        spectral.check_grid_size(self.grid)
        if self.sobolev_order < 5:
            raise ConfigurationError("sobolev_order must be >= 5")
        if self.picard_tol <= 0 or self.picard_max_iter < 1:
            raise ConfigurationError("picard_tol must be positive and picard_max_iter >= 1")
        if self.degeneracy_floor is not None and not self.degeneracy_floor > 0:
            raise ConfigurationError("degeneracy_floor must be positive")
        integrator = self.integrator
        if integrator is None:
            integrator = "rk4_dealiased" if self.epsilon == 0 else "exp_euler_regularized"
            object.__setattr__(self, "integrator", integrator)
        if integrator not in INTEGRATORS:
            raise ConfigurationError(f"integrator must be one of {INTEGRATORS}, got {integrator!r}")
        if integrator == "rk4_dealiased" and self.epsilon != 0:
            raise ConfigurationError("rk4_dealiased integrates the eps = 0 problem only")
        if integrator == "exp_euler_regularized" and self.epsilon == 0:
            raise ConfigurationError("exp_euler_regularized requires epsilon > 0")

    def to_dict(self):
        return asdict(self)

    def replace(self, **changes):
        d = self.to_dict()
        if "epsilon" in changes and "integrator" not in changes:
            d["integrator"] = None
        d.update(changes)
        return SolverConfig(**d)

    @property
    def n_steps(self):
        return max(1, math.ceil(self.horizon / self.dt - 1e-9))


@dataclass(frozen=True)
class Termination:
    kind: str = "completed"  # completed | degenerated | picard_diverged
    time: Optional[float] = None
    xi: Optional[float] = None
    detail: str = ""

    def to_dict(self):
        return asdict(self)


@dataclass
class Trajectory:
    frames: list
    config: SolverConfig
    termination: Termination = field(default_factory=Termination)
    picard_iterations: list = field(default_factory=list)

    @property
    def times(self):
        return np.array([f.time for f in self.frames])

    @property
    def final(self):
        return self.frames[-1]

    @property
    def completed(self):
        return self.termination.kind == "completed"


@dataclass
class PicardResult:
    filament: Filament
    iterations: int
    defect: float
    defects: list


def rhs_regularized(f, flow, epsilon, alpha, t=None):
    """G = (x_xi x x_xixi)/(|x_xi|^3 + eps^alpha) + F(x, t) on the grid."""
    t = f.time if t is None else t
    floor = epsilon**alpha if epsilon > 0 else 0.0
    g = binormal_velocity(f.derivative(1), f.derivative(2), floor)
    return g + flows.evaluate(flow, f.positions, t)


def decay_rates(n, epsilon):
    """lambda_k = 16 pi^4 k^4 eps in FFT order."""
    return epsilon * (2 * np.pi * spectral.wavenumbers(n)) ** 4


def phi1(z):
    """(1 - exp(-z))/z with phi1(0) = 1."""
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = -np.expm1(-z[nz]) / z[nz]
    return out


def duhamel_step(x, g, epsilon, dt):
    """x_k <- exp(-lam_k dt) x_k + dt phi1(lam_k dt) G_k, for grid arrays x and G."""
    lam_dt = decay_rates(x.shape[0], epsilon) * dt
    prop = np.exp(-lam_dt)[:, None]
    weight = (dt * phi1(lam_dt))[:, None]
    xh = np.fft.fft(x, axis=0)
    gh = np.fft.fft(g, axis=0)
    return np.fft.ifft(prop * xh + weight * gh, axis=0).real


def _default_rhs(flow, cfg):
    def rhs(f, t):
        return rhs_regularized(f, flow, cfg.epsilon, cfg.alpha, t)

    return rhs


def step_exp_euler(f, flow, cfg, rhs=None, dt=None):
    """One exponential-Euler step with G frozen at the current state.

    ``rhs(filament, t)`` replaces the regularized nonlinear term when given
    (used for linear test problems).
    """
    if cfg.epsilon <= 0:
        raise ConfigurationError("the exponential integrator requires epsilon > 0")
    dt = cfg.dt if dt is None else dt
    check_speed(f.speed, DEGENERACY_THRESHOLD, time=f.time)
    rhs = rhs or _default_rhs(flow, cfg)
    g = rhs(f, f.time)
    return Filament(duhamel_step(f.positions, g, cfg.epsilon, dt), f.time + dt)


def picard_refine(f_prev, flow, cfg, rhs=None, dt=None):
    """Fixed-point iteration of the Duhamel map over one step.

    y -> Duhamel(x_n, G((x_n + y)/2, t + dt/2)), started from y = x_n.  The
    first application is the predictor; ``iterations`` counts the refinements
    after it, and ``defects`` holds the sup-norm change of each refinement.
    """
    if cfg.epsilon <= 0:
        raise ConfigurationError("Picard refinement requires epsilon > 0")
    dt = cfg.dt if dt is None else dt
    check_speed(f_prev.speed, DEGENERACY_THRESHOLD, time=f_prev.time)
    rhs = rhs or _default_rhs(flow, cfg)
    x0 = f_prev.positions
    t_mid = f_prev.time + 0.5 * dt

    def apply(y):
        mid = Filament(0.5 * (x0 + y), t_mid)
        return duhamel_step(x0, rhs(mid, t_mid), cfg.epsilon, dt)

    y = apply(x0)
    defects = []
    for it in range(1, cfg.picard_max_iter + 1):
        y_next = apply(y)
        defect = float(np.max(np.abs(y_next - y)))
        defects.append(defect)
        y = y_next
        if defect <= cfg.picard_tol:
            return PicardResult(Filament(y, f_prev.time + dt), it, defect, defects)
    raise PicardDivergedError(f_prev.time, cfg.picard_max_iter, defects[-1])


def rk4_cutoff(n, dt, min_speed):
    """Largest retained wavenumber: 2/3 rule, capped by RK4 stability.

    The linearized self-induced term rotates mode k at angular frequency
    (2 pi k)^2 / |x_xi|^2; modes whose frequency times dt leaves the RK4
    stability interval on the imaginary axis are removed as well.
    """
    k_stab = math.floor(math.sqrt(RK4_IMAG_LIMIT / dt) * min_speed / (2 * np.pi))
    return max(1, min(n // 3, k_stab))


def _rk4_stage(x, t, flow, cutoff, stage):
    n = x.shape[0]
    k = spectral.wavenumbers(n)
    xh = np.fft.fft(x, axis=0)
    keep = np.abs(k) <= cutoff
    ik = np.where(keep, 2j * np.pi * k, 0.0)[:, None]
    v = np.fft.ifft(ik * xh, axis=0).real
    a = np.fft.ifft(ik * ik * xh, axis=0).real
    speed = np.linalg.norm(v, axis=1)
    check_speed(speed, DEGENERACY_THRESHOLD, stage=stage, time=t)
    g = np.cross(v, a) / (speed**3)[:, None] + flows.evaluate(flow, x, t)
    gh = np.fft.fft(g, axis=0)
    return np.fft.ifft(gh * keep[:, None], axis=0).real


def step_rk4_dealiased(f, flow, cfg, dt=None):
    """Classical RK4 step for the eps = 0 equation with truncated stage evaluations."""
    if cfg.epsilon != 0:
        raise ConfigurationError("rk4_dealiased integrates the eps = 0 problem only")
    dt = cfg.dt if dt is None else dt
    x, t = f.positions, f.time
    cutoff = rk4_cutoff(f.n, dt, f.min_speed)
    k1 = _rk4_stage(x, t, flow, cutoff, 1)
    k2 = _rk4_stage(x + 0.5 * dt * k1, t + 0.5 * dt, flow, cutoff, 2)
    k3 = _rk4_stage(x + 0.5 * dt * k2, t + 0.5 * dt, flow, cutoff, 3)
    k4 = _rk4_stage(x + dt * k3, t + dt, flow, cutoff, 4)
    return Filament(x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4), t + dt)


def default_stride(cfg):
    return max(1, math.ceil(cfg.n_steps / 100))


def evolve(f0, flow, cfg, stride=None, store_all=False):
    """Integrate from f0 up to cfg.horizon.

    Frames are kept every ``stride`` steps (default: about 100 frames), plus
    the initial and final states.  Degeneracy or a failed Picard iteration
    ends the run early and is recorded in ``termination``.
    """
    if f0.n != cfg.grid:
        raise ConfigurationError(f"initial filament has N = {f0.n}, config expects grid = {cfg.grid}")
    check_speed(f0.speed, DEGENERACY_THRESHOLD, stage="initial", time=f0.time)
    floor = cfg.degeneracy_floor if cfg.degeneracy_floor is not None else 1e-3 * f0.min_speed
    if f0.min_speed < floor:
        raise FilamentDegenerateError(f0.min_speed, f0.argmin_speed_xi(), stage="initial", time=f0.time)
    stride = 1 if store_all else (stride or default_stride(cfg))
    n_steps = cfg.n_steps
    t0 = f0.time
    traj = Trajectory([f0], cfg)
    f = f0
    for n in range(1, n_steps + 1):
        t_next = t0 + min(n * cfg.dt, cfg.horizon)
        dt = t_next - f.time
        try:
            if cfg.integrator == "rk4_dealiased":
                f_new = step_rk4_dealiased(f, flow, cfg, dt=dt)
            else:
                res = picard_refine(f, flow, cfg, dt=dt)
                traj.picard_iterations.append(res.iterations)
                f_new = res.filament
        except FilamentDegenerateError as exc:
            traj.termination = Termination("degenerated", f.time, exc.location, str(exc))
            break
        except PicardDivergedError as exc:
            traj.termination = Termination("picard_diverged", f.time, None, str(exc))
            break
        f_new = Filament(f_new.positions, t_next)
        if f_new.min_speed < floor:
            traj.termination = Termination(
                "degenerated",
                t_next,
                f_new.argmin_speed_xi(),
                f"min|x_xi| = {f_new.min_speed:.3e} below floor {floor:.3e}",
            )
            break
        f = f_new
        if n % stride == 0 or n == n_steps:
            traj.frames.append(f)
    if traj.frames[-1] is not f:
        traj.frames.append(f)
    return traj
