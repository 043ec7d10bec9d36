"""Exact solutions, random test curves, and the verification experiments."""
from dataclasses import asdict, dataclass, field

import numpy as np

from . import energy, flows, spectral, solver
from .errors import ConfigurationError
from .filament import Filament, circle, ellipse, perturbed_circle

UNIT_RADIUS = 1.0 / (2 * np.pi)  # circle of unit length, |x_xi| = 1


@dataclass
class ExperimentResult:
    name: str
    observations: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    verdict: bool = False
    artifacts: list = field(default_factory=list)
    notes: str = ""

    def to_dict(self):
        d = asdict(self)
        d["observations"] = {k: _jsonable(v) for k, v in self.observations.items()}
        return d

    def line(self):
        return f"[{'PASS' if self.verdict else 'FAIL'}] {self.name}: {self.notes}"


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def traveling_ring_oracle(radius, t, n):
    """Circle of radius R moving along its axis at speed 1/R (exact LIE solution)."""
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    return circle(radius, n, center=(0.0, 0.0, t / radius), time=t)


def sup_distance(a, b):
    return float(np.max(np.abs(a.positions - b.positions)))


def relative_length_drift(traj):
    lengths = np.array([fr.speed.mean() for fr in traj.frames])
    return float(np.max(np.abs(lengths - lengths[0])) / lengths[0])


def speed_drift(traj):
    s0 = traj.frames[0].speed
    return float(max(np.max(np.abs(fr.speed - s0)) for fr in traj.frames))


def w2inf_norm(fil):
    """max_{j <= 2} sup_xi |d^j x / dxi^j|."""
    parts = [fil.positions] + [fil.derivative(j) for j in (1, 2)]
    return float(max(np.linalg.norm(p, axis=1).max() for p in parts))


# -- random band-limited curves ---------------------------------------------


def sample_modes(coeffs, n, time=0.0):
    """Real curve sum_k c_k e^{2 pi i k xi} + c.c. for coeffs[k], k = 0..K (c_0 real)."""
    xi = spectral.grid(n)
    x = np.zeros((n, 3))
    x += coeffs[0].real
    for k in range(1, coeffs.shape[0]):
        phase = np.exp(2j * np.pi * k * xi)[:, None]
        x += 2.0 * (coeffs[k][None, :] * phase).real
    return Filament(x, time)


def random_modes(rng, max_mode=8, roughness=0.25):
    """Unit-length circle plus random modes decaying like (2 pi k)^-2."""
    c = np.zeros((max_mode + 1, 3), dtype=complex)
    c[1] = [UNIT_RADIUS / 2, -0.5j * UNIT_RADIUS, 0.0]
    for k in range(1, max_mode + 1):
        c[k] += roughness * (rng.normal(size=3) + 1j * rng.normal(size=3)) / (2 * np.pi * k) ** 2
    c[0] = rng.normal(size=3) * 0.05
    return c


def bandlimited_ensemble(count, seed=0, max_mode=8, min_speed=0.5, w2inf_max=10.0, check_n=64):
    """Rejection-sampled mode tables with min|v| >= min_speed and W^{2,inf} <= w2inf_max."""
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 100 * count:
            raise RuntimeError("rejection sampling failed to fill the ensemble")
        c = random_modes(rng, max_mode)
        fil = sample_modes(c, check_n)
        if fil.min_speed >= min_speed and w2inf_norm(fil) <= w2inf_max:
            out.append(c)
    return out


# -- experiments --------------------------------------------------------------


def run_traveling_ring(n=128, dt=1e-4, horizon=0.1, radius=UNIT_RADIUS, tol=1e-10, drift_tol=1e-8):
    cfg = solver.SolverConfig(dt=dt, horizon=horizon, grid=n)
    traj = solver.evolve(circle(radius, n), flows.zero_flow(), cfg, store_all=True)
    errors = [sup_distance(fr, traveling_ring_oracle(radius, fr.time, n)) for fr in traj.frames]
    err = max(errors)
    sdrift = speed_drift(traj)
    ldrift = relative_length_drift(traj)
    ok = traj.completed and err <= tol and sdrift <= drift_tol and ldrift <= drift_tol
    return ExperimentResult(
        "traveling_ring",
        {"sup_error": err, "speed_drift": sdrift, "length_drift": ldrift, "frames": len(traj.frames)},
        {"sup_error": tol, "speed_drift": drift_tol, "length_drift": drift_tol},
        ok,
        notes=f"sup error {err:.2e}, speed drift {sdrift:.2e}, length drift {ldrift:.2e}",
    )


def run_convergence_epsilon(base_cfg, eps_list, flow, f0):
    """Distance at the horizon between eps > 0 runs and the eps = 0 reference."""
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2:
        raise ConfigurationError("need at least two epsilon values")
    if any(e <= 0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigurationError("epsilon list must be positive and strictly decreasing")
    ref_cfg = base_cfg.replace(epsilon=0.0)
    ref = solver.evolve(f0, flow, ref_cfg)
    obs = {"epsilon": eps_list, "distance": [], "picard_max_iterations": []}
    if not ref.completed:
        return ExperimentResult("epsilon_limit", obs, verdict=False, notes=f"reference: {ref.termination}")
    for eps in eps_list:
        traj = solver.evolve(f0, flow, base_cfg.replace(epsilon=eps))
        if not traj.completed:
            return ExperimentResult("epsilon_limit", obs, verdict=False, notes=f"eps={eps}: {traj.termination}")
        obs["distance"].append(sup_distance(traj.final, ref.final))
        obs["picard_max_iterations"].append(max(traj.picard_iterations))
    d = obs["distance"]
    ok = all(b < a for a, b in zip(d, d[1:]))
    return ExperimentResult(
        "epsilon_limit",
        obs,
        {"monotone_decreasing": True},
        ok,
        notes="distances " + ", ".join(f"{x:.3e}" for x in d),
    )


def run_convergence_dt(base_cfg, dt_list, flow, f0, refine=16):
    """Self-convergence in dt against a run with dt_min / refine."""
    dt_list = sorted((float(x) for x in dt_list), reverse=True)
    ref = solver.evolve(f0, flow, base_cfg.replace(dt=dt_list[-1] / refine))
    errors = []
    for dt in dt_list:
        traj = solver.evolve(f0, flow, base_cfg.replace(dt=dt))
        errors.append(sup_distance(traj.final, ref.final))
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    orders = [float(np.log2(r)) for r in ratios]
    ok = ref.completed and all(r > 1.0 for r in ratios)
    return ExperimentResult(
        f"dt_convergence[{base_cfg.integrator}]",
        {"dt": dt_list, "error": errors, "ratio": ratios, "observed_order": orders},
        {"errors_decrease": True},
        ok,
        notes="observed orders " + ", ".join(f"{o:.2f}" for o in orders),
    )


def run_stretch_dichotomy(cfg, f0, omega=(0.0, 0.0, 4.0), strain=1.0, rot_tol=1e-6, strain_min=1e-4):
    """Arc-length drift under rigid rotation (skew Jacobian) versus planar strain."""
    rot = solver.evolve(f0, flows.rigid_rotation(omega), cfg)
    stretch = solver.evolve(f0, flows.planar_strain(strain), cfg)
    obs = {}
    ok = rot.completed and stretch.completed
    if ok:
        obs = {"rotation_drift": relative_length_drift(rot), "strain_drift": relative_length_drift(stretch)}
        ok = obs["rotation_drift"] <= rot_tol and obs["strain_drift"] >= strain_min
        note = f"rotation drift {obs['rotation_drift']:.2e}, strain drift {obs['strain_drift']:.2e}"
    else:
        note = f"early termination: {rot.termination} / {stretch.termination}"
    return ExperimentResult(
        "stretch_dichotomy", obs, {"rotation_drift_max": rot_tol, "strain_drift_min": strain_min}, ok, notes=note
    )


def default_perturbation(n):
    """Fixed smooth band-limited shape with unit H^3 norm."""
    th = 2 * np.pi * spectral.grid(n)
    p = np.stack([np.cos(2 * th), np.sin(3 * th), np.cos(th) + 0.5 * np.sin(2 * th)], axis=1)
    return p / spectral.sobolev_norm(spectral.analyze(p), 3)


def h3_difference(a, b):
    return spectral.sobolev_norm(spectral.analyze(a.positions - b.positions), 3)


def run_continuous_dependence(cfg, f0, delta, growth_bound=100.0, perturbation=None, flow=None):
    """H^3 distance between runs from f0 and f0 + delta * p, p of unit H^3 norm."""
    if not 0 <= delta <= 1e-2:
        raise ConfigurationError("delta must lie in [0, 1e-2]")
    flow = flow or flows.zero_flow()
    p = default_perturbation(f0.n) if perturbation is None else np.asarray(perturbation, dtype=float)
    base = solver.evolve(f0, flow, cfg, store_all=True)
    pert = solver.evolve(Filament(f0.positions + delta * p, f0.time), flow, cfg, store_all=True)
    if not (base.completed and pert.completed):
        return ExperimentResult(
            "continuous_dependence", verdict=False, notes=f"{base.termination} / {pert.termination}"
        )
    diffs = np.array([h3_difference(a, b) for a, b in zip(base.frames, pert.frames)])
    sup = float(diffs.max())
    growth = float(sup / diffs[0]) if diffs[0] > 0 else 0.0
    ok = sup <= growth_bound * delta
    return ExperimentResult(
        "continuous_dependence",
        {"delta": delta, "times": base.times, "h3_difference": diffs, "sup": sup, "growth_factor": growth},
        {"sup_over_delta_max": growth_bound},
        ok,
        notes=f"delta={delta:g}: sup H3 diff {sup:.3e} ({sup / delta if delta else 0:.2f} delta)",
    )


def rotating_ring_exact(radius, omega_z, t, n):
    """Circle spun about its own axis at rate omega_z while translating at 1/R."""
    th = 2 * np.pi * spectral.grid(n) + omega_z * t
    x = np.stack([radius * np.cos(th), radius * np.sin(th), np.full(n, t / radius)], axis=1)
    return Filament(x, t)


def run_rk4_order(dts=(4e-4, 2e-4, 1e-4), horizon=0.1, n=32, omega_z=200.0, band=(12.0, 20.0)):
    """Global RK4 error on the ring spinning in a rigid rotation about its axis."""
    flow = flows.rigid_rotation((0.0, 0.0, omega_z))
    errors = []
    for dt in dts:
        cfg = solver.SolverConfig(dt=dt, horizon=horizon, grid=n)
        traj = solver.evolve(circle(UNIT_RADIUS, n), flow, cfg)
        errors.append(sup_distance(traj.final, rotating_ring_exact(UNIT_RADIUS, omega_z, horizon, n)))
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    ok = all(band[0] <= r <= band[1] for r in ratios)
    return ExperimentResult(
        "rk4_order",
        {"dt": list(dts), "error": errors, "ratio": ratios},
        {"ratio_band": list(band)},
        ok,
        notes="ratios " + ", ".join(f"{r:.2f}" for r in ratios),
    )


def run_mode_decay(epsilon=1e-3, dt=1e-3, mode=2, steps=10, n=32, tol=1e-12):
    """Frozen-G linear problem (G = 0): each step multiplies mode k by exp(-16 pi^4 k^4 eps dt)."""
    cfg = solver.SolverConfig(epsilon=epsilon, dt=dt, grid=n, horizon=steps * dt)
    th = 2 * np.pi * mode * spectral.grid(n)
    fil = Filament(np.stack([0.3 * np.cos(th), 0.3 * np.sin(th), 0.1 * np.cos(th)], axis=1))

    def zero_rhs(f, t):
        return np.zeros_like(f.positions)

    expected = np.exp(-16 * np.pi**4 * mode**4 * epsilon * dt)
    worst = 0.0
    for _ in range(steps):
        new = solver.step_exp_euler(fil, flows.zero_flow(), cfg, rhs=zero_rhs)
        before = fil.spectrum.coeff(mode)
        after = new.spectrum.coeff(mode)
        big = np.abs(before) > 1e-3
        worst = max(worst, float(np.max(np.abs(after[big] / before[big] - expected) / expected)))
        fil = new
    return ExperimentResult(
        "mode_decay",
        {"expected_factor": float(expected), "max_relative_error": worst},
        {"relative_error": tol},
        worst <= tol,
        notes=f"per-step factor {expected:.6f}, max relative error {worst:.2e}",
    )


def run_picard_contraction(epsilon=1e-4, dt=1e-4, n=128, steps=10, tol=1e-10, max_iter=25):
    """Per-step Picard defects on the unit circle: strictly decreasing, below tol."""
    cfg = solver.SolverConfig(epsilon=epsilon, dt=dt, grid=n, horizon=steps * dt, picard_tol=tol,
                              picard_max_iter=max_iter)
    fil = circle(UNIT_RADIUS, n)
    sequences = []
    ok = True
    for _ in range(steps):
        res = solver.picard_refine(fil, flows.zero_flow(), cfg)
        sequences.append(res.defects)
        d = res.defects
        ok &= res.defect <= tol and res.iterations <= max_iter and all(b < a for a, b in zip(d, d[1:]))
        fil = res.filament
    iters = [len(s) for s in sequences]
    return ExperimentResult(
        "picard_contraction",
        {"defects": sequences, "iterations": iters},
        {"final_defect": tol, "max_iterations": max_iter},
        bool(ok),
        notes=f"iterations per step {min(iters)}..{max(iters)}, last defects {sequences[-1]}",
    )


def run_energy_identities(count=100, n=128, orders=(3, 4, 5), seed=0, tols=(1e-12, 1e-10, 1e-10)):
    """Decomposition, Lagrange identity and gauge-ODE residual over a random ensemble."""
    ens = bandlimited_ensemble(count, seed=seed)
    dec = lag = gauge = 0.0
    for c in ens:
        fil = sample_modes(c, n)
        v = fil.derivative(1)
        for k in orders:
            vk = fil.derivative(k + 1)
            par, orth = energy.decompose(v, vk)
            scale = np.max(np.linalg.norm(vk, axis=1))
            dec = max(dec, float(np.max(np.abs(par + orth - vk))) / scale)
            h, z = energy.compute_hk_zk(fil, k)
            lhs = np.sum(v**2, axis=1) * np.sum(vk**2, axis=1)
            lag = max(lag, float(np.max(np.abs(lhs - h**2 - np.sum(z**2, axis=1)) / np.max(lhs))))
            gauge = max(gauge, float(np.max(np.abs(energy.gauge_residual(fil, k)))))
    ok = dec <= tols[0] and lag <= tols[1] and gauge <= tols[2]
    return ExperimentResult(
        "energy_identities",
        {"decomposition": dec, "lagrange": lag, "gauge_residual": gauge, "ensemble": count},
        {"decomposition": tols[0], "lagrange": tols[1], "gauge_residual": tols[2]},
        ok,
        notes=f"decomposition {dec:.2e}, Lagrange {lag:.2e}, gauge {gauge:.2e}",
    )


def _ratio_interval(ens, n, k, variant):
    r = np.array([energy.modified_energy(sample_modes(c, n), k, variant).ratio for c in ens])
    return float(r.min()), float(r.max())


def run_norm_equivalence(count=100, n=64, k=3, seed=0, c_max=1e3, stability=0.10, variant="with_k_factor"):
    """E^k / ||x||_{k+2}^2 over the ensemble, at N and 2N."""
    ens = bandlimited_ensemble(count, seed=seed)
    lo1, hi1 = _ratio_interval(ens, n, k, variant)
    lo2, hi2 = _ratio_interval(ens, 2 * n, k, variant)
    c1 = max(hi1, 1.0 / lo1)
    c2 = max(hi2, 1.0 / lo2)
    shift = max(abs(lo2 - lo1) / lo1, abs(hi2 - hi1) / hi1)
    ok = c1 <= c_max and c2 <= c_max and shift <= stability
    return ExperimentResult(
        "norm_equivalence",
        {"interval_N": [lo1, hi1], "interval_2N": [lo2, hi2], "C_N": c1, "C_2N": c2, "relative_shift": shift},
        {"C_max": c_max, "relative_shift": stability},
        ok,
        notes=f"ratio in [{lo1:.3g}, {hi1:.3g}] (N={n}), C={c1:.3g}, N-doubling shift {shift:.2e}",
    )


def growth_test_flows():
    return {
        "zero": flows.zero_flow(),
        "rotation": flows.rigid_rotation((0.0, 0.0, 4.0)),
        "strain": flows.planar_strain(1.0),
    }


def run_energy_growth(f0=None, k=3, dt=1e-4, horizon=0.05, stride=10, n=64):
    """Empirical C1 in dE/dt <= C1 (E + 1) for three flows on one smooth filament."""
    f0 = f0 or perturbed_circle(UNIT_RADIUS, 3, 0.01, n)
    cfg = solver.SolverConfig(dt=dt, horizon=horizon, grid=f0.n)
    obs = {}
    ok = True
    for name, flow in growth_test_flows().items():
        traj = solver.evolve(f0, flow, cfg, stride=stride)
        if not traj.completed:
            obs[name] = None
            ok = False
            continue
        series = energy.energy_rate_monitor(traj, k)
        c1 = series.empirical_c1
        finite = bool(np.all(np.isfinite(series.margin[1:-1])))
        obs[name] = {"empirical_c1": c1, "max_abs_margin": float(np.nanmax(np.abs(series.margin)))}
        ok &= finite and np.isfinite(c1)
    return ExperimentResult(
        "energy_growth",
        obs,
        {"finite_running_max": True},
        bool(ok),
        notes=", ".join(f"{k_}: C1={v['empirical_c1']:.3g}" for k_, v in obs.items() if v),
    )


def run_suite(seed=0, quick=False):
    """Every validation experiment at its default parameters."""
    # an ellipse stretches at first order under strain; a circle only at second
    f0_stretch = ellipse(0.18, 0.14, 128)
    base = solver.SolverConfig(dt=1e-4, horizon=0.05, grid=128)
    eps_cfg = solver.SolverConfig(epsilon=1e-3, dt=1e-4, horizon=0.02, grid=64)
    cd_cfg = solver.SolverConfig(dt=1e-4, horizon=0.02, grid=64)
    cd_f0 = perturbed_circle(UNIT_RADIUS, 3, 0.01, 64)
    count = 20 if quick else 100
    results = [
        run_traveling_ring(),
        run_stretch_dichotomy(base, f0_stretch),
        run_mode_decay(),
        run_convergence_epsilon(eps_cfg, [1e-3, 5e-4, 2.5e-4], flows.zero_flow(), circle(UNIT_RADIUS, 64)),
        run_picard_contraction(),
        run_energy_identities(count=count, seed=seed),
        run_norm_equivalence(count=count, seed=seed),
        run_energy_growth(),
        run_continuous_dependence(cd_cfg, cd_f0, 1e-4),
        run_continuous_dependence(cd_cfg, cd_f0, 1e-5),
        run_rk4_order(),
        run_convergence_dt(
            solver.SolverConfig(epsilon=1e-3, dt=1e-4, horizon=0.01, grid=32),
            [4e-4, 2e-4, 1e-4],
            flows.planar_strain(1.0),
            ellipse(0.18, 0.14, 32),
        ),
    ]
    return results
