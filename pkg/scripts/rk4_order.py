"""Global RK4 error on the spinning ring and the dt self-convergence of both integrators."""
import argparse

from _common import CURVES, save
from vortex_lie import flows, solver, validation

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--omega", type=float, default=200.0, help="spin rate of the ring about its axis")
p.add_argument("--dts", type=float, nargs="+", default=[4e-4, 2e-4, 1e-4])
p.add_argument("--horizon", type=float, default=0.1)
p.add_argument("--out")
args = p.parse_args()

results = [validation.run_rk4_order(dts=tuple(args.dts), horizon=args.horizon, omega_z=args.omega)]
for r in results:
    for dt, e in zip(r.observations["dt"], r.observations["error"]):
        print(f"  dt={dt:.1e}  error={e:.3e}")
strain = flows.planar_strain(1.0)
f0 = CURVES["ellipse"](32)
for eps in (0.0, 1e-3):
    cfg = solver.SolverConfig(epsilon=eps, dt=args.dts[-1], horizon=0.01, grid=32)
    results.append(validation.run_convergence_dt(cfg, args.dts, strain, f0))
for r in results:
    print(r.line())
save(results, args.out)
