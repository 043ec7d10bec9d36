"""Distance between regularized runs and the eps = 0 reference as eps shrinks."""
import argparse

from _common import CURVES, save
from vortex_lie import flows, solver, validation

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--eps", type=float, nargs="+", default=[1e-3, 5e-4, 2.5e-4, 1.25e-4])
p.add_argument("--curve", choices=sorted(CURVES), default="circle")
p.add_argument("--grid", type=int, default=64)
p.add_argument("--dt", type=float, default=1e-4)
p.add_argument("--horizon", type=float, default=0.02)
p.add_argument("--strain", type=float, default=0.0, help="planar strain rate of the external flow")
p.add_argument("--out")
args = p.parse_args()

flow = flows.planar_strain(args.strain) if args.strain else flows.zero_flow()
cfg = solver.SolverConfig(epsilon=args.eps[0], dt=args.dt, horizon=args.horizon, grid=args.grid)
r = validation.run_convergence_epsilon(cfg, args.eps, flow, CURVES[args.curve](args.grid))
print(r.line())
for eps, d, it in zip(r.observations["epsilon"], r.observations["distance"], r.observations["picard_max_iterations"]):
    print(f"  eps={eps:.3e}  distance={d:.4e}  max Picard iterations={it}")
save([r], args.out)
