"""Spread of E^k / ||x||_{k+2}^2 over the random ensemble, per N, k and variant."""
import argparse

from _common import save
from vortex_lie import validation

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--count", type=int, default=100)
p.add_argument("--seed", type=int, default=0)
p.add_argument("--grids", type=int, nargs="+", default=[32, 64])
p.add_argument("--orders", type=int, nargs="+", default=[3, 4, 5])
p.add_argument("--out")
args = p.parse_args()

results = []
for variant in ("with_k_factor", "without_k_factor"):
    for k in args.orders:
        for n in args.grids:
            r = validation.run_norm_equivalence(count=args.count, n=n, k=k, seed=args.seed, variant=variant)
            r.name = f"norm_equivalence[{variant}, k={k}, N={n}]"
            print(r.line())
            results.append(r)
save(results, args.out)
