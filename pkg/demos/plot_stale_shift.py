"""
Stale gradients are fresh gradients one step late
=================================================

With x_1 = x_0 the stale actions repeat the fresh actions shifted by one.
"""

import numpy as np

from oco_frugal import DeltaPolicy, check_stale_relation, delta_stale, run, scenario_paper, suite_params

M = 10.0
M_s, L = suite_params(M)
fseq = scenario_paper(M, T=100, seed=3)

d = delta_stale(M_s, L)
fresh = run(fseq, "fresh", DeltaPolicy.fixed(d))
stale = run(fseq, "stale", DeltaPolicy.fixed(d))

print("stale[1:] == fresh[:-1]:", np.array_equal(stale.xs[1:], fresh.xs[:-1]))

# the price of staleness is bounded by L times the fresh movement
rep = check_stale_relation(fresh, stale, fseq, L)
print(f"C_stale = {rep.extra['C_stale']:.3f} <= C_fresh + L*sum(M_t) = "
      f"{rep.extra['C_fresh'] + L * fresh.moves.sum():.3f}")

# the printed discriminant with -8 never gives a usable delta
try:
    delta_stale(M_s, L, mode="literal")
except ValueError as exc:
    print("literal form:", exc)
