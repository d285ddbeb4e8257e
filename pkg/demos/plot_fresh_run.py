"""
A-OBD with fresh gradients
==========================

One run on the five-quadratic suite, compared against the grid optimum.
"""

import numpy as np

from oco_frugal import (DeltaPolicy, check_fresh_sandwich, competitive_ratio, cr_upper_bound,
                        delta_fresh, opt_dp, run, scenario_paper, suite_params)

# the suite built with scale M has smoothness 2M and Lipschitz constant 1.6M
M = 10.0
M_s, L = suite_params(M)
fseq = scenario_paper(M, T=100, seed=0)

# delta balances hitting against switching cost
d = delta_fresh(M_s)
print(f"delta = {d:.5f}")

traj = run(fseq, "fresh", DeltaPolicy.fixed(d))
opt = opt_dp(fseq, x0=0.0, n=2001)

r = competitive_ratio(traj.total, opt)
print(f"A-OBD cost {traj.total:.3f}, OPT {opt.cost:.3f} +/- {opt.error_bound:.3f}")
print(f"ratio {r.ratio:.3f} (certified {r.ratio_lo:.3f}), bound {cr_upper_bound('fresh', M_s):.3f}")

# every step satisfies delta*M_t <= H_t <= (delta + M/2)*M_t
rep = check_fresh_sandwich(traj, fseq, d, M_s)
print("sandwich holds on every step:", rep.ok)

# first few actions next to the minimizers they chase
for t in range(5):
    print(t + 1, np.round(traj.xs[t], 4), fseq[t].x_star)
