"""
Noisy gradients
===============

Uniform noise of size alpha on the gradient; delta adapts to each reading.
"""

from oco_frugal import (DeltaPolicy, NoiseModel, check_noisy_sandwich, competitive_ratio,
                        cr_upper_bound, noisy_constants, opt_dp, run, scenario_paper, suite_params)

M, alpha = 10.0, 0.5
M_s, L = suite_params(M)
G = L + alpha  # largest gradient the algorithm can be shown

fseq = scenario_paper(M, T=100, seed=1)
traj = run(fseq, "noisy-fresh", DeltaPolicy.noisy(G, L), NoiseModel.uniform(alpha), seed=1)
opt = opt_dp(fseq)

# noise that would flip the gradient sign is clipped and counted
print("sign-flip clips:", traj.a4_clips)

c = noisy_constants(G, L, M_s, alpha)
print(f"a_hat = {c.a_hat:.3f}, b_hat = {c.b_hat:.3f}")

rep = check_noisy_sandwich(traj, fseq, alpha, G, L, M_s)
print("sandwich layers pass:", rep.ok)

r = competitive_ratio(traj.total, opt)
print(f"ratio {r.ratio_lo:.3f} vs bound {cr_upper_bound('noisy', M_s, L, G, alpha):.3f}")
