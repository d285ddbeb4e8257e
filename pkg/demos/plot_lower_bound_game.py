"""
The lower-bound game
====================

Three functions that look identical at x = 0. Whatever the first action,
the adversary picks the one that makes it look bad.
"""

import numpy as np

from oco_frugal import (aobd_step, delta_fresh, exact_min_max_ratio, interval_table, make_game,
                        play_game, stale_lb_game, sweep_first_action)

for M in (10.0, 25.0, 50.0):
    inst = make_game(M)  # gradient magnitude 2M/5
    r, x = sweep_first_action(inst, grid_n=10001)
    exact, xe = exact_min_max_ratio(inst)
    print(f"M={M:g}: best any algorithm can do {exact:.4f} at x1={xe:.4f} (grid {r:.4f})")

for row in interval_table(make_game(50.0)):
    print(f"  {row['interval']} -> {row['response']}: {row['ratio']:.4f}")

# A-OBD is one particular first action
M = 50.0
out = play_game(lambda obs: aobd_step(obs, 0.0, delta_fresh(M)), M)
print(f"A-OBD moves to {out.x1:.4f}, adversary answers {out.chosen}, ratio {out.ratio:.3f}")

# stale setting: the first action is blind, so the ratio is at least L
L = 30.0
print("stale game:", min(stale_lb_game(x, L).ratio for x in np.linspace(0, 1, 101)))
