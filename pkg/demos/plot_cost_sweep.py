"""
Total cost against M and L
==========================

Mean total cost over five seeds, written out as CSV and two SVG charts.
"""

from pathlib import Path

from oco_frugal import emit_csv, emit_svg_linechart, linear_fit_r2, mean_series, sweep

out = Path("out/demo")

rows = sweep(["fresh", "stale", "noisy"], M_values=range(2, 51, 6), T=100, seeds=range(5))
emit_csv(rows, out / "cost_vs_M.csv")
emit_svg_linechart(rows, "M", ["fresh", "stale", "noisy"], out / "cost_vs_M.svg")
for s in ("fresh", "stale", "noisy"):
    slope, _, r2 = linear_fit_r2(*mean_series(rows, s, "M"))
    print(f"{s:>6}: slope {slope:.3f} per unit M, R^2 {r2:.4f}")

# L only changes the delta rule; the function sequence stays the same
rows_L = sweep(["fresh", "stale", "noisy"], M_values=[10.0], L_values=range(2, 51, 6),
               T=100, seeds=range(5))
emit_svg_linechart(rows_L, "L", ["stale", "noisy"], out / "cost_vs_L.svg")
for s in ("fresh", "stale", "noisy"):
    xs, ys = mean_series(rows_L, s, "L")
    print(f"{s:>6}: cost at L={xs[0]:g} {ys[0]:.2f}, at L={xs[-1]:g} {ys[-1]:.2f}")
