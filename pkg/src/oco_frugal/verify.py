"""Self-check suite behind ``oco-frugal verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adversary import make_game, stale_lb_game, sweep_first_action
from .algorithm import Observation, aobd_step
from .experiments import quadratic_suite, run_setting, scenario_paper, suite_params
from .functions import PiecewiseConvexSpec, Segment, make_lower_bound_g, random_convex_spec, validate_assumptions
from .offline import (exact_balanced_point, minplus_linear, minplus_linear_bruteforce, opt_dp,
                      opt_single_step)


@dataclass
class VerifyResult:
    name: str
    ok: bool
    detail: str = ""


def _functions() -> VerifyResult:
    specs = quadratic_suite(10.0) + [make_lower_bound_g(i, 4.0, 10.0) for i in (1, 2, 3)]
    bad = [s.name for s in specs if not validate_assumptions(s, 20.0, 16.0).ok]
    return VerifyResult("function assumptions", not bad, ", ".join(bad))


def _minplus(n_arrays: int, rng) -> VerifyResult:
    for _ in range(n_arrays):
        n = int(rng.integers(1, 65))
        v = rng.uniform(0, 3, n)
        h = 1.0 / max(n - 1, 1)
        if not np.array_equal(minplus_linear(v, h), minplus_linear_bruteforce(v, h)):
            return VerifyResult("min-plus oracle", False, f"mismatch at n={n}")
    return VerifyResult("min-plus oracle", True, f"{n_arrays} arrays")


def _dp_vs_single(n_specs: int, rng) -> VerifyResult:
    worst = -math.inf
    for _ in range(n_specs):
        f = random_convex_spec(rng, int(rng.integers(1, 5)))
        x0 = float(rng.uniform())
        exact = opt_single_step(f, x0)[0]
        res = opt_dp([f], x0, 1001)
        gap = abs(res.cost - exact) - res.error_bound
        worst = max(worst, gap)
    return VerifyResult("grid DP vs exact single step", worst <= 0, f"worst excess {worst:.3g}")


def _balanced(rng) -> VerifyResult:
    worst_res, worst_lin = 0.0, 0.0
    for _ in range(50):
        f = random_convex_spec(rng, int(rng.integers(1, 5)))
        xp, d = float(rng.uniform()), float(rng.uniform(0.5, 5))
        x = exact_balanced_point(f, xp, d)
        worst_res = max(worst_res, abs(f.value(x) - d * abs(x - xp)))
        slope, xs = -float(rng.uniform(0.5, 5)), float(rng.uniform(0.5, 1))
        lin = PiecewiseConvexSpec((Segment(0.0, xs, 0.0, slope, -slope * xs),
                                   Segment(xs, 1.0, 1.0, -2 * xs, xs * xs)))
        xp = float(rng.uniform(0, xs))
        obs = Observation(lin.value(xp), lin.grad(xp), 1)
        worst_lin = max(worst_lin, abs(exact_balanced_point(lin, xp, d) - aobd_step(obs, xp, d)))
    ok = worst_res <= 1e-10 and worst_lin <= 1e-12
    return VerifyResult("balanced point", ok, f"residual {worst_res:.2g}, linear gap {worst_lin:.2g}")


def _runs(seeds, M_values) -> list[VerifyResult]:
    out = []
    for setting in ("fresh", "stale", "noisy"):
        failed = []
        for M in M_values:
            M_s, L = suite_params(M)
            for seed in seeds:
                fseq = scenario_paper(M, 100, seed)
                opt = opt_dp(fseq, 0.0, 2001)
                traj, checks, bound, _ = run_setting(fseq, setting, M_s, L, L + 0.5, 0.5, seed, opt)
                ratio_lo = traj.total / (opt.cost + opt.error_bound)
                if not all(checks.values()) or ratio_lo > bound:
                    failed.append((M, seed))
        out.append(VerifyResult(f"{setting} runs: checks and ratio bound", not failed,
                                f"{len(seeds) * len(M_values)} runs, failures {failed[:5]}"))
    return out


def _games() -> list[VerifyResult]:
    out = []
    for M in (10.0, 25.0, 50.0):
        r, _ = sweep_first_action(make_game(M), 10001)
        out.append(VerifyResult(f"fresh lower-bound game M={M:g}", r >= 2 * M / 135,
                                f"min-max ratio {r:.4f} vs 2M/135 = {2 * M / 135:.4f}"))
    L = 30.0
    ok = all(stale_lb_game(x, L).ratio >= L for x in np.linspace(0, 1, 101))
    out.append(VerifyResult("stale lower-bound game", ok, f"L={L:g}"))
    return out


def run_all(quick: bool = False, seed: int = 0) -> list[VerifyResult]:
    rng = np.random.default_rng(seed)
    seeds = range(3) if quick else range(10)
    results = [_functions(), _minplus(50 if quick else 200, rng),
               _dp_vs_single(20 if quick else 100, rng), _balanced(rng)]
    results += _runs(list(seeds), (2.0, 10.0, 50.0))
    results += _games()
    return results
