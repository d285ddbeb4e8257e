"""Lower-bound games against online algorithms (single step, x0 = 0).

Fresh setting: three M-smooth functions share value and slope at 0, so any
algorithm picks the same x1 for all of them; the adversary then reveals the
one that is worst for that x1. Stale setting: the algorithm acts before any
information arrives, and the adversary picks between a function minimized
at 0 and a steep one minimized at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .algorithm import Observation
from .errors import DomainError, ParameterError
from .functions import PiecewiseConvexSpec, Segment, make_lower_bound_g
from .offline import opt_single_step

# asymptotic per-interval ratios as listed for I1..I4, in units of grad_mag
LISTED_INTERVAL_RATIOS = (1 / 3, 1 / 16, 1 / 45, 4 / 27)


@dataclass(frozen=True)
class GameInstance:
    grad_mag: float
    M: float
    functions: tuple[PiecewiseConvexSpec, PiecewiseConvexSpec, PiecewiseConvexSpec]
    boundaries: tuple[float, float, float]

    @property
    def opt_costs(self) -> tuple[float, float, float]:
        return tuple(opt_single_step(g, 0.0)[0] for g in self.functions)

    def interval_bounds(self) -> list[tuple[float, float]]:
        b = (0.0, *self.boundaries, 1.0)
        return [(b[i], b[i + 1]) for i in range(4)]


@dataclass(frozen=True)
class GameOutcome:
    x1: float
    chosen: str
    alg_cost: float
    opt_cost: float
    ratio: float
    clamped: bool = False

    def to_dict(self) -> dict:
        return dict(x1=self.x1, chosen=self.chosen, alg_cost=self.alg_cost,
                    opt_cost=self.opt_cost, ratio=self.ratio, clamped=self.clamped)


# interval k (0-based) -> index of the responding g
_RESPONSE = (0, 1, 2, 0)


def make_game(M: float, grad_mag: Optional[float] = None) -> GameInstance:
    """Game with the largest feasible gradient ``2M/5`` unless given."""
    g = 2.0 * M / 5.0 if grad_mag is None else float(grad_mag)
    fns = tuple(make_lower_bound_g(i, g, M) for i in (1, 2, 3))
    r = g / M
    return GameInstance(g, float(M), fns, (r / 2, 1.5 * r, 13 * r / 6))


def interval_index(x1: float, inst: GameInstance) -> int:
    """0-based interval; a point on an edge belongs to the lower interval."""
    if not 0.0 <= x1 <= 1.0:
        raise DomainError(f"x1={x1} outside [0, 1]")
    return int(np.searchsorted(inst.boundaries, x1, side="left"))


def adversary_respond(x1: float, inst: GameInstance) -> PiecewiseConvexSpec:
    return inst.functions[_RESPONSE[interval_index(x1, inst)]]


def common_observation(inst: GameInstance) -> Observation:
    g1 = inst.functions[0]
    return Observation(g1.value(0.0), g1.grad(0.0), 1, clean_grad=g1.grad(0.0))


def play_game(first_action: Callable[[Observation], float], M: float,
              grad_mag: Optional[float] = None) -> GameOutcome:
    """One round: the algorithm sees the shared observation, then the adversary responds."""
    inst = make_game(M, grad_mag)
    x1 = float(first_action(common_observation(inst)))
    clamped = not 0.0 <= x1 <= 1.0
    x1 = min(1.0, max(0.0, x1))
    f = adversary_respond(x1, inst)
    alg = f.value(x1) + x1
    opt = opt_single_step(f, 0.0)[0]
    return GameOutcome(x1, f.name, alg, opt, alg / opt, clamped)


def sweep_first_action(inst: GameInstance, grid_n: int = 10001) -> tuple[float, float]:
    """Best worst-case ratio any deterministic first action can get on the grid."""
    if grid_n < 101:
        raise ParameterError(f"grid_n must be >= 101, got {grid_n}")
    xs = np.linspace(0.0, 1.0, grid_n)
    which = np.searchsorted(inst.boundaries, xs, side="left")
    opts = inst.opt_costs
    ratio = np.empty(grid_n)
    for k in range(4):
        m = which == k
        gi = _RESPONSE[k]
        ratio[m] = (inst.functions[gi].values(xs[m]) + xs[m]) / opts[gi]
    i = int(np.argmin(ratio))
    return float(ratio[i]), float(xs[i])


def _min_on_interval(f: PiecewiseConvexSpec, lo: float, hi: float) -> tuple[float, float]:
    # f(x) + x on [lo, hi]; convex, so endpoints, breakpoints and vertices suffice
    cands = {lo, hi}
    for s in f.segments:
        if s.hi < lo or s.lo > hi:
            continue
        cands.update(x for x in (s.lo, s.hi) if lo <= x <= hi)
        if s.a > 0:
            v = -(s.b + 1.0) / (2.0 * s.a)
            if max(lo, s.lo) <= v <= min(hi, s.hi):
                cands.add(v)
    best = min(cands, key=lambda x: (f.value(x) + x, x))
    return f.value(best) + best, best


def interval_table(inst: GameInstance) -> list[dict]:
    """Exact per-interval best ratio (infimum over the closed interval)."""
    rows = []
    opts = inst.opt_costs
    for k, (lo, hi) in enumerate(inst.interval_bounds()):
        gi = _RESPONSE[k]
        cost, x = _min_on_interval(inst.functions[gi], lo, hi)
        rows.append(dict(interval=f"I{k + 1}", lo=lo, hi=hi, response=f"g{gi + 1}",
                         best_x1=x, ratio=cost / opts[gi],
                         listed=LISTED_INTERVAL_RATIOS[k] * inst.grad_mag))
    return rows


def exact_min_max_ratio(inst: GameInstance) -> tuple[float, float]:
    rows = interval_table(inst)
    best = min(rows, key=lambda r: r["ratio"])
    return best["ratio"], best["best_x1"]


# -- stale setting -----------------------------------------------------------------

def stale_pair(L: float) -> tuple[PiecewiseConvexSpec, PiecewiseConvexSpec]:
    """``L x`` (minimized at 0) and ``L (1 - x)`` (minimized at 1)."""
    if not L > 0:
        raise ParameterError(f"L must be > 0, got {L}")
    h1 = PiecewiseConvexSpec((Segment(0.0, 1.0, 0.0, L, 0.0),), name="h1")
    h2 = PiecewiseConvexSpec((Segment(0.0, 1.0, 0.0, -L, L),), name="h2")
    return h1, h2


def stale_lb_game(first_action_blind: float, L: float) -> GameOutcome:
    """Blind first action from x0 = 0: staying is punished by ``h2``, moving by ``h1``."""
    x1 = float(first_action_blind)
    if not 0.0 <= x1 <= 1.0:
        raise DomainError(f"x1={x1} outside [0, 1]")
    h1, h2 = stale_pair(L)
    f = h2 if x1 == 0.0 else h1
    alg = f.value(x1) + x1
    opt = opt_single_step(f, 0.0)[0]
    ratio = alg / opt if opt > 0 else math.inf
    return GameOutcome(x1, f.name, alg, opt, ratio)
