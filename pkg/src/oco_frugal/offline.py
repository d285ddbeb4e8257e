"""Offline optimum for linear switching cost, plus exact single-step oracles.

The DP runs on a uniform grid of [0, 1]. The transition
``W(x) = min_y V(y) + |x - y|`` is a 1-D L1 distance transform, computed in
two linear passes (``np.minimum.accumulate`` forward and backward).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericError, ParameterError
from .functions import PiecewiseConvexSpec


@dataclass
class GridValueFunction:
    n: int
    h: float
    values: np.ndarray
    backptr: np.ndarray


@dataclass
class OptResult:
    cost: float
    trajectory: np.ndarray
    hits: np.ndarray
    moves: np.ndarray
    grid_n: int
    error_bound: float
    x0: float = 0.0


def _minplus_argmin(values: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    n = values.shape[0]
    idx = np.arange(n)
    pos = idx * h
    # forward: min over j <= i of V[j] - j*h; ties keep the earlier (smaller) index
    key = values - pos
    run = np.minimum.accumulate(key)
    prev = np.concatenate(([np.inf], run[:-1]))
    left = np.maximum.accumulate(np.where(key < prev, idx, 0))
    # backward: min over j >= i of V[j] + j*h; ties move to the smaller index
    key = (values + pos)[::-1]
    run = np.minimum.accumulate(key)
    prev = np.concatenate(([np.inf], run[:-1]))
    ridx = idx[::-1]
    right = np.minimum.accumulate(np.where(key <= prev, ridx, n))[::-1]
    wl = values[left] + (idx - left) * h
    wr = values[right] + (right - idx) * h
    take_right = wr < wl
    arg = np.where(take_right, right, left)
    return np.where(take_right, wr, wl), arg


def minplus_linear(values, h: float) -> np.ndarray:
    """``W[i] = min_j values[j] + |i - j| * h``, in O(n)."""
    values = np.asarray(values, dtype=float)
    if not h > 0:
        raise ParameterError(f"h must be > 0, got {h}")
    if not np.all(np.isfinite(values)):
        raise NumericError("values must be finite")
    return _minplus_argmin(values, h)[0]


def minplus_linear_bruteforce(values, h: float) -> np.ndarray:
    """O(n^2) reference for :func:`minplus_linear`."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = min(values[j] + abs(i - j) * h for j in range(n))
    return out


def opt_dp(fseq: Sequence[PiecewiseConvexSpec], x0: float = 0.0, n: int = 2001) -> OptResult:
    """Grid dynamic program for ``min sum f_t(x_t) + |x_t - x_{t-1}|``.

    The returned ``error_bound = T * (L_max + 1) * h`` bounds how far the grid
    optimum can sit above the continuous one.
    """
    if n < 2:
        raise ParameterError(f"grid needs n >= 2 points, got {n}")
    if not 0.0 <= x0 <= 1.0:
        raise ParameterError(f"x0={x0} outside [0, 1]")
    T = len(fseq)
    if T == 0:
        return OptResult(0.0, np.empty(0), np.empty(0), np.empty(0), n, 0.0, x0)
    h = 1.0 / (n - 1)
    grid = np.linspace(0.0, 1.0, n)
    fvals = {}
    rows = []
    V = None
    for t, f in enumerate(fseq):
        if id(f) not in fvals:
            fvals[id(f)] = f.values(grid)
            if not np.all(np.isfinite(fvals[id(f)])):
                raise NumericError(f"non-finite values of f_{t + 1}")
        if V is None:
            V = fvals[id(f)] + np.abs(grid - x0)
            rows.append(GridValueFunction(n, h, V, np.full(n, -1)))
        else:
            W, arg = _minplus_argmin(V, h)
            V = fvals[id(f)] + W
            rows.append(GridValueFunction(n, h, V, arg))
    i = int(np.argmin(V))
    path = [i]
    for row in reversed(rows[1:]):
        i = int(row.backptr[i])
        path.append(i)
    path.reverse()
    traj = grid[path]
    hits = np.array([f.value(x) for f, x in zip(fseq, traj)])
    moves = np.abs(np.diff(np.concatenate(([x0], traj))))
    L_max = max(f.params.L for f in fseq)
    return OptResult(float(hits.sum() + moves.sum()), traj, hits, moves, n,
                     T * (L_max + 1.0) * h, x0)


def opt_single_step(f: PiecewiseConvexSpec, x0: float = 0.0) -> tuple[float, float]:
    """Exact ``min_x f(x) + |x - x0|`` and its minimizer (T = 1)."""
    if not 0.0 <= x0 <= 1.0:
        raise ParameterError(f"x0={x0} outside [0, 1]")
    best_cost, best_x = f.value(x0), x0
    for s in f.segments:
        for lo, hi, sgn in ((s.lo, min(s.hi, x0), -1.0), (max(s.lo, x0), s.hi, 1.0)):
            if lo > hi:
                continue
            # a x^2 + (b + sgn) x + c - sgn*x0 on [lo, hi]
            cands = [lo, hi]
            if s.a > 0:
                v = -(s.b + sgn) / (2.0 * s.a)
                if lo < v < hi:
                    cands.append(v)
            for x in cands:
                cost = s.value(x) + abs(x - x0)
                if cost < best_cost:
                    best_cost, best_x = cost, x
    return best_cost, best_x


def exact_balanced_point(f: PiecewiseConvexSpec, x_prev: float, delta: float) -> float:
    """Point between ``x_prev`` and the minimizer where ``f(x) = delta * |x - x_prev|``.

    Found by bisection run to floating-point resolution.
    """
    if not (math.isfinite(x_prev) and math.isfinite(delta)):
        raise NumericError("non-finite input")
    if not delta > 0:
        raise ParameterError(f"delta must be > 0, got {delta}")
    if f.value(x_prev) <= 0.0:
        return x_prev

    def g(x):
        return f.value(x) - delta * abs(x - x_prev)

    lo, hi = x_prev, f.x_star  # g(lo) > 0 >= g(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if gm > 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(g(lo)) <= abs(g(hi)) else hi
