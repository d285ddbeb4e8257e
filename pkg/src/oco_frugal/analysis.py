"""Cost accounting, competitive ratios, bound evaluators and per-step checkers.

Checkers are pure functions of recorded trajectories and return a
:class:`CheckReport`: per-step pass flags, slacks (``rhs - lhs``) and the
tolerance each step was judged against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .algorithm import Trajectory, delta_stale, delta_fresh
from .errors import ParameterError
from .functions import PiecewiseConvexSpec
from .offline import OptResult


@dataclass
class CostLedger:
    hits: np.ndarray
    moves: np.ndarray
    total: float


@dataclass
class CheckReport:
    name: str
    passed: np.ndarray
    slack: np.ndarray
    tol: np.ndarray
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(np.all(self.passed)) and all(
            v for k, v in self.extra.items() if k.endswith("_ok"))

    @property
    def worst_slack(self) -> float:
        return float(np.min(self.slack)) if self.slack.size else math.inf

    @property
    def tolerance(self) -> float:
        if not self.slack.size:
            return 0.0
        return float(self.tol[int(np.argmin(self.slack))])

    @property
    def n_failed(self) -> int:
        return int(np.size(self.passed) - np.count_nonzero(self.passed))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "steps": int(np.size(self.passed)),
            "failed_steps": self.n_failed,
            "worst_slack": self.worst_slack,
            "tolerance": self.tolerance,
            **{k: (float(v) if isinstance(v, (np.floating, float)) else v)
               for k, v in self.extra.items()},
        }


def _report(name, lhs, rhs, tol, **extra) -> CheckReport:
    lhs, rhs, tol = (np.asarray(v, dtype=float) for v in (lhs, rhs, tol))
    slack = rhs - lhs
    return CheckReport(name, slack >= -tol, slack, np.broadcast_to(tol, slack.shape).copy(), extra)


def _merge(name, *reports: CheckReport, **extra) -> CheckReport:
    """Combine checks over the same steps: a step passes if every part does."""
    passed = np.logical_and.reduce([r.passed for r in reports])
    stacked = np.vstack([r.slack + r.tol for r in reports])
    worst = np.argmin(stacked, axis=0)
    cols = np.arange(stacked.shape[1])
    slack = np.vstack([r.slack for r in reports])[worst, cols]
    tol = np.vstack([r.tol for r in reports])[worst, cols]
    parts = {}
    for r in reports:
        parts[f"{r.name}_worst_slack"] = r.worst_slack
        parts.update(r.extra)
    return CheckReport(name, passed, slack, tol, {**parts, **extra})


# -- costs and ratios ----------------------------------------------------------

def total_cost(traj: Trajectory, fseq: Sequence[PiecewiseConvexSpec]) -> CostLedger:
    """Hitting cost against the true f_t plus linear switching cost."""
    if len(traj) != len(fseq):
        raise ParameterError(f"trajectory length {len(traj)} != sequence length {len(fseq)}")
    xs = traj.xs
    hits = np.array([f.value(x) for f, x in zip(fseq, xs)])
    moves = np.abs(np.diff(np.concatenate(([traj.x0], xs))))
    return CostLedger(hits, moves, float(hits.sum() + moves.sum()))


class Ratio(NamedTuple):
    ratio: float
    ratio_lo: float

    @property
    def infinite(self) -> bool:
        return math.isinf(self.ratio)


def competitive_ratio(alg_cost: float, opt: OptResult) -> Ratio:
    """Cost ratio against the grid optimum and against ``opt.cost + error_bound``."""
    if alg_cost < 0:
        raise ParameterError(f"alg_cost must be >= 0, got {alg_cost}")
    if opt.cost <= 0:
        if alg_cost == 0:
            return Ratio(1.0, 1.0)
        lo = alg_cost / opt.error_bound if opt.error_bound > 0 else math.inf
        return Ratio(math.inf, lo)
    return Ratio(alg_cost / opt.cost, alg_cost / (opt.cost + opt.error_bound))


# -- bounds ------------------------------------------------------------------------

@dataclass(frozen=True)
class NoisyConstants:
    a_hat: float
    b_hat: float
    G: float
    L: float
    M: float
    alpha: float

    @property
    def vacuous(self) -> bool:
        return not self.a_hat > 0


def noisy_constants(G: float, L: float, M: float, alpha: float,
                    variant: str = "derived") -> NoisyConstants:
    """Step-independent constants with ``a_hat * M_t <= H_t <= b_hat * M_t``.

    ``derived`` carries the factor ``1 - alpha/(G+L-alpha)`` in ``a_hat`` as
    the per-step bounds produce it; ``printed`` uses ``1 + alpha/(G+L-alpha)``.
    """
    if not (G > 0 and L > 0 and M >= 0 and alpha >= 0):
        raise ParameterError(f"invalid noisy parameters G={G}, L={L}, M={M}, alpha={alpha}")
    beta = G + L
    if variant not in ("derived", "printed"):
        raise ParameterError(f"unknown variant {variant!r}")
    if beta - 2 * alpha <= 0:
        a_hat = -math.inf
    else:
        sign = -1.0 if variant == "derived" else 1.0
        a_hat = (L - alpha * L / (beta - 2 * alpha)) * (1 + sign * alpha / (beta - alpha))
    b_hat = (beta + M / 2 + alpha * L / beta) * (1 + alpha / (beta - alpha))
    return NoisyConstants(a_hat, b_hat, G, L, M, alpha)


def fresh_bound_general(M: float, delta: float) -> float:
    return max(delta + 1 + M / 2, 2 + 2 / delta + M / (2 * delta))


def stale_bound_general(M: float, L: float, delta: float) -> float:
    return max(delta + L + 1 + M / 2, 2 + 2 * (L + 1) / delta + M / (2 * delta))


def cr_upper_bound(setting: str, M: float, L: float = 0.0, G: float = 0.0,
                   alpha: float = 0.0, delta: Optional[float] = None,
                   form: str = "closed", variant: str = "derived") -> float:
    """Competitive-ratio upper bound for A-OBD.

    ``form="closed"`` returns the closed form: for ``fresh`` the printed bound
    ``M/4 + 3/2 + sqrt((M/2+1)**2 + 7)/2``; for ``stale`` the balanced value at
    the corrected delta; for ``noisy`` ``max{1 + (2+b)/a, 1 + b}`` (infinite
    when ``a <= 0``). ``form="general"`` evaluates the two-branch maximum at
    ``delta`` (fresh/stale only), defaulting to the setting's delta.
    """
    setting = setting.replace("noisy-fresh", "noisy").replace("noisy-stale", "noisy")
    if setting == "noisy":
        c = noisy_constants(G, L, M, alpha, variant)
        if c.vacuous:
            return math.inf
        return max(1 + (2 + c.b_hat) / c.a_hat, 1 + c.b_hat)
    if not M > 0:
        raise ParameterError(f"M must be > 0, got {M}")
    if form not in ("closed", "general"):
        raise ParameterError(f"unknown form {form!r}")
    if setting == "fresh":
        if form == "closed":
            return M / 4 + 1.5 + 0.5 * math.sqrt((M / 2 + 1) ** 2 + 7)
        return fresh_bound_general(M, delta if delta is not None else delta_fresh(M))
    if setting == "stale":
        if not L > 0:
            raise ParameterError(f"L must be > 0, got {L}")
        if form == "closed":
            k = M + 2 * L - 2
            return M / 4 + L / 2 + 1.5 + 0.25 * math.sqrt(k * k + 8 * (M + 4 * L + 4))
        return stale_bound_general(M, L, delta if delta is not None else delta_stale(M, L))
    raise ParameterError(f"unknown setting {setting!r}")


# -- checkers ------------------------------------------------------------------

def _deltas(traj: Trajectory, delta) -> np.ndarray:
    if delta is None:
        return np.array([s.delta for s in traj.steps])
    return np.broadcast_to(np.asarray(delta, dtype=float), (len(traj),))


def check_fresh_sandwich(traj: Trajectory, fseq, delta=None, M: float = 0.0) -> CheckReport:
    """``delta M_t <= H_t <= (delta + M/2) M_t`` on every step."""
    led = total_cost(traj, fseq)
    d = _deltas(traj, delta)
    tol = 1e-9 * (1 + led.hits)
    lower = _report("lower", d * led.moves, led.hits, tol)
    upper = _report("upper", led.hits, (d + M / 2) * led.moves, tol)
    return _merge("fresh_sandwich", lower, upper)


def check_stale_relation(fresh: Trajectory, stale: Trajectory, fseq, L: float) -> CheckReport:
    """Shift identity ``x_t^stale = x_{t-1}^fresh`` and ``C_stale <= C_fresh + L sum M_t``.

    Per step, the Lipschitz step ``f_t(x_{t-1}) <= f_t(x_t) + L M_t`` is
    checked as well.
    """
    T = len(fseq)
    xf, xs = fresh.xs, stale.xs
    shifted = np.concatenate(([fresh.x0], xf[:-1]))
    identity = xs == shifted
    lf, ls = total_cost(fresh, fseq), total_cost(stale, fseq)
    tol = 1e-9 * (1 + lf.total)
    per_step = _report("lipschitz_step", ls.hits, lf.hits + L * lf.moves, np.full(T, tol))
    agg_slack = lf.total + L * lf.moves.sum() - ls.total
    return CheckReport(
        "stale_relation",
        identity & per_step.passed,
        per_step.slack,
        per_step.tol,
        {
            "identity_ok": bool(identity.all()),
            "identity_mismatches": int(T - identity.sum()),
            "cost_inequality_ok": bool(agg_slack >= -tol),
            "cost_inequality_slack": float(agg_slack),
            "C_fresh": lf.total,
            "C_stale": ls.total,
        },
    )


def noisy_move_bounds(traj: Trajectory, alpha: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Noise-free move and the moves under gradients of magnitude ``|g| -/+ alpha``.

    Returns ``(M_true, M_over, M_under)`` per step; NaN where no observation.
    """
    out = np.full((3, len(traj)), np.nan)
    for i, s in enumerate(traj.steps):
        if s.obs is None:
            continue
        g, d, f = abs(s.obs.clean_grad), s.delta, s.obs.f_avl
        m_true = f / (d + g) if g > 0 else 0.0
        out[0, i] = m_true
        out[1, i] = m_true * (g + d) / (g - alpha + d) if g - alpha + d > 0 else math.inf
        out[2, i] = m_true * (g + d) / (g + alpha + d)
    return out[0], out[1], out[2]


def check_noisy_sandwich(traj: Trajectory, fseq, alpha: float, G: float, L: float,
                         M: float, variant: str = "derived") -> CheckReport:
    """Three layers for noisy runs.

    * per-step ``a_t M_t <= H_t <= b_t M_t`` with constants depending on the
      received gradient;
    * step-independent ``a_hat M_t <= H_t <= b_hat M_t`` (lower side skipped
      and reported vacuous when ``a_hat <= 0``);
    * ``M_under <= M_t <= M_over`` from the extremal-gradient moves.

    Steps without an observation pass vacuously.
    """
    led = total_cost(traj, fseq)
    H, Mt = led.hits, led.moves
    T = len(traj)
    has = np.array([s.obs is not None for s in traj.steps])
    d = np.array([s.delta if s.obs is not None else 1.0 for s in traj.steps])
    gavl = np.array([abs(s.obs.grad_avl) if s.obs is not None else 0.0 for s in traj.steps])
    s = gavl + d
    with np.errstate(divide="ignore", invalid="ignore"):
        a_t = (d - alpha * L / (s - 2 * alpha)) * (1 - alpha / (s - alpha))
        b_t = (d + M / 2 + alpha * L / s) * (1 + alpha / (s - alpha))
    tol = 1e-9 * (1 + H)
    # steps with no observation carry zero movement; mask them out explicitly
    lhs_lo = np.where(has, a_t * Mt, 0.0)
    rhs_hi = np.where(has, b_t * Mt, H)
    step_lo = _report("step_lower", lhs_lo, np.where(has, H, 0.0), tol)
    step_hi = _report("step_upper", H, rhs_hi, tol)

    c = noisy_constants(G, L, M, alpha, variant)
    const_lo = _report("const_lower", (c.a_hat if not c.vacuous else 0.0) * Mt, H, tol,
                       a_hat=c.a_hat, b_hat=c.b_hat, a_hat_vacuous=c.vacuous)
    const_hi = _report("const_upper", H, c.b_hat * Mt, tol)

    _, m_over, m_under = noisy_move_bounds(traj, alpha)
    mtol = 1e-9 * (1 + Mt)
    over = _report("move_over", np.where(has, Mt, 0.0), np.where(has, m_over, 0.0), mtol)
    under = _report("move_under", np.where(has, m_under, 0.0), np.where(has, Mt, 0.0), mtol)
    a4 = sum(1 for st in traj.steps if st.obs is not None and abs(st.obs.clean_grad) <= alpha)
    return _merge("noisy_sandwich", step_lo, step_hi, const_lo, const_hi, over, under,
                  a4_clips=traj.a4_clips, a4_precondition_failures=a4, steps=T)


def check_potential_certificate(alg: Trajectory, opt: OptResult, gamma: float, rho: float,
                                L_term: float = 0.0) -> CheckReport:
    """``H_t + (L_term+1) M_t + dphi_t <= rho (H_t^OPT + M_t^OPT) + tol`` per step.

    ``phi_t = gamma |x_t - x_t^OPT|`` with both sequences starting at ``alg.x0``;
    ``tol = 2 gamma h + 1e-9`` absorbs the grid snapping of the OPT trajectory.
    """
    if len(alg) != len(opt.trajectory):
        raise ParameterError("trajectories differ in length")
    T = len(alg)
    x = np.concatenate(([alg.x0], alg.xs))
    o = np.concatenate(([opt.x0], opt.trajectory))
    phi = gamma * np.abs(x - o)
    dphi = np.diff(phi)
    H, Mt = alg.hits, alg.moves
    h = 1.0 / (opt.grid_n - 1)
    tol = gamma * 2 * h + 1e-9
    lhs = H + (L_term + 1) * Mt + dphi
    rhs = rho * (opt.hits + opt.moves)
    rep = _report("potential_certificate", lhs, rhs, np.full(T, tol))
    total_dphi = float(dphi.sum())
    rep.extra.update(potential_sum=total_dphi, potential_sum_ok=bool(total_dphi >= -tol * T),
                     gamma=gamma, rho=rho)
    return rep
