"""Simulation sweeps over the five-quadratic scenario, CSV output and SVG charts."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .algorithm import DeltaPolicy, NoiseModel, run
from .analysis import (check_fresh_sandwich, check_noisy_sandwich, check_potential_certificate,
                       check_stale_relation, competitive_ratio, cr_upper_bound,
                       fresh_bound_general, stale_bound_general)
from .errors import ParameterError
from .functions import PiecewiseConvexSpec, make_quadratic, validate_assumptions
from .offline import opt_dp

# (weight of M, center) for the five simulation quadratics
QUADRATIC_SUITE = ((0.5, 0.1), (0.3, 0.3), (1.0, 0.2), (1.0, 0.8), (1.0, 0.4))

CSV_HEADER = ("setting", "M", "L", "G", "alpha", "seed", "T", "total_cost", "opt_cost",
              "opt_error_bound", "ratio", "ratio_lo", "theorem_bound", "checks_passed")

DEFAULT_ALPHA = 0.5


@dataclass
class Scenario:
    M: float
    L_param: Optional[float] = None
    G: Optional[float] = None
    alpha: float = DEFAULT_ALPHA
    T: int = 100
    seed: int = 0
    setting: str = "fresh"
    fresh_mode: str = "paper"
    stale_mode: str = "corrected"
    x0: float = 0.0

    def __post_init__(self):
        if self.T < 1:
            raise ParameterError(f"T must be >= 1, got {self.T}")
        if not self.M > 0:
            raise ParameterError(f"M must be > 0, got {self.M}")
        if self.L_param is not None and not self.L_param > 0:
            raise ParameterError(f"L must be > 0, got {self.L_param}")


@dataclass
class SweepRow:
    setting: str
    M: float
    L: float
    G: float
    alpha: float
    seed: int
    T: int
    total_cost: float
    opt_cost: float
    opt_error_bound: float
    ratio: float
    ratio_lo: float
    theorem_bound: float
    checks_passed: dict = field(default_factory=dict)
    a4_clips: int = field(default=0, compare=False)
    error: str = field(default="", compare=False)

    @property
    def all_passed(self) -> bool:
        return bool(self.checks_passed) and all(self.checks_passed.values())


# -- scenarios ---------------------------------------------------------------

def quadratic_suite(M: float) -> list[PiecewiseConvexSpec]:
    return [make_quadratic(w * M, c, name=f"f{i + 1}") for i, (w, c) in enumerate(QUADRATIC_SUITE)]


def suite_params(M: float) -> tuple[float, float]:
    """Smoothness and Lipschitz constants of the suite: ``(2M, 1.6M)``."""
    suite = quadratic_suite(M)
    return max(f.params.M for f in suite), max(f.params.L for f in suite)


def scenario_paper(M: float, T: int = 100, seed: int = 0) -> list[PiecewiseConvexSpec]:
    """``T`` functions drawn uniformly (seeded) from the five quadratics."""
    if not M > 0:
        raise ParameterError(f"M must be > 0, got {M}")
    if T < 1:
        raise ParameterError(f"T must be >= 1, got {T}")
    suite = quadratic_suite(M)
    picks = np.random.default_rng(seed).integers(0, len(suite), size=T)
    return [suite[i] for i in picks]


# -- single cells --------------------------------------------------------------

def _assumption_flag(fseq, M_claim, L_claim) -> bool:
    seen = {}
    for f in fseq:
        if id(f) not in seen:
            seen[id(f)] = validate_assumptions(f, M_claim, L_claim).ok
    return all(seen.values())


def run_setting(fseq, setting: str, M_s: float, L_param: float, G: float, alpha: float,
                seed: int, opt, x0: float = 0.0, fresh_mode: str = "paper",
                stale_mode: str = "corrected"):
    """Run one setting on ``fseq`` and its checks.

    Returns ``(trajectory, checks, theorem_bound, reports)``; ``reports`` maps
    check names to :class:`CheckReport` objects.
    """
    reports = {}
    checks = {}
    if setting == "fresh":
        policy = (DeltaPolicy.fresh_paper(M_s) if fresh_mode == "paper"
                  else DeltaPolicy.fresh_balanced(M_s))
        traj = run(fseq, "fresh", policy, x0=x0, seed=seed, check_assumptions=False)
        checks["assumptions"] = _assumption_flag(fseq, M_s, math.inf)
        d = policy.value
        reports["sandwich"] = check_fresh_sandwich(traj, fseq, d, M_s)
        reports["certificate"] = check_potential_certificate(
            traj, opt, gamma=d + M_s / 2 + 1, rho=fresh_bound_general(M_s, d))
        bound = cr_upper_bound("fresh", M_s)
    elif setting == "stale":
        policy = (DeltaPolicy.stale_corrected(M_s, L_param) if stale_mode == "corrected"
                  else DeltaPolicy.stale_literal(M_s, L_param))
        fresh = run(fseq, "fresh", policy, x0=x0, seed=seed, check_assumptions=False)
        traj = run(fseq, "stale", policy, x0=x0, seed=seed, check_assumptions=False)
        checks["assumptions"] = _assumption_flag(fseq, M_s, L_param)
        d = policy.value
        reports["stale_relation"] = check_stale_relation(fresh, traj, fseq, L_param)
        reports["certificate"] = check_potential_certificate(
            fresh, opt, gamma=d + M_s / 2 + L_param + 1,
            rho=stale_bound_general(M_s, L_param, d), L_term=L_param)
        bound = stale_bound_general(M_s, L_param, d)
    elif setting in ("noisy", "noisy-fresh", "noisy-stale"):
        mode = "noisy-stale" if setting == "noisy-stale" else "noisy-fresh"
        policy = DeltaPolicy.noisy(G, L_param)
        traj = run(fseq, mode, policy, NoiseModel.uniform(alpha), x0=x0, seed=seed,
                   check_assumptions=False)
        checks["assumptions"] = _assumption_flag(fseq, M_s, L_param)
        if mode == "noisy-fresh":
            reports["noisy_sandwich"] = check_noisy_sandwich(traj, fseq, alpha, G, L_param, M_s)
            bound = cr_upper_bound("noisy", M_s, L_param, G, alpha)
        else:
            bound = math.nan
    else:
        raise ParameterError(f"unknown setting {setting!r}")
    checks.update({k: r.ok for k, r in reports.items()})
    return traj, checks, bound, reports


def _cell(args) -> list[SweepRow]:
    (M, seed, L_values, settings, T, opt_grid_n, alpha, G, x0, fresh_mode, stale_mode) = args
    fseq = scenario_paper(M, T, seed)
    M_s, L_true = suite_params(M)
    G_used = G if G is not None else L_true + alpha
    opt = opt_dp(fseq, x0, opt_grid_n)
    rows = []
    for L in L_values:
        L_param = L_true if L is None else L
        for setting in settings:
            is_noisy = setting.startswith("noisy")
            a = alpha if is_noisy else 0.0
            g_col = G_used if is_noisy else 0.0
            try:
                traj, checks, bound, _ = run_setting(fseq, setting, M_s, L_param, G_used, alpha,
                                                     seed, opt, x0, fresh_mode, stale_mode)
            except Exception as exc:  # recorded per cell, sweep continues
                rows.append(SweepRow(setting, M, L_param, g_col, a, seed, T, math.nan, opt.cost,
                                     opt.error_bound, math.nan, math.nan, math.nan,
                                     {"run": False}, error=f"{type(exc).__name__}: {exc}"))
                continue
            r = competitive_ratio(traj.total, opt)
            rows.append(SweepRow(setting, M, L_param, g_col, a, seed, T, traj.total, opt.cost,
                                 opt.error_bound, r.ratio, r.ratio_lo, bound, checks,
                                 a4_clips=traj.a4_clips))
    return rows


def worker_count(requested: Optional[int] = None) -> int:
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("OCO_FRUGAL_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def sweep(settings: Sequence[str], M_values: Iterable[float],
          L_values: Optional[Iterable[Optional[float]]] = None, T: int = 100,
          seeds: Iterable[int] = range(5), opt_grid_n: int = 2001,
          alpha: float = DEFAULT_ALPHA, G: Optional[float] = None, x0: float = 0.0,
          fresh_mode: str = "paper", stale_mode: str = "corrected",
          workers: Optional[int] = None) -> list[SweepRow]:
    """Sweep over (M, seed) cells; every setting runs on the same function sequence.

    ``L_values`` are Lipschitz parameters fed to the stale/noisy delta rules;
    ``None`` (the default) uses the suite's true Lipschitz constant ``1.6M``.
    ``G`` defaults to ``1.6M + alpha``, the largest gradient magnitude the
    algorithm can receive. Results are sorted by (setting, M, L, seed).
    """
    settings = list(settings)
    M_values = list(M_values)
    seeds = list(seeds)
    L_values = [None] if L_values is None else list(L_values)
    if not settings or not M_values or not seeds or not L_values:
        raise ParameterError("settings, M_values, L_values and seeds must be nonempty")
    tasks = [(float(M), int(s), L_values, settings, T, opt_grid_n, alpha, G, x0,
              fresh_mode, stale_mode) for M in M_values for s in seeds]
    n = min(worker_count(workers), len(tasks))
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(_cell, tasks))
    else:
        results = [_cell(t) for t in tasks]
    rows = [r for chunk in results for r in chunk]
    rows.sort(key=lambda r: (r.setting, r.M, r.L, r.seed))
    return rows


def linear_fit_r2(x, y) -> tuple[float, float, float]:
    """Least-squares line; returns ``(slope, intercept, r_squared)``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def mean_series(rows: Sequence[SweepRow], setting: str, x_axis: str = "M"):
    """Mean total cost over seeds per x value, for one setting."""
    groups: dict[float, list[float]] = {}
    for r in rows:
        if r.setting == setting and math.isfinite(r.total_cost):
            groups.setdefault(getattr(r, x_axis), []).append(r.total_cost)
    xs = sorted(groups)
    return np.array(xs), np.array([float(np.mean(groups[x])) for x in xs])


# -- CSV -------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, dict):
        return ";".join(f"{k}:{int(bool(b))}" for k, b in sorted(v.items()))
    if isinstance(v, str):
        return v
    return f"{float(v):.10g}"


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(rows, key=lambda r: (r.setting, r.M, r.L, r.seed)):
        w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
    return buf.getvalue()


def emit_csv(rows: Sequence[SweepRow], path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(rows_to_csv(rows))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def _parse_checks(s: str) -> dict:
    if not s:
        return {}
    return {k: v == "1" for k, v in (item.split(":") for item in s.split(";"))}


def read_csv(path) -> list[SweepRow]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read CSV {path}: {exc}") from exc
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(SweepRow(
            rec["setting"], *(float(rec[k]) for k in ("M", "L", "G", "alpha")),
            int(rec["seed"]), int(rec["T"]),
            *(float(rec[k]) for k in ("total_cost", "opt_cost", "opt_error_bound", "ratio",
                                      "ratio_lo", "theorem_bound")),
            _parse_checks(rec["checks_passed"])))
    return rows


# -- SVG -------------------------------------------------------------------------

_COLORS = {"fresh": "#1f77b4", "stale": "#d62728", "noisy": "#2ca02c",
           "noisy-fresh": "#2ca02c", "noisy-stale": "#9467bd"}
_FALLBACK = ("#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f")


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 10))
        v += step
    if ticks[-1] < hi:
        ticks.append(round(ticks[-1] + step, 10))
    return ticks


def _num(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:g}"


def render_svg_linechart(rows: Sequence[SweepRow], x_axis: str, series: Sequence[str],
                         title: Optional[str] = None) -> str:
    if x_axis not in ("M", "L"):
        raise ParameterError(f"x_axis must be 'M' or 'L', got {x_axis!r}")
    data = {}
    for s in series:
        xs, ys = mean_series(rows, s, x_axis)
        if xs.size == 0:
            raise ParameterError(f"missing series {s!r}: no rows with finite cost")
        data[s] = (xs, ys)
    W, H = 640, 420
    left, right, top, bottom = 70, 130, 40, 55
    pw, ph = W - left - right, H - top - bottom
    all_x = np.concatenate([d[0] for d in data.values()])
    all_y = np.concatenate([d[1] for d in data.values()])
    xt = _nice_ticks(float(all_x.min()), float(all_x.max()))
    yt = _nice_ticks(min(0.0, float(all_y.min())), float(all_y.max()))
    x0, x1, y0, y1 = xt[0], xt[-1], yt[0], yt[-1]

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    title = title or f"Total cost of A-OBD vs {x_axis}"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2 - right / 2 + left / 2:.1f}" y="22" font-family="sans-serif" '
        f'font-size="15" text-anchor="middle">{title}</text>',
        '<g stroke="#cccccc" stroke-width="1">',
    ]
    for t in xt:
        out.append(f'<line x1="{_num(px(t))}" y1="{top}" x2="{_num(px(t))}" y2="{top + ph}"/>')
    for t in yt:
        out.append(f'<line x1="{left}" y1="{_num(py(t))}" x2="{left + pw}" y2="{_num(py(t))}"/>')
    out.append("</g>")
    out.append(f'<g stroke="black" stroke-width="1.2"><line x1="{left}" y1="{top + ph}" '
               f'x2="{left + pw}" y2="{top + ph}"/><line x1="{left}" y1="{top}" x2="{left}" '
               f'y2="{top + ph}"/></g>')
    out.append('<g font-family="sans-serif" font-size="11">')
    for t in xt:
        out.append(f'<text x="{_num(px(t))}" y="{top + ph + 16}" text-anchor="middle">'
                   f'{_label(t)}</text>')
    for t in yt:
        out.append(f'<text x="{left - 6}" y="{_num(py(t) + 4)}" text-anchor="end">'
                   f'{_label(t)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 12}" text-anchor="middle" '
               f'font-size="13">{x_axis}</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 16 {top + ph / 2:.1f})">total cost</text>')
    out.append("</g>")
    for k, (s, (xs, ys)) in enumerate(data.items()):
        color = _COLORS.get(s, _FALLBACK[k % len(_FALLBACK)])
        pts = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        for x, y in zip(xs, ys):
            out.append(f'<circle cx="{_num(px(x))}" cy="{_num(py(y))}" r="3" fill="{color}"/>')
        ly = top + 10 + 20 * k
        lx = left + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="12">{s}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_linechart(rows: Sequence[SweepRow], x_axis: str, series: Sequence[str],
                       out_path, title: Optional[str] = None) -> Path:
    """Mean-over-seeds total cost per setting as a static SVG line chart."""
    svg = render_svg_linechart(rows, x_axis, series, title)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(svg)
    return out_path
