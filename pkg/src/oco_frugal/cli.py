"""Command line entry point: ``oco-frugal {run,sweep,lowerbound,verify,plot}``.

Exit codes: 0 success, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import jsonschema

from . import adversary, config as cfg
from .algorithm import aobd_step, delta_fresh
from .analysis import competitive_ratio, total_cost
from .experiments import (emit_csv, emit_svg_linechart, read_csv, run_setting, scenario_paper,
                          suite_params, sweep)
from .offline import opt_dp

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oco-frugal", description="A-OBD under frugal gradient information.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="single scenario; prints ledger and checks")
    r.add_argument("--setting", default="fresh",
                   choices=["fresh", "stale", "noisy", "noisy-fresh", "noisy-stale"])
    r.add_argument("--M", type=float, default=10.0)
    r.add_argument("--L", type=float, default=None, help="Lipschitz parameter (default 1.6M)")
    r.add_argument("--G", type=float, default=None, help="gradient bound (default 1.6M + alpha)")
    r.add_argument("--alpha", type=float, default=0.5)
    r.add_argument("--T", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--x0", type=float, default=0.0)
    r.add_argument("--grid-n", type=int, default=2001)
    r.add_argument("--fresh-mode", choices=["paper", "balanced"], default="paper")
    r.add_argument("--stale-mode", choices=["corrected", "literal"], default="corrected")
    r.add_argument("--steps", action="store_true", help="print every step")
    r.add_argument("--report", type=Path, help="write a JSON run report")

    s = sub.add_parser("sweep", help="cost-vs-M / cost-vs-L sweeps to CSV and SVG")
    s.add_argument("--config", type=Path)
    s.add_argument("--M", dest="M", help="values, e.g. 2:50:8 or 2,10,50")
    s.add_argument("--L", dest="L", help="Lipschitz parameters for stale/noisy (default 1.6M)")
    s.add_argument("--T", type=int)
    s.add_argument("--seeds", help="count (5) or explicit list (0,3,7)")
    s.add_argument("--settings", help="comma list of fresh,stale,noisy")
    s.add_argument("--alpha", type=float)
    s.add_argument("--G", type=float)
    s.add_argument("--grid-n", dest="grid_n", type=int)
    s.add_argument("--x0", type=float)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", help="output directory")

    lb = sub.add_parser("lowerbound", help="fresh and stale lower-bound games")
    lb.add_argument("--M", default="10,25,50")
    lb.add_argument("--grad-mag", type=float, default=None, help="default 2M/5")
    lb.add_argument("--grid-n", type=int, default=10001)
    lb.add_argument("--L", type=float, default=30.0)

    v = sub.add_parser("verify", help="invariant and oracle suite")
    v.add_argument("--quick", action="store_true")

    pl = sub.add_parser("plot", help="CSV to SVG line chart")
    pl.add_argument("--csv", type=Path, required=True)
    pl.add_argument("--x", choices=["M", "L"], default="M")
    pl.add_argument("--settings", default=None)
    pl.add_argument("--out", type=Path, required=True)
    return p


def _cmd_run(a) -> int:
    M_s, L_true = suite_params(a.M)
    L = a.L if a.L is not None else L_true
    G = a.G if a.G is not None else L_true + a.alpha
    fseq = scenario_paper(a.M, a.T, a.seed)
    opt = opt_dp(fseq, a.x0, a.grid_n)
    traj, checks, bound, reports = run_setting(fseq, a.setting, M_s, L, G, a.alpha, a.seed, opt,
                                               a.x0, a.fresh_mode, a.stale_mode)
    led = total_cost(traj, fseq)
    ratio = competitive_ratio(led.total, opt)
    print(f"setting={a.setting} M={a.M:g} (smoothness {M_s:g}) L={L:g} T={a.T} seed={a.seed}")
    if a.steps:
        print(f"{'t':>4} {'x_prev':>10} {'x_t':>10} {'delta':>9} {'H_t':>11} {'M_t':>10}")
        for st, hit, mv in zip(traj.steps, led.hits, led.moves):
            print(f"{st.t:>4} {st.x_prev:>10.6f} {st.x_new:>10.6f} {st.delta:>9.5f} "
                  f"{hit:>11.6f} {mv:>10.6f}")
    print(f"hitting={led.hits.sum():.6f} switching={led.moves.sum():.6f} total={led.total:.6f}")
    print(f"opt={opt.cost:.6f} (+/- {opt.error_bound:.3g}) ratio={ratio.ratio:.4f} "
          f"ratio_lo={ratio.ratio_lo:.4f} theorem_bound={bound:.4f}")
    if traj.a4_clips:
        print(f"A4 clips: {traj.a4_clips}")
    for name, ok in checks.items():
        print(f"check {name}: {'PASS' if ok else 'FAIL'}")
    if a.report:
        doc = {
            "setting": a.setting, "M": a.M, "L": L, "G": G, "alpha": a.alpha, "T": a.T,
            "seed": a.seed, "total_cost": led.total, "opt_cost": opt.cost,
            "opt_error_bound": opt.error_bound, "ratio": ratio.ratio, "ratio_lo": ratio.ratio_lo,
            "theorem_bound": bound, "a4_clips": traj.a4_clips, "checks": checks,
            "reports": {k: r.to_dict() for k, r in reports.items()},
            "trajectory": traj.xs.tolist(),
        }
        a.report.parent.mkdir(parents=True, exist_ok=True)
        a.report.write_text(json.dumps(doc, indent=2, default=float))
    return EXIT_OK if all(checks.values()) else EXIT_CHECK


def _cmd_sweep(a) -> int:
    try:
        conf = cfg.load_config(a.config) if a.config else {}
    except (OSError, ValueError, jsonschema.ValidationError) as exc:
        print(f"oco-frugal sweep: bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    over = {k: getattr(a, k) for k in ("M", "L", "T", "seeds", "alpha", "G", "grid_n", "x0",
                                       "out", "workers")}
    over["settings"] = a.settings.split(",") if a.settings else None
    c = cfg.merged(conf, over)
    try:
        M_values = cfg.parse_values(c["M"])
        L_values = cfg.parse_values(c["L"]) or None
        seeds = cfg.parse_seeds(c["seeds"])
    except ValueError as exc:
        print(f"oco-frugal sweep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = sweep(c["settings"], M_values, L_values, c["T"], seeds, c["grid_n"], c["alpha"],
                 c["G"], c["x0"], c["fresh_mode"], c["stale_mode"], c["workers"])
    out = Path(c["out"])
    emit_csv(rows, out / "sweep.csv")
    print(f"wrote {out / 'sweep.csv'} ({len(rows)} rows)")
    if len(M_values) > 1:
        emit_svg_linechart(rows, "M", c["settings"], out / "cost_vs_M.svg")
        print(f"wrote {out / 'cost_vs_M.svg'}")
    if L_values and len(L_values) > 1:
        series = [s for s in c["settings"] if s != "fresh"] or c["settings"]
        emit_svg_linechart(rows, "L", series, out / "cost_vs_L.svg")
        print(f"wrote {out / 'cost_vs_L.svg'}")
    # rows whose inputs violate the claimed constants are reported, not failures
    bad = [r for r in rows if r.error or (r.checks_passed.get("assumptions", True)
                                          and not r.all_passed)]
    skipped = sum(1 for r in rows if not r.checks_passed.get("assumptions", True))
    if skipped:
        print(f"{skipped} rows use L below the true Lipschitz constant; bounds not asserted")
    for r in bad[:10]:
        print(f"FAIL {r.setting} M={r.M:g} L={r.L:g} seed={r.seed}: {r.checks_passed} {r.error}")
    return EXIT_CHECK if bad else EXIT_OK


def _cmd_lowerbound(a) -> int:
    ok = True
    for M in cfg.parse_values(a.M):
        inst = adversary.make_game(M, a.grad_mag)
        r, x = adversary.sweep_first_action(inst, a.grid_n)
        exact, xe = adversary.exact_min_max_ratio(inst)
        aobd = adversary.play_game(lambda obs: aobd_step(obs, 0.0, delta_fresh(M)), M, a.grad_mag)
        print(f"M={M:g} grad_mag={inst.grad_mag:g}: min_max_ratio={r:.6f} at x1={x:.4f} "
              f"(exact {exact:.6f} at {xe:.4f}); 2M/135={2 * M / 135:.6f}; "
              f"A-OBD picks x1={aobd.x1:.4f} -> {aobd.chosen}, ratio {aobd.ratio:.4f}")
        print(f"  {'interval':<9}{'lo':>9}{'hi':>9}  resp  {'best x1':>9}{'ratio':>10}{'listed':>10}")
        for row in adversary.interval_table(inst):
            print(f"  {row['interval']:<9}{row['lo']:>9.4f}{row['hi']:>9.4f}  {row['response']:<4}"
                  f"  {row['best_x1']:>9.4f}{row['ratio']:>10.4f}{row['listed']:>10.4f}")
        ok &= r >= 2 * M / 135
    g = adversary.stale_lb_game(0.0, a.L)
    print(f"stale game L={a.L:g}: x1=0 -> {g.chosen}, ratio {g.ratio:g}; any x1>0 -> h1, ratio inf")
    ok &= g.ratio >= a.L or a.L < 1
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_verify(a) -> int:
    from .verify import run_all

    results = run_all(quick=a.quick)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}  {r.detail}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_CHECK


def _cmd_plot(a) -> int:
    rows = read_csv(a.csv)
    settings = (a.settings.split(",") if a.settings
                else sorted({r.setting for r in rows if a.x == "M" or r.setting != "fresh"}))
    emit_svg_linechart(rows, a.x, settings, a.out)
    print(f"wrote {a.out}")
    return EXIT_OK


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "lowerbound": _cmd_lowerbound,
               "verify": _cmd_verify, "plot": _cmd_plot}[args.cmd]
    try:
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"oco-frugal {args.cmd}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
