"""Batch command-line front end: scenario JSON in, CSV tables out.

Subcommands map one-to-one onto the package's experiment protocols
(distribution fits, outage sweeps, adaptive-rate trajectories, average-SNR
sweeps) plus a self-check.  Every command is deterministic given the
scenario file and seed; rerunning produces byte-identical CSV.  Figures are
meant to be produced externally from the CSV (no plotting dependency here).
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import a2g, g2a, mc_oracle, performance, specfun
from .a2g import DelayedPsc, characterize_a2g
from .performance import AdaptivePolicy, OutageQuery
from .scenario import (
    ArrayShape,
    Scenario,
    ScenarioError,
    build_a2g_link,
    build_g2a_link,
    default_scenario,
    scenario_from_json,
)

__all__ = [
    "main",
    "cmd_g2a_dist",
    "cmd_a2g_dist",
    "cmd_eop",
    "cmd_trajectory",
    "cmd_avg_snr",
    "cmd_validate",
]


def _write_csv(path: str, header: list[str], rows) -> str:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return path


def _square_or_line(n: int) -> ArrayShape:
    """Prefer a square layout when n is a perfect square, else a line."""
    r = math.isqrt(n)
    return ArrayShape(r, r) if r * r == n else ArrayShape(n, 1)


# ---------------------------------------------------------------------------
# Subcommand bodies (importable; the argparse shell just dispatches here)
# ---------------------------------------------------------------------------


def cmd_g2a_dist(
    sc: Scenario,
    out_dir: str,
    antenna_counts: list[int] | None = None,
    n_points: int = 401,
    with_mc: bool = True,
    trials: int | None = None,
) -> list[str]:
    """Ground-to-air SNR law on a grid, one CSV per antenna count.

    Columns: x, pdf_analytic, cdf_analytic and, with Monte Carlo enabled,
    ecdf_mc plus the pointwise |ecdf - cdf| gap.
    """
    counts = antenna_counts or [sc.bs_array.size]
    trials = trials or sc.n_trials
    paths = []
    for idx, m in enumerate(counts):
        sc_m = replace(sc, bs_array=_square_or_line(m))
        link, los = build_g2a_link(sc_m)
        x_max = 4.0 * g2a.g2a_mean(link)
        x = np.linspace(x_max / n_points, x_max, n_points)
        pdf = g2a.g2a_pdf(link, x)
        cdf = g2a.g2a_cdf(link, x)
        if with_mc:
            batch = mc_oracle.sim_g2a(link, trials, sc.seed + 7 * idx, los=los)
            emp = mc_oracle.ecdf(batch, x)
            rows = zip(x, pdf, cdf, emp, np.abs(emp - cdf))
            header = ["x", "pdf_analytic", "cdf_analytic", "ecdf_mc", "ks_gap"]
        else:
            rows = zip(x, pdf, cdf)
            header = ["x", "pdf_analytic", "cdf_analytic"]
        paths.append(
            _write_csv(os.path.join(out_dir, f"g2a_dist_M{m}.csv"), header, rows)
        )
    return paths


def cmd_a2g_dist(
    sc: Scenario,
    out_dir: str,
    n_points: int = 401,
    with_mc: bool = True,
    trials: int | None = None,
) -> list[str]:
    """Air-to-ground SNR law on a grid; same column layout as g2a-dist."""
    trials = trials or sc.n_trials
    link, psc = build_a2g_link(sc)
    chr_ = characterize_a2g(link, psc)
    x_max = 5.0 * a2g.avg_a2g_snr(link, psc)
    x = np.linspace(x_max / n_points, x_max, n_points)
    pdf = a2g.a2g_pdf(chr_, x)
    cdf = a2g.a2g_cdf(chr_, x)
    if with_mc:
        batch = mc_oracle.sim_a2g(link, psc, trials, sc.seed + 3)
        emp = mc_oracle.ecdf(batch, x)
        rows = zip(x, pdf, cdf, emp, np.abs(emp - cdf))
        header = ["x", "pdf_analytic", "cdf_analytic", "ecdf_mc", "ks_gap"]
    else:
        rows = zip(x, pdf, cdf)
        header = ["x", "pdf_analytic", "cdf_analytic"]
    n = sc.ris_array.size
    return [_write_csv(os.path.join(out_dir, f"a2g_dist_N{n}.csv"), header, rows)]


def cmd_eop(
    sc: Scenario,
    out_dir: str,
    p_min_dbm: float = -10.0,
    p_max_dbm: float = 30.0,
    p_step_db: float = 5.0,
    with_mc: bool = True,
    trials: int | None = None,
) -> list[str]:
    """End-to-end outage probability against transmit power (both hops)."""
    trials = trials or sc.n_trials
    q = OutageQuery(target_se=sc.target_se_bps_hz)
    n_steps = int(round((p_max_dbm - p_min_dbm) / p_step_db))
    powers = [p_min_dbm + i * p_step_db for i in range(n_steps + 1)]
    rows = []
    for i, p in enumerate(powers):
        sc_p = replace(sc, p_s_dbm=p, p_u_dbm=p)
        g2a_link, _ = build_g2a_link(sc_p)
        a2g_link, psc = build_a2g_link(sc_p)
        chr_ = characterize_a2g(a2g_link, psc)
        analytic = performance.eop(g2a_link, chr_, q)
        floor = performance.eop_floor(g2a_link, q)
        mc = (
            mc_oracle.sim_eop(sc_p, q, trials, sc.seed + 11 * i)
            if with_mc
            else None
        )
        rows.append((p, analytic, mc, floor))
    path = os.path.join(out_dir, "eop_sweep.csv")
    performance.eop_sweep_to_csv(path, rows)
    return [path]


def cmd_trajectory(
    sc: Scenario,
    out_dir: str,
    steps: int = 50,
    policy_l: float | None = None,
) -> list[str]:
    """Outage/SE series along the leader-follower trajectory.

    With a policy budget the rate adapts per location; otherwise the
    scenario's fixed target SE is evaluated.
    """
    if policy_l is not None:
        points = performance.eop_trajectory(
            sc, steps, policy=AdaptivePolicy(outage_budget=policy_l)
        )
    else:
        points = performance.eop_trajectory(
            sc, steps, query=OutageQuery(target_se=sc.target_se_bps_hz)
        )
    path = os.path.join(out_dir, "trajectory.csv")
    performance.eop_trajectory_to_csv(path, points)
    return [path]


def cmd_avg_snr(
    sc: Scenario,
    out_dir: str,
    sweep: str = "tk",
    tk_max: int = 1000,
    tk_step: int = 1,
    n_list: list[int] | None = None,
    with_mc: bool = True,
    trials: int | None = None,
    mc_every: int | None = None,
) -> list[str]:
    """Average air-to-ground SNR swept over aging delay or surface size.

    Monte Carlo means are expensive, so with_mc samples every ``mc_every``
    rows (markers on an analytic curve); the remaining rows leave the MC
    column blank.
    """
    trials = trials or sc.n_trials
    rows: list = []
    if sweep == "tk":
        every = mc_every or 50
        grid = list(range(1, tk_max + 1, tk_step))
        header = ["t_k", "avg_snr_db", "avg_snr_mc_db"]
        for j, t in enumerate(grid):
            sc_t = replace(sc, aging_samples=int(t))
            link, psc = build_a2g_link(sc_t)
            avg_db = 10.0 * math.log10(a2g.avg_a2g_snr(link, psc))
            mc = ""
            if with_mc and j % every == 0:
                batch = mc_oracle.sim_a2g(link, psc, trials, sc.seed + 13 * j)
                mc = 10.0 * math.log10(float(np.mean(batch.samples)))
            rows.append((t, avg_db, mc))
        path = os.path.join(out_dir, "avg_snr_vs_tk.csv")
    elif sweep == "n":
        every = mc_every or 1
        grid = n_list or [4, 16, 64, 256, 784, 1024]
        header = ["n_elements", "avg_snr_db", "avg_snr_mc_db"]
        for j, n in enumerate(grid):
            sc_n = replace(sc, ris_array=_square_or_line(n), ris_amplitude=1.0)
            link, psc = build_a2g_link(sc_n)
            avg_db = 10.0 * math.log10(a2g.avg_a2g_snr(link, psc))
            mc = ""
            if with_mc and j % every == 0:
                batch = mc_oracle.sim_a2g(link, psc, trials, sc.seed + 17 * j)
                mc = 10.0 * math.log10(float(np.mean(batch.samples)))
            rows.append((n, avg_db, mc))
        path = os.path.join(out_dir, "avg_snr_vs_n.csv")
    else:
        raise ValueError("sweep must be 'tk' or 'n'")
    return [_write_csv(path, header, rows)]


# ---------------------------------------------------------------------------
# Self-check
# ---------------------------------------------------------------------------


def _validate_checks(sc: Scenario, trials: int):
    """Yield (name, passed, detail) for the invariant suite."""
    from scipy.integrate import quad

    rng = np.random.default_rng(np.random.SeedSequence(sc.seed, spawn_key=(0xC3ED,)))

    # Special-function layer: normalization and identity checks.
    worst = 0.0
    for k, lam, scale in [(1.0, 0.5, 1.0), (3.0, 2.0, 0.5), (2.5, 4.0, 2.0)]:
        p = specfun.NoncentralChi2Params(k, lam, scale)
        total, _ = quad(lambda x: specfun.ncchi2_pdf(p, x), 0.0, p.mean + 40 * math.sqrt(p.variance), limit=200)
        worst = max(worst, abs(total - 1.0))
    yield "ncchi2-pdf-normalization", worst < 1e-7, f"max |integral-1| = {worst:.3e}"

    worst = 0.0
    for k, lam in [(1.0, 0.5), (3.0, 2.0), (2.5, 4.0)]:
        p = specfun.NoncentralChi2Params(k, lam, 1.0)
        for x in (0.1, 1.0, 3.0, 10.0):
            via_q = 1.0 - specfun.marcum_q(k, math.sqrt(2 * lam), math.sqrt(2 * x))
            worst = max(worst, abs(specfun.ncchi2_cdf(p, x) - via_q))
    yield "ncchi2-cdf-marcum", worst < 1e-10, f"max gap = {worst:.3e}"

    worst = 0.0
    for _ in range(100):
        k = rng.uniform(0.5, 8.0)
        lam = rng.uniform(0.0, 10.0)
        scale = rng.uniform(0.1, 5.0)
        km = specfun.kappa_mu_convert(specfun.NoncentralChi2Params(k, lam, scale))
        back = specfun.kappa_mu_invert(km)
        worst = max(
            worst,
            abs(back.shape - k) / k,
            abs(back.noncentrality - lam) / max(lam, 1e-30),
            abs(back.scale - scale) / scale,
        )
    yield "kappa-mu-roundtrip", worst < 1e-10, f"max rel err = {worst:.3e}"

    worst = 0.0
    for _ in range(1000):
        k = rng.uniform(0.5, 20.0)
        lam = rng.uniform(0.05, 30.0)
        scale = rng.uniform(0.05, 10.0)
        p = specfun.NoncentralChi2Params(k, lam, scale)
        m = a2g.MomentTriple(p.mean, p.variance, p.third_central_moment)
        back = a2g.match_ncchi2(m)
        worst = max(
            worst,
            abs(back.shape - k) / k,
            abs(back.noncentrality - lam) / lam,
            abs(back.scale - scale) / scale,
        )
    yield "estimator-roundtrip", worst < 1e-9, f"max rel err = {worst:.3e}"

    worst = max(
        abs(specfun.q_func(specfun.q_inv(p)) - p) for p in (1e-6, 1e-4, 0.1, 0.5, 0.9)
    )
    yield "qfunc-roundtrip", worst < 1e-12, f"max gap = {worst:.3e}"

    # Ground-to-air layer: dual analytic routes must coincide.
    link, _ = build_g2a_link(sc)
    mix = g2a.mixture_params(link)
    gap = abs(float(np.sum(mix.weights)) - 1.0)
    yield "g2a-weights-sum", gap < 1e-12, f"|sum-1| = {gap:.3e}"

    x = np.linspace(link.mean_snr * 0.01, link.mean_snr * link.n_antennas * 3, 200)
    p_mix = g2a.g2a_pdf(link, x)
    p_dir = g2a.g2a_pdf_direct(link, x)
    rel = float(np.max(np.abs(p_mix - p_dir) / np.maximum(np.abs(p_mix), 1e-300)))
    yield "g2a-dual-route", rel < 1e-9, f"max rel gap = {rel:.3e}"

    c = g2a.g2a_cdf(link, x)
    mono = bool(np.all(np.diff(c) >= -1e-12) and c[0] >= 0 and c[-1] <= 1)
    yield "g2a-cdf-monotone", mono, f"range [{c[0]:.3e}, {c[-1]:.6f}]"

    xg = np.linspace(1e-9, link.mean_snr * link.n_antennas * 12, 20001)
    total = float(np.trapezoid(g2a.g2a_pdf(link, xg), xg))
    yield "g2a-pdf-normalization", abs(total - 1.0) < 1e-5, f"|integral-1| = {abs(total-1.0):.3e}"

    # Air-to-ground layer: CF bounds, law sanity, mean identity.
    a2g_link, psc = build_a2g_link(sc)
    nel = a2g_link.n_elements
    est_in = rng.standard_normal(nel) + 1j * rng.standard_normal(nel)
    est_out = rng.standard_normal(nel) + 1j * rng.standard_normal(nel)
    phases = rng.uniform(-math.pi, math.pi, nel)
    worst = 0.0
    at_zero = abs(a2g.conditional_cf(a2g_link, phases, est_in, est_out, 0.0) - 1.0)
    for w in (0.3, 1.0, 2.7, 9.1, 0.5 + 1.2j, -2.0 + 0.4j):
        worst = max(worst, abs(a2g.conditional_cf(a2g_link, phases, est_in, est_out, w)) - 1.0)
    ok = worst < 1e-12 and at_zero < 1e-12
    yield "conditional-cf-bounds", ok, f"max |CF|-1 = {worst:.3e}, |CF(0)-1| = {at_zero:.3e}"

    chr_ = characterize_a2g(a2g_link, psc)
    exact_mean = a2g.avg_a2g_snr(a2g_link, psc)
    rel = abs(chr_.mean - exact_mean) / exact_mean
    yield "a2g-mean-identity", rel < 1e-6, f"rel gap = {rel:.3e}"

    zg = np.linspace(exact_mean * 1e-4, exact_mean * 8, 4001)
    pz = a2g.a2g_pdf(chr_, zg)
    total = float(np.trapezoid(pz, zg))
    yield "a2g-pdf-normalization", abs(total - 1.0) < 5e-3, f"|integral-1| = {abs(total-1.0):.3e}"

    cz = a2g.a2g_cdf(chr_, zg)
    mono = bool(np.all(np.diff(cz) >= -1e-10) and cz[0] >= 0 and cz[-1] <= 1)
    yield "a2g-cdf-monotone", mono, f"range [{cz[0]:.3e}, {cz[-1]:.6f}]"

    # Monte Carlo gates (loose thresholds; the acceptance tests are stricter).
    # KS sampling noise scales as 1/sqrt(n), so the gate keeps a noise floor.
    n_mc = min(trials, 20_000)
    ks_gate = max(0.02, 1.7 / math.sqrt(n_mc))
    batch = mc_oracle.sim_g2a(link, n_mc, sc.seed + 101)
    ks = mc_oracle.ks_stat(batch, lambda v: g2a.g2a_cdf(link, v))
    yield "g2a-ks-gate", ks < ks_gate, f"KS = {ks:.4f} (n = {n_mc})"

    small = replace(sc, ris_array=ArrayShape(2, 2))
    s_link, s_psc = build_a2g_link(small)
    s_chr = characterize_a2g(s_link, s_psc)
    s_batch = mc_oracle.sim_a2g(s_link, s_psc, n_mc, sc.seed + 103)
    kl = mc_oracle.kl_vs_pdf(s_batch, cdf=lambda v: a2g.a2g_cdf(s_chr, v))
    yield "a2g-kl-gate", kl < 0.05, f"KL = {kl:.4f} (N = 4, n = {n_mc})"

    batch = mc_oracle.sim_a2g(a2g_link, psc, n_mc, sc.seed + 105)
    ks = mc_oracle.ks_stat(batch, lambda v: a2g.a2g_cdf(chr_, v))
    yield "a2g-ks-gate", ks < ks_gate + 0.005, f"KS = {ks:.4f} (N = {nel}, n = {n_mc})"


def cmd_validate(sc: Scenario, out_dir: str, trials: int | None = None) -> int:
    """Run the invariant suite; print one line per check, write a report CSV,
    and return a nonzero status if anything failed."""
    trials = trials or sc.n_trials
    rows = []
    failed = 0
    for name, ok, detail in _validate_checks(sc, trials):
        status = "PASS" if ok else "FAIL"
        if not ok:
            failed += 1
        print(f"{status} {name}: {detail}")
        rows.append((name, status, detail))
    _write_csv(os.path.join(out_dir, "validate_report.csv"),
               ["check", "status", "detail"], rows)
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--scenario", help="scenario JSON file (defaults built in)")
    shared.add_argument("--seed", type=int, help="override the scenario seed")
    shared.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    shared.add_argument("--out", default="out", help="output directory (default: ./out)")
    shared.add_argument("--no-mc", action="store_true", help="skip Monte Carlo columns")

    p = argparse.ArgumentParser(
        prog="aerolink",
        description="Relay-over-reflecting-surface link analysis: CSV experiment tables.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("g2a-dist", parents=[shared], help="ground-to-air SNR pdf/cdf tables")
    g.add_argument("--antennas", default=None,
                   help="comma list of antenna counts (default: scenario value)")
    g.add_argument("--points", type=int, default=401)

    a = sub.add_parser("a2g-dist", parents=[shared], help="air-to-ground SNR pdf/cdf table")
    a.add_argument("--points", type=int, default=401)

    e = sub.add_parser("eop", parents=[shared], help="outage vs transmit power sweep")
    e.add_argument("--p-min-dbm", type=float, default=-10.0)
    e.add_argument("--p-max-dbm", type=float, default=30.0)
    e.add_argument("--p-step-db", type=float, default=5.0)

    t = sub.add_parser("trajectory", parents=[shared], help="outage/SE along a mobility trace")
    t.add_argument("--steps", type=int, default=50)
    t.add_argument("--policy-L", type=float, default=None, dest="policy_l",
                   help="adaptive outage budget; omit for fixed-rate evaluation")

    s = sub.add_parser("avg-snr", parents=[shared], help="average SNR sweeps")
    s.add_argument("--sweep", choices=["tk", "n"], default="tk")
    s.add_argument("--tk-max", type=int, default=1000)
    s.add_argument("--tk-step", type=int, default=1)
    s.add_argument("--n-list", default=None, help="comma list of element counts")
    s.add_argument("--mc-every", type=int, default=None,
                   help="sample the MC column every k-th row")

    sub.add_parser("validate", parents=[shared], help="run the invariant suite")
    return p


def _load_scenario(args) -> Scenario:
    sc = scenario_from_json(args.scenario) if args.scenario else default_scenario()
    env_seed = os.environ.get("AEROLINK_SEED")
    if env_seed is not None:
        try:
            sc = replace(sc, seed=int(env_seed))
        except ValueError:
            raise ScenarioError("AEROLINK_SEED", f"expected an integer, got {env_seed!r}") from None
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    if args.trials is not None:
        if args.trials < 1:
            raise ScenarioError("--trials", "must be >= 1")
        sc = replace(sc, n_trials=args.trials)
    return sc


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        sc = _load_scenario(args)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    with_mc = not args.no_mc

    if args.command == "g2a-dist":
        counts = [int(v) for v in args.antennas.split(",")] if args.antennas else None
        paths = cmd_g2a_dist(sc, args.out, antenna_counts=counts,
                             n_points=args.points, with_mc=with_mc)
    elif args.command == "a2g-dist":
        paths = cmd_a2g_dist(sc, args.out, n_points=args.points, with_mc=with_mc)
    elif args.command == "eop":
        paths = cmd_eop(sc, args.out, p_min_dbm=args.p_min_dbm,
                        p_max_dbm=args.p_max_dbm, p_step_db=args.p_step_db,
                        with_mc=with_mc)
    elif args.command == "trajectory":
        paths = cmd_trajectory(sc, args.out, steps=args.steps, policy_l=args.policy_l)
    elif args.command == "avg-snr":
        n_list = [int(v) for v in args.n_list.split(",")] if args.n_list else None
        paths = cmd_avg_snr(sc, args.out, sweep=args.sweep, tk_max=args.tk_max,
                            tk_step=args.tk_step, n_list=n_list, with_mc=with_mc,
                            mc_every=args.mc_every)
    elif args.command == "validate":
        return cmd_validate(sc, args.out)
    else:  # pragma: no cover - argparse enforces the choices
        raise AssertionError(args.command)

    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
