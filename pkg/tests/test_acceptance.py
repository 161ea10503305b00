"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line that appears in the pytest
terminal summary.  ``python tests/test_acceptance.py`` prints the same lines
without pytest.
"""

import csv
import hashlib
import io
import math
import time

import numpy as np
from scipy.stats import binomtest

from crqueue import scenario_path
from crqueue.analytic import class1_metrics, class1_steady_state, class2_approx
from crqueue.channel import (ServiceTimeLaw, outage_probability, sample_service_time,
                             service_time_cdf, truncated_mean)
from crqueue.ctmc import (balance_residual, marginal_class1, candidate_balance_residuals,
                          solve_auto)
from crqueue.desim import SimConfig, run_sim
from crqueue.experiments import load_scenario, rows_to_csv, run_scenario
from crqueue.params import ChannelParams, SystemParams

GRID = [(1, 2, 1, 10), (50, 160, 100, 100), (0.5, 1, 0, 20), (5, 2, 3, 15),
        (100, 160, 100, 50)]


def grid_params():
    return [SystemParams(l1, 0.0, mu1=mu, mu2=mu, gamma=g, n1_cap=n) for l1, mu, g, n in GRID]


def crit1_exact_equivalence():
    t0 = time.perf_counter()
    worst, worst_boundary = 0.0, 0.0
    for p in grid_params():
        m = class1_metrics(p)
        model, d = solve_auto(p)
        pi1 = marginal_class1(d)
        i = np.arange(pi1.size)
        ctmc_vals = [pi1[0], i @ pi1, (i @ pi1) / p.lambda1]
        ana_vals = [m.empty_prob, m.mean_len, m.mean_wait]
        worst = max(worst, np.max(np.abs(class1_steady_state(p).probs - pi1)),
                    *(abs(a - c) for a, c in zip(ana_vals, ctmc_vals)))
        worst_boundary = max(worst_boundary, d.boundary_mass)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and worst_boundary <= 1e-9 and dt < 10
    return ok, f"max |analytic - ctmc| = {worst:.2e}, boundary = {worst_boundary:.1e}, {dt:.2f} s"


def crit2_marginal_independence():
    t0 = time.perf_counter()
    base = SystemParams(1, 0.0, mu1=2, mu2=2, gamma=1, n1_cap=10)
    _, d0 = solve_auto(base)
    _, d1 = solve_auto(base.with_(lambda2=0.5 * base.mu2))
    diff = float(np.max(np.abs(marginal_class1(d0) - marginal_class1(d1))))
    dt = time.perf_counter() - t0
    return diff < 1e-6 and dt < 30, f"max marginal difference = {diff:.2e}, {dt:.2f} s"


def crit3_simulation_coverage():
    t0 = time.perf_counter()
    covered, total, misses = 0, 0, []
    for k, p in enumerate(grid_params()):
        m = class1_metrics(p)
        res = run_sim(SimConfig(p, horizon_events=10**6, seed=2024, run_index=k))
        for name, est, exact in (("P0", res.empty_prob1, m.empty_prob),
                                 ("Tq1", res.wait1, m.queue_only_wait),
                                 ("Pover", res.overflow_frac, m.overflow_prob)):
            total += 1
            if est.covers(exact):
                covered += 1
            else:
                misses.append(f"{name}@{GRID[k]}")
    dt = time.perf_counter() - t0
    ok = covered >= 13 and dt < 120
    return ok, f"{covered}/{total} intervals cover, {dt:.1f} s" + (
        f", misses: {' '.join(misses)}" if misses else "")


def crit4_channel_law():
    t0 = time.perf_counter()
    ch = ChannelParams.from_db(0.0, bandwidth=1e6, packet_size=4096, t_out=0.01508)
    law = ServiceTimeLaw.from_channel(ch)
    u = (np.arange(1, 1001) - 0.5) / 1000
    roundtrip = float(np.max(np.abs(service_time_cdf(law, sample_service_time(law, u)) - u)))
    rng = np.random.default_rng(8)
    t = sample_service_time(law, rng.random(10**6))
    mc = float(np.minimum(t, ch.t_out).mean())
    exact = truncated_mean(law, ch.t_out)
    rel = abs(mc - exact) / exact
    hits = int(np.count_nonzero(t > ch.t_out))
    p_out = float(outage_probability(law, ch.t_out))
    ci = binomtest(hits, t.size).proportion_ci(0.99)
    in_ci = ci.low <= p_out <= ci.high
    dt = time.perf_counter() - t0
    ok = roundtrip <= 1e-12 and rel < 0.01 and in_ci and dt < 30
    return ok, (f"round-trip {roundtrip:.1e}, MC rel. error {rel:.2e}, "
                f"P_out {p_out:.5f} in 99% CI [{ci.low:.5f}, {ci.high:.5f}]: {in_ci}, {dt:.1f} s")


def _csv_column(name, column, engine="analytic"):
    rows = list(csv.DictReader(io.StringIO(rows_to_csv(run_scenario(load_scenario(
        scenario_path(name)))))))
    return [float(r[column]) for r in rows if r["engine"] == engine]


def _strict(values, sign):
    return bool(np.all(sign * np.diff(values) > 0))


def crit5_trends():
    checks = {
        "fig5 E[Tq1] down in Q/N0": _strict(_csv_column("fig5", "mean_wait1"), -1),
        "fig6 P0 down in lambda1": _strict(_csv_column("fig6", "empty_prob1"), -1),
        "fig6 sim P0 down in lambda1": _strict(_csv_column("fig6", "empty_prob1", "sim"), -1),
        "fig7 P_reneging down in mu": _strict(_csv_column("fig7", "reneging_prob"), -1),
        "fig7 P_reneging down in n1": _strict(_csv_column("fig7_capacity", "reneging_prob"), -1),
        "fig8 E[Tq2] up in lambda1": _strict(_csv_column("fig8", "mean_wait2"), 1),
        "fig9 E[Tq2] up in lambda1": _strict(_csv_column("fig9", "mean_wait2"), 1),
    }
    bad = [k for k, v in checks.items() if not v]
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} trends strict" + (
        f", failing: {'; '.join(bad)}" if bad else "")


def crit6_point_values():
    infeasible = []
    for l2 in (10, 40, 50):
        for l1 in range(10, 101):
            p = SystemParams(l1, l2, mu1=500, mu2=100, gamma=100, n1_cap=100, omega=0.01)
            c = class2_approx(p)
            if not (c.feasible and math.isfinite(c.mean_wait)):
                infeasible.append((l1, l2))
    w = class1_metrics(SystemParams(150, mu1=160, gamma=100, n1_cap=100)).mean_wait
    ok = not infeasible and 0.004 <= w <= 0.016
    return ok, (f"class-2 approximation feasible at {273 - len(infeasible)}/273 points, "
                f"E[Tq1](150, 160, 100, 100) = {w:.5f}")


def crit7_conservation_determinism():
    broken = []
    for name in ("fig6", "crossval", "channel_sim"):
        for row in run_scenario(load_scenario(scenario_path(name))):
            if row["engine"] == "sim" and not (row["status"] == "ok" and row["conserved"]):
                broken.append(f"{name}@{row['sweep_value']}")
    p = SystemParams(1.5, 0.4, mu1=2, mu2=2, gamma=1, n1_cap=5)
    for seed in range(20):
        for mode in ("resume", "repeat"):
            if not run_sim(SimConfig(p, horizon_events=20000, seed=seed,
                                     preemption_mode=mode)).conserved():
                broken.append(f"seed {seed} {mode}")
    s = load_scenario(scenario_path("fig6")).with_(events=50000)
    digests = {hashlib.sha256(rows_to_csv(run_scenario(s)).encode()).hexdigest()
               for _ in range(2)}
    ok = not broken and len(digests) == 1
    return ok, (f"conservation violations: {len(broken)}, "
                f"identical CSV hashes across runs: {len(digests) == 1}")


def crit8_residual_audit():
    cases = [SystemParams(1, 1, mu1=2, mu2=2, gamma=1, n1_cap=10),
             SystemParams(50, 40, mu1=500, mu2=100, gamma=100, n1_cap=100),
             SystemParams(0.5, 0.2, mu1=1, mu2=1, gamma=0, n1_cap=20)]
    worst = 0.0
    report = []
    for p in cases:
        model, d = solve_auto(p)
        worst = max(worst, balance_residual(d, model))
        forms = candidate_balance_residuals(d, p)
        tags = ",".join(f"{k}:{'ok' if v < 1e-10 else 'violated'}"
                        for k, v in forms.items())
        report.append(f"gamma={p.gamma:g} [{tags}]")
    return worst < 1e-10, f"generator residual {worst:.1e}; hand-written balance forms " + "; ".join(report)


CRITERIA = [
    ("1 exact-regime equivalence", crit1_exact_equivalence),
    ("2 class-1 marginal independence", crit2_marginal_independence),
    ("3 simulation coverage", crit3_simulation_coverage),
    ("4 channel law", crit4_channel_law),
    ("5 trend reproduction", crit5_trends),
    ("6 point values", crit6_point_values),
    ("7 conservation and determinism", crit7_conservation_determinism),
    ("8 balance residual audit", crit8_residual_audit),
]


def _verdict(label, fn):
    ok, detail = fn()
    line = f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}"
    print(line)
    return ok, line


def _check(label, fn, report_line):
    ok, line = _verdict(label, fn)
    report_line(line)
    assert ok, line


def test_criterion_1(report_line):
    _check(*CRITERIA[0], report_line)


def test_criterion_2(report_line):
    _check(*CRITERIA[1], report_line)


def test_criterion_3(report_line):
    _check(*CRITERIA[2], report_line)


def test_criterion_4(report_line):
    _check(*CRITERIA[3], report_line)


def test_criterion_5(report_line):
    _check(*CRITERIA[4], report_line)


def test_criterion_6(report_line):
    _check(*CRITERIA[5], report_line)


def test_criterion_7(report_line):
    _check(*CRITERIA[6], report_line)


def test_criterion_8(report_line):
    _check(*CRITERIA[7], report_line)


if __name__ == "__main__":
    import sys

    results = [_verdict(label, fn)[0] for label, fn in CRITERIA]
    sys.exit(0 if all(results) else 1)
