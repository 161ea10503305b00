"""Scenario files, parameter sweeps, cross-engine validation and CSV output.

A scenario is a flat ``key = value`` file::

    # Empty probability against class-1 load
    name = fig6
    engines = analytic, sim
    lambda1 = 25
    mu1 = 160
    gamma = 100
    n1 = 100
    sweep = lambda1; values = 25:150:25

``values`` accepts ``a:b:step`` (inclusive) or a comma list and may also be
given on its own line.  ``mu1 = auto_channel`` sets the class-1 service rate
to ``1 / E[min(T, t_out)]`` of the link at every sweep point.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import analytic, channel as chan, ctmc, desim
from .params import ChannelParams, PatienceSpec, SystemParams, check_qos, validate_stability

ENGINES = ("analytic", "ctmc", "sim")
AUTO = "auto_channel"

_FLOAT_KEYS = {"lambda1", "lambda2", "gamma", "epsilon", "omega", "q_over_n0_db",
               "bandwidth", "packet_size", "t_out", "g_ss", "g_sp"}
_RATE_KEYS = {"mu1", "mu2"}          # float or auto_channel
_INT_KEYS = {"n1", "reps", "seed", "events", "batches"}
SWEEPABLE = _FLOAT_KEYS | _RATE_KEYS | {"n1"}
_OTHER_KEYS = {"name", "engines", "sweep", "values", "patience", "service_mode",
               "preemption", "warmup"}
KNOWN_KEYS = _FLOAT_KEYS | _RATE_KEYS | _INT_KEYS | _OTHER_KEYS
REQUIRED_KEYS = ("lambda1", "mu1")


class ScenarioError(ValueError):
    """Parse or validation failure; ``errors`` holds ``(line, message)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(f"line {ln}: {msg}" if ln else msg for ln, msg in self.errors))


@dataclass(frozen=True)
class Scenario:
    name: str
    engines: tuple
    values: dict                       # base parameter values, keyed as in the file
    sweep_var: Optional[str] = None
    sweep_values: tuple = ()
    reps: int = 1
    seed: int = 0
    events: int = 200_000
    batches: int = 32
    warmup: float = 0.2
    patience: Optional[PatienceSpec] = None
    service_mode: str = "markovian"
    preemption: str = "resume"

    @property
    def has_channel(self) -> bool:
        return "q_over_n0_db" in self.values

    def points(self) -> list:
        """``(sweep_value, values)`` per sweep point; a single point without a sweep."""
        if self.sweep_var is None:
            return [(None, dict(self.values))]
        return [(v, {**self.values, self.sweep_var: v}) for v in self.sweep_values]

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


_DEFAULTS = {"lambda2": 0.0, "gamma": 0.0, "n1": 100, "epsilon": math.inf, "omega": 0.01,
             "bandwidth": 1e6, "packet_size": 4096.0, "t_out": 0.01508, "g_ss": 1.0, "g_sp": 1.0}


def expand_values(text: str) -> list:
    text = text.strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"range must be a:b:step, got {text!r}")
        a, b, step = parts
        if not step > 0 or b < a:
            raise ValueError(f"empty or ill-formed range {text!r}")
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        out = [round(a + k * step, 12) for k in range(n)]
    else:
        out = [float(x) for x in text.split(",") if x.strip()]
    if not out or not all(math.isfinite(v) for v in out):
        raise ValueError(f"value list must be nonempty and finite, got {text!r}")
    return out


def _parse_patience(text: str) -> PatienceSpec:
    kind, _, args = text.partition(":")
    kind = kind.strip()
    nums = [float(x) for x in args.split(",") if x.strip()]
    if kind == "exponential":
        return PatienceSpec.exponential(nums[0]) if nums else None
    if kind == "deterministic":
        return PatienceSpec.fixed(nums[0])
    if kind == "uniform":
        return PatienceSpec.uniform(nums[0], nums[1])
    raise ValueError(f"unknown patience kind {kind!r}")


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text; raises :class:`ScenarioError` listing every bad line."""
    errors = []
    raw: dict = {}
    lines: dict = {}
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for part in line.split(";"):
            part = part.strip()
            if not part:
                continue
            key, eq, val = part.partition("=")
            key, val = key.strip(), val.strip()
            if not eq or not key:
                errors.append((ln, f"expected 'key = value', got {part!r}"))
                continue
            if key not in KNOWN_KEYS:
                errors.append((ln, f"unknown key {key!r}"))
                continue
            if key in raw:
                errors.append((ln, f"duplicate key {key!r}"))
                continue
            raw[key] = val
            lines[key] = ln

    values: dict = {}
    for key, val in raw.items():
        ln = lines[key]
        try:
            if key in _FLOAT_KEYS:
                values[key] = float(val)
            elif key in _RATE_KEYS:
                values[key] = AUTO if val == AUTO else float(val)
            elif key in _INT_KEYS:
                values[key] = int(val)
        except ValueError:
            errors.append((ln, f"{key}: cannot parse {val!r} as a number"))

    for key in REQUIRED_KEYS:
        if key not in raw:
            errors.append((0, f"missing required key {key!r}"))

    engines = ("analytic",)
    if "engines" in raw:
        engines = tuple(e.strip() for e in raw["engines"].split(",") if e.strip())
        bad = [e for e in engines if e not in ENGINES]
        if bad or not engines:
            errors.append((lines["engines"], f"unknown engine(s) {bad}; choose from {ENGINES}"))

    sweep_var, sweep_values = None, ()
    if "sweep" in raw:
        sweep_var = raw["sweep"]
        if sweep_var not in SWEEPABLE:
            errors.append((lines["sweep"], f"cannot sweep {sweep_var!r}"))
        if "values" not in raw:
            errors.append((lines["sweep"], "sweep given without values"))
        else:
            try:
                sweep_values = tuple(expand_values(raw["values"]))
                if sweep_var == "n1":
                    sweep_values = tuple(int(v) for v in sweep_values)
            except ValueError as exc:
                errors.append((lines["values"], str(exc)))
    elif "values" in raw:
        errors.append((lines["values"], "values given without sweep"))

    patience = None
    if "patience" in raw:
        try:
            patience = _parse_patience(raw["patience"])
        except (ValueError, IndexError) as exc:
            errors.append((lines["patience"], f"patience: {exc}"))

    opts = {}
    for key, allowed in (("service_mode", ("markovian", "channel")),
                         ("preemption", ("resume", "repeat"))):
        if key in raw:
            if raw[key] not in allowed:
                errors.append((lines[key], f"{key} must be one of {allowed}"))
            opts[key] = raw[key]
    if "warmup" in raw:
        try:
            opts["warmup"] = float(raw["warmup"])
        except ValueError:
            errors.append((lines["warmup"], f"warmup: cannot parse {raw['warmup']!r}"))

    uses_channel = ("q_over_n0_db" in values or opts.get("service_mode") == "channel"
                    or AUTO in (values.get("mu1"), values.get("mu2")) or sweep_var == "q_over_n0_db")
    if uses_channel and "q_over_n0_db" not in values and sweep_var != "q_over_n0_db":
        errors.append((0, "channel-dependent settings need q_over_n0_db"))

    if errors:
        raise ScenarioError(errors)

    base = {**_DEFAULTS, **{k: v for k, v in values.items() if k not in _INT_KEYS or k == "n1"}}
    if sweep_var == "q_over_n0_db" and "q_over_n0_db" not in base:
        base["q_over_n0_db"] = sweep_values[0]
    base.setdefault("mu2", base["mu1"])
    scen = Scenario(
        name=raw.get("name", "scenario"),
        engines=engines,
        values=base,
        sweep_var=sweep_var,
        sweep_values=sweep_values,
        reps=values.get("reps", 1),
        seed=values.get("seed", 0),
        events=values.get("events", 200_000),
        batches=values.get("batches", 32),
        patience=patience,
        **opts,
    )
    # surface domain errors (negative rates etc.) at parse time
    try:
        for _, vals in scen.points():
            build_point(scen, vals)
    except ValueError as exc:
        raise ScenarioError([(0, str(exc))]) from exc
    return scen


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


@dataclass(frozen=True)
class Point:
    params: SystemParams
    channel: Optional[ChannelParams]
    e_t: float
    p_out: float


def build_point(s: Scenario, vals: dict) -> Point:
    ch = None
    if "q_over_n0_db" in vals:
        ch = ChannelParams.from_db(vals["q_over_n0_db"], bandwidth=vals["bandwidth"],
                                   packet_size=vals["packet_size"], t_out=vals["t_out"],
                                   g_ss=vals["g_ss"], g_sp=vals["g_sp"])
    mu_auto = None
    if AUTO in (vals["mu1"], vals["mu2"]):
        mu_auto = chan.channel_service_rate(ch)
    mu1 = mu_auto if vals["mu1"] == AUTO else vals["mu1"]
    mu2 = mu_auto if vals["mu2"] == AUTO else vals["mu2"]
    p = SystemParams(lambda1=vals["lambda1"], lambda2=vals["lambda2"], mu1=mu1, mu2=mu2,
                     gamma=vals["gamma"], n1_cap=int(vals["n1"]), epsilon=vals["epsilon"],
                     omega=vals["omega"])
    if ch is not None:
        law = chan.ServiceTimeLaw.from_channel(ch)
        e_t = chan.truncated_mean(law, ch.t_out)
        p_out = chan.outage_probability(law, ch.t_out)
    else:
        e_t, p_out = 1.0 / mu1, 0.0
    return Point(p, ch, e_t, p_out)


# ---------------------------------------------------------------- result rows

PARAM_COLUMNS = ["lambda1", "lambda2", "mu1", "mu2", "gamma", "n1", "q_over_n0_db", "rho1", "rho2",
                 "stable"]
METRIC_COLUMNS = [
    "empty_prob1", "mean_n1", "mean_wait1", "queue_wait1", "total_wait1",
    "overflow_prob", "blocking_prob", "outage_prob", "reneging_prob", "abandon_prob",
    "mean_n2", "mean_wait2", "class2_d", "class2_feasible", "qos_ok",
    "empty_prob_both", "boundary_mass", "trusted",
]
CI_COLUMNS = ["empty_prob1_ci", "mean_n1_ci", "mean_wait1_ci", "queue_wait1_ci",
              "blocking_prob_ci", "abandon_prob_ci", "outage_prob_ci", "mean_n2_ci",
              "mean_wait2_ci"]
COUNT_COLUMNS = ["reps", "events", "arrived1", "served1", "reneged1", "overflowed1",
                 "outage1", "in_system1", "arrived2", "served2", "in_system2", "conserved"]
HEADER = (["scenario", "engine", "sweep_var", "sweep_value", "status"]
          + PARAM_COLUMNS + METRIC_COLUMNS + CI_COLUMNS + COUNT_COLUMNS)


def _param_cells(pt: Point, vals: dict) -> dict:
    p = pt.params
    return {"lambda1": p.lambda1, "lambda2": p.lambda2, "mu1": p.mu1, "mu2": p.mu2,
            "gamma": p.gamma, "n1": p.n1_cap, "q_over_n0_db": vals.get("q_over_n0_db"),
            "rho1": p.rho1, "rho2": p.rho2, "stable": validate_stability(p).stable}


def _qos(p: SystemParams, w2):
    if w2 is None or not math.isfinite(w2) or w2 < 0:
        return None
    return check_qos(w2, p)


def analytic_row(pt: Point) -> dict:
    p = pt.params
    ss = analytic.class1_steady_state(p)
    m1 = analytic.class1_metrics(p, ss, e_t=pt.e_t, p_out=pt.p_out)
    m2 = analytic.class2_approx(p, p0=ss.empty_prob)
    return {
        "empty_prob1": m1.empty_prob, "mean_n1": m1.mean_len, "mean_wait1": m1.mean_wait,
        "queue_wait1": m1.queue_only_wait, "total_wait1": m1.total_wait,
        "overflow_prob": m1.overflow_prob, "blocking_prob": m1.blocking_prob,
        "outage_prob": m1.outage_prob, "reneging_prob": m1.reneging_prob,
        "abandon_prob": m1.abandon_prob, "mean_n2": m2.mean_num, "mean_wait2": m2.mean_wait,
        "class2_d": m2.d, "class2_feasible": m2.feasible, "qos_ok": _qos(p, m2.mean_wait),
    }


def ctmc_row(pt: Point, boundary_tol: float = 1e-9) -> dict:
    p = pt.params
    _, dist = ctmc.solve_auto(p, boundary_tol=boundary_tol)
    m = ctmc.ctmc_metrics(dist, p, boundary_tol=boundary_tol)
    return {
        "empty_prob1": m.empty_prob1, "mean_n1": m.mean_n1, "mean_wait1": m.mean_wait1_system,
        "queue_wait1": m.queue_wait1, "total_wait1": pt.e_t + m.mean_wait1_system,
        "overflow_prob": m.overflow_prob, "blocking_prob": m.blocking_prob1,
        "outage_prob": pt.p_out, "reneging_prob": m.overflow_prob + pt.p_out,
        "abandon_prob": m.abandon_prob1, "mean_n2": m.mean_n2,
        "mean_wait2": m.queue_wait2 if p.lambda2 > 0 else None,
        "qos_ok": _qos(p, m.queue_wait2), "empty_prob_both": m.empty_prob_both,
        "boundary_mass": m.boundary_mass, "trusted": m.trusted,
    }


def _pool(estimates) -> desim.Estimate:
    b = np.concatenate([e.batch_means for e in estimates])
    return desim._summarize_finite(b)


def _pool_fraction(estimates) -> desim.Estimate:
    b = np.concatenate([e.batch_means for e in estimates])
    return desim._summarize_fraction(b, sum(e.hits for e in estimates),
                                     sum(e.trials for e in estimates))


def sim_config(s: Scenario, pt: Point, run_index: int, events: int | None = None,
               trace: bool = False) -> desim.SimConfig:
    return desim.SimConfig(
        params=pt.params, channel=pt.channel, patience=s.patience,
        service_mode=s.service_mode, preemption_mode=s.preemption,
        horizon_events=events or s.events, warmup_fraction=s.warmup, batches=s.batches,
        seed=s.seed, run_index=run_index, trace=trace)


def sim_row(s: Scenario, pt: Point, point_index: int, results=None) -> dict:
    if results is None:
        results = [desim.run_sim(sim_config(s, pt, point_index * s.reps + r))
                   for r in range(s.reps)]
    p = pt.params
    c1 = {k: sum(r.counts[1][k] for r in results) for k in results[0].counts[1]}
    c2 = {k: sum(r.counts[2][k] for r in results) for k in results[0].counts[2]}
    empty = _pool([r.empty_prob1 for r in results])
    n1 = _pool([r.mean_n1 for r in results])
    n2 = _pool([r.mean_n2 for r in results])
    w1 = _pool([r.wait1 for r in results])
    w2 = _pool([r.wait2 for r in results])
    block = _pool_fraction([r.overflow_frac for r in results])
    aband = _pool_fraction([r.reneged_frac for r in results])
    outage = _pool_fraction([r.outage_frac for r in results])
    mean_wait1 = n1.mean / p.lambda1 if p.lambda1 > 0 else 0.0
    mean_wait1_hw = n1.half_width / p.lambda1 if p.lambda1 > 0 else 0.0
    row = {
        "empty_prob1": empty.mean, "mean_n1": n1.mean, "mean_wait1": mean_wait1,
        "queue_wait1": w1.mean, "total_wait1": pt.e_t + mean_wait1,
        "blocking_prob": block.mean, "outage_prob": outage.mean if s.service_mode == "channel" else 0.0,
        "abandon_prob": aband.mean, "mean_n2": n2.mean,
        "mean_wait2": w2.mean if p.lambda2 > 0 else None,
        "qos_ok": _qos(p, w2.mean) if p.lambda2 > 0 else None,
        "empty_prob1_ci": empty.half_width, "mean_n1_ci": n1.half_width,
        "mean_wait1_ci": mean_wait1_hw, "queue_wait1_ci": w1.half_width,
        "blocking_prob_ci": block.half_width, "abandon_prob_ci": aband.half_width,
        "outage_prob_ci": outage.half_width if s.service_mode == "channel" else None,
        "mean_n2_ci": n2.half_width, "mean_wait2_ci": w2.half_width if p.lambda2 > 0 else None,
        "reps": len(results), "events": sum(r.events for r in results),
        "arrived1": c1["arrived"], "served1": c1["served"], "reneged1": c1["reneged"],
        "overflowed1": c1["overflowed"], "outage1": c1["outage"], "in_system1": c1["in_system"],
        "arrived2": c2["arrived"], "served2": c2["served"], "in_system2": c2["in_system"],
        "conserved": all(r.conserved() for r in results),
    }
    row["reneging_prob"] = row["blocking_prob"] + row["outage_prob"]
    return row


def _error_row(exc: Exception) -> dict:
    return {"status": f"error: {type(exc).__name__}: {exc}"}


def run_scenario(s: Scenario, jobs: int = 1) -> list:
    """Evaluate every engine at every sweep point.

    Rows come out in sweep order, engines in the order listed by the
    scenario.  A failure at one point yields a row whose ``status`` starts
    with ``error:`` instead of aborting the sweep.  ``jobs > 1`` runs the
    simulation replications in worker processes; the output does not depend
    on ``jobs``.
    """
    points = []
    for k, (sv, vals) in enumerate(s.points()):
        try:
            points.append((k, sv, vals, build_point(s, vals), None))
        except Exception as exc:  # noqa: BLE001
            points.append((k, sv, vals, None, exc))

    sim_results = {}
    if "sim" in s.engines:
        cfgs = [(k, sim_config(s, pt, k * s.reps + r))
                for k, _, _, pt, err in points if err is None for r in range(s.reps)]
        if jobs > 1 and len(cfgs) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outs = list(pool.map(_run_one_safe, [c for _, c in cfgs]))
        else:
            outs = [_run_one_safe(c) for _, c in cfgs]
        for (k, _), out in zip(cfgs, outs):
            sim_results.setdefault(k, []).append(out)

    rows = []
    for k, sv, vals, pt, err in points:
        for engine in s.engines:
            row = {"scenario": s.name, "engine": engine, "sweep_var": s.sweep_var,
                   "sweep_value": sv, "status": "ok"}
            if err is not None:
                row.update(_error_row(err))
                rows.append(row)
                continue
            row.update(_param_cells(pt, vals))
            try:
                if engine == "analytic":
                    row.update(analytic_row(pt))
                elif engine == "ctmc":
                    row.update(ctmc_row(pt))
                else:
                    outs = sim_results[k]
                    bad = [o for o in outs if isinstance(o, Exception)]
                    if bad:
                        raise bad[0]
                    row.update(sim_row(s, pt, k, outs))
            except Exception as exc:  # noqa: BLE001
                row.update(_error_row(exc))
            rows.append(row)
    return rows


def _run_one_safe(cfg):
    try:
        return desim.run_sim(cfg)
    except Exception as exc:  # noqa: BLE001
        return exc


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return ""
        return f"{float(v):.12g}"
    return str(v)


def write_csv(rows, fh) -> None:
    """Write rows under the fixed :data:`HEADER`; unknown keys are an error."""
    w = csv.DictWriter(fh, fieldnames=HEADER, extrasaction="raise", lineterminator="\r\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _cell(row.get(k)) for k in HEADER})


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def column(rows, name: str, engine: str | None = None) -> list:
    """Values of one column, optionally filtered by engine, in row order."""
    return [r.get(name) for r in rows if engine is None or r["engine"] == engine]


# ------------------------------------------------------------ cross-validation

@dataclass
class Check:
    sweep_value: object
    pair: str
    metric: str
    reference: float
    value: float
    delta: float
    passed: Optional[bool]          # None for report-only checks


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    coverage: dict = field(default_factory=dict)   # metric -> (covered, total)
    min_coverage: float = 0.9
    exact_ok: bool = True

    @property
    def passed(self) -> bool:
        cov_ok = all(c / t >= self.min_coverage for c, t in self.coverage.values() if t)
        return self.exact_ok and cov_ok

    def lines(self) -> list:
        out = []
        for c in self.checks:
            tag = "INFO" if c.passed is None else ("PASS" if c.passed else "FAIL")
            out.append(f"{tag} {c.pair} {c.metric} @ {c.sweep_value}: "
                       f"ref={_cell(c.reference)} got={_cell(c.value)} delta={_cell(c.delta)}")
        for m, (c, t) in self.coverage.items():
            out.append(f"{'PASS' if t and c / t >= self.min_coverage else 'FAIL'} "
                       f"sim coverage {m}: {c}/{t}")
        out.append("OVERALL " + ("PASS" if self.passed else "FAIL"))
        return out


EXACT_METRICS = ("empty_prob1", "mean_n1", "mean_wait1", "queue_wait1", "blocking_prob",
                 "overflow_prob", "abandon_prob")
SIM_METRICS = (("empty_prob1", "empty_prob1_ci"), ("queue_wait1", "queue_wait1_ci"),
               ("blocking_prob", "blocking_prob_ci"), ("mean_n1", "mean_n1_ci"))


def cross_validate(s: Scenario, exact_tol: float = 1e-8, min_coverage: float = 0.9,
                   rows=None, jobs: int = 1) -> ValidationReport:
    """Compare engines pairwise at every sweep point.

    analytic vs ctmc: absolute difference of class-1 metrics must not exceed
    ``exact_tol``.  sim vs the exact engines: the sim 95% interval must
    cover the reference in at least ``min_coverage`` of the points, per
    metric.  The class-2 approximation vs the ctmc class-2 wait is reported
    without a verdict.
    """
    if len(set(s.engines)) < 2:
        raise ValueError("cross-validation needs at least two engines")
    if rows is None:
        rows = run_scenario(s, jobs=jobs)
    rep = ValidationReport(min_coverage=min_coverage)
    by_point: dict = {}
    for r in rows:
        by_point.setdefault(r["sweep_value"], {})[r["engine"]] = r
    for sv, eng in by_point.items():
        for r in eng.values():
            if r["status"] != "ok":
                rep.exact_ok = False
                rep.checks.append(Check(sv, r["engine"], "status", math.nan, math.nan, math.nan, False))
        a, c, m = (eng.get(e) for e in ENGINES)
        a = a if a and a["status"] == "ok" else None
        c = c if c and c["status"] == "ok" else None
        m = m if m and m["status"] == "ok" else None
        if a and c:
            for key in EXACT_METRICS:
                delta = abs(a[key] - c[key])
                ok = bool(delta <= exact_tol and c.get("trusted", True))
                rep.exact_ok &= ok
                rep.checks.append(Check(sv, "analytic-ctmc", key, a[key], c[key], delta, ok))
            w_a, w_c = a.get("mean_wait2"), c.get("mean_wait2")
            if w_a is not None and w_c is not None and math.isfinite(w_a):
                rep.checks.append(Check(sv, "class2-approx-ctmc", "mean_wait2", w_c, w_a,
                                        w_a - w_c, None))
        ref = c or a
        if m and ref:
            for key, ci in SIM_METRICS:
                target = ref[key]
                hw = m[ci]
                if hw is None or math.isnan(hw):
                    continue
                covered = bool(abs(m[key] - target) <= hw)
                got, tot = rep.coverage.get(key, (0, 0))
                rep.coverage[key] = (got + covered, tot + 1)
                rep.checks.append(Check(sv, f"sim-{'ctmc' if ref is c else 'analytic'}", key,
                                        target, m[key], m[key] - target, covered))
            if c and m.get("mean_wait2") is not None and c.get("mean_wait2") is not None:
                covered = bool(abs(m["mean_wait2"] - c["mean_wait2"]) <= m["mean_wait2_ci"])
                got, tot = rep.coverage.get("mean_wait2", (0, 0))
                rep.coverage["mean_wait2"] = (got + covered, tot + 1)
                rep.checks.append(Check(sv, "sim-ctmc", "mean_wait2", c["mean_wait2"],
                                        m["mean_wait2"], m["mean_wait2"] - c["mean_wait2"], covered))
    return rep
