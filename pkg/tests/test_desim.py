import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crqueue.analytic import class1_steady_state
from crqueue.channel import ServiceTimeLaw, outage_probability
from crqueue.ctmc import ctmc_metrics, solve_auto
from crqueue.desim import (SimConfig, measure_empty_prob, run_sim, summarize, wilson_interval)
from crqueue.params import ChannelParams, PatienceSpec, SystemParams

BASE = SystemParams(1, 0.3, mu1=2, mu2=2, gamma=1, n1_cap=10)


def test_summarize_example():
    est = summarize(range(1, 11))
    assert est.mean == 5.5
    assert np.std(np.arange(1, 11), ddof=1) == pytest.approx(3.0276503540974917)
    assert est.half_width == pytest.approx(1.96 * 3.0276503540974917 / math.sqrt(10))
    assert est.half_width == pytest.approx(1.877, abs=5e-4)
    assert est.covers(5.5) and not est.covers(7.5)


def test_summarize_constant_and_short():
    assert summarize([4.0] * 12).half_width == 0.0
    with pytest.raises(ValueError):
        summarize(range(9))


def test_half_width_shrinks_like_inverse_sqrt():
    rng = np.random.default_rng(3)
    widths = [np.mean([summarize(rng.normal(size=b)).half_width for _ in range(400)])
              for b in (25, 100)]
    assert widths[0] / widths[1] == pytest.approx(2.0, rel=0.05)


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0
    assert hi == pytest.approx(1.96**2 / (100 + 1.96**2))
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and (lo + hi) / 2 == pytest.approx(0.5)


def test_measure_empty_prob():
    assert measure_empty_prob([0, 1, 3], [0, 1, 0], t_end=4) == 0.5
    assert measure_empty_prob([0.0, 2.0], [0, 0]) == 1.0
    with pytest.raises(ValueError):
        measure_empty_prob([1.0], [0])


@pytest.mark.parametrize("kwargs", [
    dict(batches=9), dict(seed=-1), dict(seed=2**64), dict(service_mode="fluid"),
    dict(preemption_mode="drop"), dict(service_mode="channel"), dict(horizon_events=20),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SimConfig(BASE, **kwargs)


def test_deterministic_and_stream_separation():
    a = run_sim(SimConfig(BASE, horizon_events=20000, seed=5))
    b = run_sim(SimConfig(BASE, horizon_events=20000, seed=5))
    c = run_sim(SimConfig(BASE, horizon_events=20000, seed=5, run_index=1))
    assert np.array_equal(a.wait1.batch_means, b.wait1.batch_means)
    assert a.counts == b.counts and a.sim_time == b.sim_time
    assert a.sim_time != c.sim_time


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["resume", "repeat"]),
       st.floats(0.1, 3), st.floats(0, 1), st.integers(1, 8))
def test_conservation(seed, mode, l1, l2, cap):
    p = SystemParams(l1, l2, mu1=2, mu2=2, gamma=0.5, n1_cap=cap)
    res = run_sim(SimConfig(p, horizon_events=4000, seed=seed, preemption_mode=mode))
    assert res.conserved()
    assert res.events == 4000 - (4000 - 800) % 32


def test_trace_invariants():
    res = run_sim(SimConfig(BASE.with_(lambda1=1.5, lambda2=0.5), horizon_events=30000,
                            seed=9, trace=True))
    prev = None
    saw_preemption = saw_renege = False
    for t, kind, pid, n1, n2, srv, waiting in res.trace:
        # class 1 present => class 1 in service; class 2 served only on an empty class-1 queue
        assert (srv == 1) == (n1 > 0)
        assert waiting == max(n1 - 1, 0)
        assert 0 <= n1 <= 10 and n2 >= 0
        if srv == 2:
            assert n1 == 0
        if prev is not None:
            if kind == "arrival1" and prev[5] == 2:
                saw_preemption = True
            if kind == "patience_expired":
                saw_renege = True
                # only waiting packets renege: the server is untouched
                assert srv == prev[5] == 1
                assert waiting == prev[6] - 1
        prev = (t, kind, pid, n1, n2, srv, waiting)
    assert saw_preemption and saw_renege
    times = [r[0] for r in res.trace]
    assert all(np.diff(times) >= 0)


def test_mm1_sojourn():
    p = SystemParams(0.5, mu1=1, gamma=0, n1_cap=10**4)
    res = run_sim(SimConfig(p, horizon_events=400000, seed=1))
    assert res.sojourn1.covers(1 / (1 - 0.5))
    assert res.reneged_frac.mean == 0


def test_empty_prob_against_closed_form():
    res = run_sim(SimConfig(BASE, horizon_events=300000, seed=2, trace=True))
    p0 = class1_steady_state(BASE).empty_prob
    assert res.empty_prob1.covers(p0)
    times = [r[0] for r in res.trace]
    n1 = [r[3] for r in res.trace]
    assert measure_empty_prob(times, n1) == pytest.approx(p0, abs=0.01)


def test_no_class1_traffic_means_always_empty():
    res = run_sim(SimConfig(BASE.with_(lambda1=0), horizon_events=5000, seed=0, trace=True))
    assert res.empty_prob1.mean == 1.0
    assert measure_empty_prob([r[0] for r in res.trace], [r[3] for r in res.trace]) == 1.0
    with pytest.raises(ValueError):
        run_sim(SimConfig(BASE.with_(lambda1=0, lambda2=0), horizon_events=5000))


def test_impatient_limit_matches_chain():
    p = SystemParams(1.5, mu1=2, gamma=1e4, n1_cap=10)
    res = run_sim(SimConfig(p, horizon_events=300000, seed=4))
    c = res.counts[1]
    frac = c["served"] / c["arrived"]
    _, d = solve_auto(p)
    m = ctmc_metrics(d, p)
    exact = p.mu1 * (1 - m.empty_prob1) / p.lambda1
    assert exact == pytest.approx(2 / 3.5, rel=1e-3)  # nearly a loss system
    sd = math.sqrt(exact * (1 - exact) / c["arrived"])
    assert abs(frac - exact) < 5 * sd


def test_resume_and_repeat_agree_for_exponential_service():
    p = SystemParams(0.8, 0.4, mu1=2, mu2=2, gamma=1, n1_cap=10)
    r = run_sim(SimConfig(p, horizon_events=300000, seed=7, preemption_mode="resume"))
    q = run_sim(SimConfig(p, horizon_events=300000, seed=7, preemption_mode="repeat"))
    assert r.wait2.lo <= q.wait2.hi and q.wait2.lo <= r.wait2.hi
    _, d = solve_auto(p)
    m = ctmc_metrics(d, p)
    assert r.wait2.covers(m.queue_wait2)
    assert r.mean_n2.covers(m.mean_n2)


def test_patience_laws():
    p = BASE.with_(lambda1=1.8)
    never = run_sim(SimConfig(p, patience=PatienceSpec.fixed(1e9), horizon_events=20000, seed=1))
    assert never.counts[1]["reneged"] == 0
    short = run_sim(SimConfig(p, patience=PatienceSpec.fixed(0.05), horizon_events=20000, seed=1))
    long = run_sim(SimConfig(p, patience=PatienceSpec.fixed(0.5), horizon_events=20000, seed=1))
    assert short.reneged_frac.mean > long.reneged_frac.mean > 0
    uni = run_sim(SimConfig(p, patience=PatienceSpec.uniform(0.1, 0.2), horizon_events=20000))
    assert uni.conserved()


def test_channel_mode_outage():
    ch = ChannelParams.from_db(5.0, bandwidth=1e6, packet_size=4096, t_out=0.01508)
    law = ServiceTimeLaw.from_channel(ch)
    p = SystemParams(40, 10, mu1=1, mu2=1, gamma=100, n1_cap=50)
    res = run_sim(SimConfig(p, channel=ch, service_mode="channel", horizon_events=200000, seed=3))
    assert res.outage_frac.covers(float(outage_probability(law, ch.t_out)))
    assert res.conserved()
    assert res.counts[2]["outage"] > 0
