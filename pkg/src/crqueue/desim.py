"""Event-driven simulator of the two-class preemptive queue.

Class-1 packets preempt a class-2 packet in service, which goes back to the
head of the class-2 queue.  Waiting class-1 packets abandon when their
patience runs out; the packet in service is never abandoned.  Arrivals that
find ``n1_cap`` class-1 packets in the system are dropped.

In ``"channel"`` service mode a transmission lasts ``min(T, t_out)`` with
``T`` drawn from the interference-limited law; a transmission cut at the
deadline leaves the server as an outage.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import channel as chan
from .params import ChannelParams, PatienceSpec, SystemParams

SERVICE_DONE, PATIENCE_EXPIRED, ARRIVAL1, ARRIVAL2 = 0, 1, 2, 3
EVENT_NAMES = ("service_done", "patience_expired", "arrival1", "arrival2")

Z95 = 1.96


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    channel: Optional[ChannelParams] = None
    patience: Optional[PatienceSpec] = None
    service_mode: str = "markovian"
    preemption_mode: str = "resume"
    horizon_events: int = 10**6
    warmup_fraction: float = 0.2
    batches: int = 32
    seed: int = 0
    run_index: int = 0
    trace: bool = False

    def __post_init__(self) -> None:
        if self.service_mode not in ("markovian", "channel"):
            raise ValueError(f"unknown service_mode {self.service_mode!r}")
        if self.service_mode == "channel" and self.channel is None:
            raise ValueError("channel service mode needs ChannelParams")
        if self.preemption_mode not in ("resume", "repeat"):
            raise ValueError(f"unknown preemption_mode {self.preemption_mode!r}")
        if not 0 <= self.warmup_fraction < 1:
            raise ValueError("warmup_fraction must lie in [0, 1)")
        if self.batches < 10:
            raise ValueError("at least 10 batches are required")
        if self.horizon_events * (1 - self.warmup_fraction) < self.batches:
            raise ValueError("horizon_events too small for the requested batches")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def patience_spec(self) -> PatienceSpec:
        if self.patience is not None:
            return self.patience
        return PatienceSpec.exponential(self.params.gamma)


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width: float
    batch_means: np.ndarray = field(repr=False)
    hits: Optional[int] = None
    trials: Optional[int] = None

    @property
    def lo(self) -> float:
        return self.mean - self.half_width

    @property
    def hi(self) -> float:
        return self.mean + self.half_width

    def covers(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def summarize(batch_means) -> Estimate:
    """Batch-means point estimate with a normal-theory 95% interval."""
    b = np.asarray(batch_means, dtype=float)
    if b.size < 10:
        raise ValueError(f"need at least 10 batches, got {b.size}")
    std = float(np.std(b, ddof=1))
    return Estimate(float(b.mean()), Z95 * std / math.sqrt(b.size), b)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    den = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / den
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def _summarize_fraction(batch_means, successes: int, trials: int) -> Estimate:
    # batch means collapse to a zero-width interval when the event is rare;
    # widen to the Wilson interval on the pooled counts
    est = _summarize_finite(batch_means)
    if math.isnan(est.mean):
        return replace(est, hits=successes, trials=trials)
    lo, hi = wilson_interval(successes, trials)
    half = max(est.half_width, est.mean - lo, hi - est.mean)
    return Estimate(est.mean, half, est.batch_means, successes, trials)


def _summarize_finite(batch_means) -> Estimate:
    b = np.asarray(batch_means, dtype=float)
    b = b[np.isfinite(b)]
    if b.size < 10:
        return Estimate(float("nan"), float("nan"), b)
    return summarize(b)


def measure_empty_prob(times, n1, t_end: float | None = None) -> float:
    """Time-average fraction with no class-1 packet present.

    ``times[k]`` is the instant the class-1 count became ``n1[k]``; the last
    value holds until ``t_end`` (defaults to the last time stamp).
    """
    times = np.asarray(times, dtype=float)
    n1 = np.asarray(n1)
    if t_end is None:
        t_end = float(times[-1])
    widths = np.diff(np.append(times, t_end))
    total = t_end - times[0]
    if not total > 0:
        raise ValueError("zero-length measurement window")
    # complement of the busy time, so an always-empty trace gives exactly 1
    return float(1.0 - widths[n1 != 0].sum() / total)


@dataclass(frozen=True)
class SimResult:
    """Output of :func:`run_sim`.

    ``wait1`` is the mean time an admitted class-1 packet waits before
    service or abandonment; ``wait2`` is the class-2 time spent not in
    service.  ``counts`` covers the whole run, warm-up included.
    """

    empty_prob1: Estimate
    mean_n1: Estimate
    mean_n2: Estimate
    wait1: Estimate
    sojourn1: Estimate
    wait2: Estimate
    sojourn2: Estimate
    reneged_frac: Estimate
    overflow_frac: Estimate
    outage_frac: Estimate
    counts: dict
    events: int
    sim_time: float
    trace: Optional[list] = field(default=None, repr=False)

    def conserved(self) -> bool:
        return all(c["arrived"] == c["served"] + c["reneged"] + c["overflowed"] + c["in_system"]
                   for c in self.counts.values())


class _Stream:
    """Buffered draws from one numpy sampler."""

    __slots__ = ("_draw", "_buf", "_pos")

    def __init__(self, draw):
        self._draw = draw
        self._buf = draw(4096).tolist()
        self._pos = 0

    def __call__(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._draw(4096).tolist()
            self._pos = 0
        x = self._buf[self._pos]
        self._pos += 1
        return x


def _exp_stream(rng, rate):
    if rate <= 0:
        return lambda: math.inf
    return _Stream(lambda n: rng.exponential(1.0 / rate, n))


def _service_stream(rng, rate, cfg: SimConfig):
    """Yields ``(duration, outage)`` pairs."""
    if cfg.service_mode == "markovian":
        s = _exp_stream(rng, rate)
        return lambda: (s(), False)
    law = chan.ServiceTimeLaw.from_channel(cfg.channel)
    t_out = cfg.channel.t_out

    def draw(n):
        u = rng.random(n)
        u[u == 0.0] = 0.5  # measure-zero guard for the open-interval sampler
        return chan.sample_service_time(law, u)

    s = _Stream(draw)

    def nxt():
        t = s()
        return (t_out, True) if t > t_out else (t, False)
    return nxt


def run_sim(cfg: SimConfig) -> SimResult:
    p = cfg.params
    if p.lambda1 == 0 and p.lambda2 == 0:
        raise ValueError("at least one arrival rate must be positive")
    seq = np.random.SeedSequence([cfg.seed, cfg.run_index])
    rngs = [np.random.Generator(np.random.PCG64(s)) for s in seq.spawn(5)]
    inter1 = _exp_stream(rngs[0], p.lambda1)
    inter2 = _exp_stream(rngs[1], p.lambda2)
    serve1 = _service_stream(rngs[2], p.mu1, cfg)
    serve2 = _service_stream(rngs[3], p.mu2, cfg)
    pat = cfg.patience_spec
    if pat.kind == "exponential":
        patience = _exp_stream(rngs[4], pat.rate)
    else:
        prng = rngs[4]
        patience = lambda: pat.sample(prng)  # noqa: E731
    resume = cfg.preemption_mode == "resume"
    cap = p.n1_cap

    horizon = cfg.horizon_events
    warm = int(horizon * cfg.warmup_fraction)
    nb = cfg.batches
    bsize = (horizon - warm) // nb
    stop = warm + bsize * nb

    heap: list = []
    push, pop = heapq.heappush, heapq.heappop
    next_id = 0
    if p.lambda1 > 0:
        push(heap, (inter1(), ARRIVAL1, next_id, 0))
        next_id += 1
    if p.lambda2 > 0:
        push(heap, (inter2(), ARRIVAL2, next_id, 0))
        next_id += 1

    q1: deque = deque()      # ids, lazily purged of reneged packets
    waiting1: dict = {}      # id -> arrival time
    q2: deque = deque()      # [id, arrival, remaining or None, outage, received]
    n1 = n2 = 0
    srv_cls = 0              # 0 idle, 1 or 2
    srv_pkt = None
    srv_start = srv_end = 0.0
    srv_outage = False
    epoch = 0
    now = 0.0

    c1 = dict(arrived=0, served=0, reneged=0, overflowed=0, outage=0)
    c2 = dict(arrived=0, served=0, reneged=0, overflowed=0, outage=0)
    trace = [] if cfg.trace else None

    acc = np.zeros((nb, 19))
    # per-batch accumulator columns
    (T, T0, A1, A2, ARR1, OVF1, REN1, W1S, W1N, S1S, S1N, OUT1, SRV1,
     W2S, S2S, N2D, OUT2, SRV2, _) = range(19)
    row = None
    events = 0
    last = 0.0

    def start1(pid, arr):
        nonlocal srv_cls, srv_pkt, srv_start, srv_end, srv_outage, epoch
        dur, srv_outage = serve1()
        srv_cls, srv_pkt, srv_start, srv_end = 1, (pid, arr), now, now + dur
        epoch += 1
        push(heap, (srv_end, SERVICE_DONE, pid, epoch))
        if row is not None:
            row[W1S] += now - arr
            row[W1N] += 1

    def start2():
        nonlocal srv_cls, srv_pkt, srv_start, srv_end, srv_outage, epoch
        pkt = q2.popleft()
        if pkt[2] is None:
            pkt[2], pkt[3] = serve2()
        srv_cls, srv_pkt, srv_start, srv_end, srv_outage = 2, pkt, now, now + pkt[2], pkt[3]
        epoch += 1
        push(heap, (srv_end, SERVICE_DONE, pkt[0], epoch))

    def next_job():
        nonlocal srv_cls, srv_pkt
        while q1:
            pid = q1.popleft()
            arr = waiting1.pop(pid, None)
            if arr is not None:
                start1(pid, arr)
                return
        if q2:
            start2()
        else:
            srv_cls, srv_pkt = 0, None

    while events < stop:
        if not heap:
            raise RuntimeError("event list exhausted")
        t, kind, pid, token = pop(heap)
        if kind == SERVICE_DONE and token != epoch:
            continue
        if kind == PATIENCE_EXPIRED and pid not in waiting1:
            continue

        if events >= warm:
            b = (events - warm) // bsize
            row = acc[b]
            dt = t - last
            row[T] += dt
            if n1 == 0:
                row[T0] += dt
            row[A1] += n1 * dt
            row[A2] += n2 * dt
        last = t
        now = t
        events += 1

        if kind == ARRIVAL1:
            push(heap, (now + inter1(), ARRIVAL1, next_id, 0))
            next_id += 1
            c1["arrived"] += 1
            if row is not None:
                row[ARR1] += 1
            if n1 >= cap:
                c1["overflowed"] += 1
                if row is not None:
                    row[OVF1] += 1
            else:
                n1 += 1
                if srv_cls == 0:
                    start1(pid, now)
                elif srv_cls == 2:
                    pkt = srv_pkt
                    pkt[4] += now - srv_start
                    if resume:
                        pkt[2] = srv_end - now
                    else:
                        pkt[2] = None
                    q2.appendleft(pkt)
                    start1(pid, now)
                else:
                    waiting1[pid] = now
                    q1.append(pid)
                    wait_limit = patience()
                    if wait_limit < math.inf:
                        push(heap, (now + wait_limit, PATIENCE_EXPIRED, pid, 0))
        elif kind == ARRIVAL2:
            push(heap, (now + inter2(), ARRIVAL2, next_id, 0))
            next_id += 1
            c2["arrived"] += 1
            n2 += 1
            q2.append([pid, now, None, False, 0.0])
            if srv_cls == 0:
                start2()
        elif kind == PATIENCE_EXPIRED:
            arr = waiting1.pop(pid)
            n1 -= 1
            c1["reneged"] += 1
            if row is not None:
                row[REN1] += 1
                row[W1S] += now - arr
                row[W1N] += 1
        else:
            if srv_cls == 1:
                n1 -= 1
                c1["served"] += 1
                if srv_outage:
                    c1["outage"] += 1
                if row is not None:
                    row[S1S] += now - srv_pkt[1]
                    row[S1N] += 1
                    row[SRV1] += 1
                    if srv_outage:
                        row[OUT1] += 1
            else:
                n2 -= 1
                c2["served"] += 1
                if srv_outage:
                    c2["outage"] += 1
                pkt = srv_pkt
                received = pkt[4] + (now - srv_start)
                if row is not None:
                    soj = now - pkt[1]
                    row[S2S] += soj
                    row[W2S] += soj - received
                    row[N2D] += 1
                    row[SRV2] += 1
                    if srv_outage:
                        row[OUT2] += 1
            next_job()

        if trace is not None:
            trace.append((now, EVENT_NAMES[kind], pid, n1, n2, srv_cls, len(waiting1)))

    c1["in_system"] = n1
    c2["in_system"] = n2

    with np.errstate(divide="ignore", invalid="ignore"):
        tot = acc[:, T]
        res = SimResult(
            empty_prob1=_summarize_finite(acc[:, T0] / tot),
            mean_n1=_summarize_finite(acc[:, A1] / tot),
            mean_n2=_summarize_finite(acc[:, A2] / tot),
            wait1=_summarize_finite(acc[:, W1S] / acc[:, W1N]),
            sojourn1=_summarize_finite(acc[:, S1S] / acc[:, S1N]),
            wait2=_summarize_finite(acc[:, W2S] / acc[:, N2D]),
            sojourn2=_summarize_finite(acc[:, S2S] / acc[:, N2D]),
            reneged_frac=_summarize_fraction(acc[:, REN1] / acc[:, ARR1],
                                             int(acc[:, REN1].sum()), int(acc[:, ARR1].sum())),
            overflow_frac=_summarize_fraction(acc[:, OVF1] / acc[:, ARR1],
                                              int(acc[:, OVF1].sum()), int(acc[:, ARR1].sum())),
            outage_frac=_summarize_fraction(acc[:, OUT1] / acc[:, SRV1],
                                            int(acc[:, OUT1].sum()), int(acc[:, SRV1].sum())),
            counts={1: c1, 2: c2},
            events=events,
            sim_time=now,
            trace=trace,
        )
    return res
