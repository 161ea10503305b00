"""Closed-form steady-state metrics.

Class 1 sees a finite birth-death chain: arrivals at ``lambda1`` and, with
``n`` packets present, departures at ``mu1 + (n-1) gamma`` (service plus
abandonment of the ``n-1`` waiting packets).  Class 2 uses a heavy-traffic
style approximation driven by the class-1 load.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .params import SystemParams


def renege_rate(n: int, gamma: float) -> float:
    """Total abandonment rate with ``n`` class-1 packets in the system."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return 0.0 if n == 0 else (n - 1) * gamma


def class1_departure_rates(p: SystemParams, upto: int) -> np.ndarray:
    """Departure rates ``mu1 + (n-1) gamma`` for ``n = 1..upto``."""
    n = np.arange(1, upto + 1)
    return p.mu1 + (n - 1) * p.gamma


@dataclass(frozen=True)
class SteadyState:
    """Class-1 stationary law on ``0..n1_cap`` plus the one-step extension."""

    probs: np.ndarray
    overflow: float

    @property
    def empty_prob(self) -> float:
        return float(self.probs[0])

    @property
    def blocking_prob(self) -> float:
        """Probability an arrival finds the queue full (PASTA)."""
        return float(self.probs[-1])


def _log_unnormalized(p: SystemParams, upto: int) -> np.ndarray:
    # log of lambda^n / prod_{i<=n} (mu1 + (i-1) gamma), n = 0..upto
    out = np.zeros(upto + 1)
    if p.lambda1 == 0:
        out[1:] = -np.inf
        return out
    steps = math.log(p.lambda1) - np.log(class1_departure_rates(p, upto))
    out[1:] = np.cumsum(steps)
    return out


def class1_steady_state(p: SystemParams) -> SteadyState:
    logs = _log_unnormalized(p, p.n1_cap + 1)
    log_norm = logsumexp(logs[:-1])
    probs = np.exp(logs[:-1] - log_norm)
    overflow = math.exp(logs[-1] - log_norm)
    if not (np.all(np.isfinite(probs)) and math.isfinite(overflow)):
        raise FloatingPointError("class-1 stationary law is not finite")
    return SteadyState(probs, overflow)


@dataclass(frozen=True)
class Class1Metrics:
    """Class-1 performance figures.

    ``mean_len`` counts every packet in the system, including the one in
    service, and ``mean_wait = mean_len / lambda1``.  The ``queue_only_*``
    fields exclude the packet in service; ``queue_only_wait`` is the mean
    time an admitted packet spends waiting (until service or abandonment).
    """

    empty_prob: float
    mean_len: float
    mean_wait: float
    overflow_prob: float
    blocking_prob: float
    outage_prob: float
    reneging_prob: float
    total_wait: float
    queue_only_len: float
    queue_only_wait: float
    abandon_prob: float
    little_defined: bool = True


def class1_metrics(p: SystemParams, ss: SteadyState | None = None, e_t: float | None = None,
                   p_out: float = 0.0) -> Class1Metrics:
    """Queue length, delay and loss figures for class 1.

    ``e_t`` is the mean transmission time entering ``E[W1] = E[T] + E[Tq1]``;
    it defaults to ``1/mu1``.  ``p_out`` is the link outage probability,
    added to the overflow term of the reneging probability.
    """
    if ss is None:
        ss = class1_steady_state(p)
    if e_t is None:
        e_t = 1.0 / p.mu1
    n = np.arange(ss.probs.size)
    mean_len = float(n @ ss.probs)
    queue_len = float(np.maximum(n - 1, 0) @ ss.probs)
    lam = p.lambda1
    if lam > 0:
        mean_wait = mean_len / lam
        admitted = lam * (1.0 - ss.blocking_prob)
        queue_wait = queue_len / admitted
        # abandonment throughput over arrival rate
        abandon = p.gamma * queue_len / lam
        defined = True
    else:
        mean_wait = queue_wait = abandon = 0.0
        defined = False
    return Class1Metrics(
        empty_prob=ss.empty_prob,
        mean_len=mean_len,
        mean_wait=mean_wait,
        overflow_prob=ss.overflow,
        blocking_prob=ss.blocking_prob,
        outage_prob=p_out,
        reneging_prob=ss.overflow + p_out,
        total_wait=e_t + mean_wait,
        queue_only_len=queue_len,
        queue_only_wait=queue_wait,
        abandon_prob=abandon,
        little_defined=defined,
    )


@dataclass(frozen=True)
class Class2Metrics:
    mean_num: float
    mean_wait: float
    d: float
    feasible: bool
    empty_prob1: float


def class2_approx(p: SystemParams, p0: float | None = None) -> Class2Metrics:
    """Approximate class-2 backlog and queueing delay.

    ``feasible`` is False when the stability denominator
    ``(1 - rho1) - rho2 (1 - d)`` is not positive or the delay comes out
    negative; values are returned unclamped either way.  ``mean_wait`` is
    NaN when ``lambda2 == 0``.
    """
    if not (p.omega > 0):
        raise ValueError("omega must be > 0")
    r1, r2 = p.rho1, p.rho2
    mu1, mu2, w = p.mu1, p.mu2, p.omega
    d = r1 * r1 * math.exp((r1 - 1.0) / (mu1 * w))
    denom = (1.0 - r1) - r2 * (1.0 - d)
    with np.errstate(divide="ignore", invalid="ignore"):
        first = (mu2 * r2 * (r1 - (1.0 - r1) * ((1.0 + r1) * mu1 * w + 3.0) * d - d * d)
                 / np.float64(mu1 * (1.0 - r1) * denom * (1.0 - d)))
        second = r2 * (1.0 - d) / np.float64(denom)
    mean_num = float(first + second) if r2 > 0 else 0.0
    if p0 is None:
        p0 = class1_steady_state(p).empty_prob
    if p.lambda2 > 0:
        mean_wait = mean_num / p.lambda2 - 1.0 / (mu2 * p0)
    else:
        mean_wait = math.nan
    feasible = denom > 0 and not (mean_wait < 0) and math.isfinite(mean_num)
    return Class2Metrics(mean_num, mean_wait, d, bool(feasible), p0)
