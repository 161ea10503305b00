"""Parameter containers shared by the analytic, CTMC and simulation engines.

All rates are in 1/s, all times in seconds.  Powers are linear; use
:func:`db_to_linear` to convert thresholds quoted in dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple


def _check_finite_nonneg(name: str, value: float) -> None:
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


def _check_positive(name: str, value: float) -> None:
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Traffic and queue parameters of the two-class preemptive queue.

    ``gamma`` is the per-waiting-packet patience rate of class-1 packets;
    the packet in service never reneges.  ``omega`` is only used by the
    class-2 approximation.
    """

    lambda1: float
    lambda2: float = 0.0
    mu1: float = 1.0
    mu2: float = 1.0
    gamma: float = 0.0
    n1_cap: int = 100
    epsilon: float = math.inf
    omega: float = 0.01

    def __post_init__(self) -> None:
        for name in ("lambda1", "lambda2", "gamma"):
            _check_finite_nonneg(name, getattr(self, name))
        _check_positive("mu1", self.mu1)
        _check_positive("mu2", self.mu2)
        if math.isnan(self.epsilon) or self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon!r}")
        _check_finite_nonneg("omega", self.omega)
        if int(self.n1_cap) != self.n1_cap or self.n1_cap < 1:
            raise ValueError(f"n1_cap must be a positive integer, got {self.n1_cap!r}")
        object.__setattr__(self, "n1_cap", int(self.n1_cap))

    @property
    def rho1(self) -> float:
        return self.lambda1 / self.mu1

    @property
    def rho2(self) -> float:
        return self.lambda2 / self.mu2

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelParams:
    """Underlay link parameters.

    ``q_lin`` and ``n0`` share a power scale; only their ratio enters the
    transmission-time law.  The gains are optional and default to 1, in
    which case the received SNR at full allowed power equals ``q_lin/n0``.
    """

    q_lin: float
    n0: float = 1.0
    bandwidth: float = 1e6
    packet_size: float = 4096.0
    t_out: float = 0.05
    g_ss: float = 1.0
    g_sp: float = 1.0

    def __post_init__(self) -> None:
        for name in ("q_lin", "n0", "bandwidth", "packet_size", "t_out", "g_ss", "g_sp"):
            _check_positive(name, getattr(self, name))

    @property
    def b_bar(self) -> float:
        """Bandwidth-normalized entropy ``S ln 2 / B`` in seconds."""
        return self.packet_size * math.log(2.0) / self.bandwidth

    @property
    def q_over_n0(self) -> float:
        return self.q_lin / self.n0

    @property
    def snr(self) -> float:
        """Received SNR when transmitting at the interference-limited power."""
        return self.g_ss * self.q_lin / (self.g_sp * self.n0)

    @classmethod
    def from_db(cls, q_over_n0_db: float, **kwargs) -> "ChannelParams":
        return cls(q_lin=db_to_linear(q_over_n0_db), n0=1.0, **kwargs)

    def with_(self, **changes) -> "ChannelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PatienceSpec:
    """Distribution of class-1 patience (time a packet is willing to wait).

    ``kind`` is ``"exponential"`` (``rate``), ``"deterministic"``
    (``deadline``) or ``"uniform"`` (``lo``, ``hi``).  Only the exponential
    case matches the Markov chain used by the analytic and CTMC engines.
    """

    kind: str = "exponential"
    rate: float = 0.0
    deadline: float = math.inf
    lo: float = 0.0
    hi: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "exponential":
            # rate 0 means infinitely patient
            _check_finite_nonneg("rate", self.rate)
        elif self.kind == "deterministic":
            if not self.deadline > 0:
                raise ValueError(f"deadline must be > 0, got {self.deadline!r}")
        elif self.kind == "uniform":
            if not (0 < self.lo <= self.hi < math.inf):
                raise ValueError(f"uniform patience needs 0 < lo <= hi, got ({self.lo}, {self.hi})")
        else:
            raise ValueError(f"unknown patience kind {self.kind!r}")

    @classmethod
    def exponential(cls, rate: float) -> "PatienceSpec":
        return cls("exponential", rate=rate)

    @classmethod
    def fixed(cls, deadline: float) -> "PatienceSpec":
        return cls("deterministic", deadline=deadline)

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "PatienceSpec":
        return cls("uniform", lo=lo, hi=hi)

    def sample(self, rng) -> float:
        if self.kind == "exponential":
            return rng.exponential(1.0 / self.rate) if self.rate > 0 else math.inf
        if self.kind == "deterministic":
            return self.deadline
        return rng.uniform(self.lo, self.hi)


class StabilityReport(NamedTuple):
    stable: bool
    rho1: float
    rho2: float


def validate_stability(p: SystemParams) -> StabilityReport:
    """Check ``lambda1 + lambda2 < mu`` for a common service rate.

    With distinct service rates the check uses the total offered load
    ``rho1 + rho2 < 1``, which reduces to the same test when ``mu1 == mu2``.
    A ``False`` result is advisory: the finite class-1 queue with reneging
    always has a stationary regime.
    """
    if p.mu1 == p.mu2:
        stable = p.lambda1 + p.lambda2 < p.mu1
    else:
        stable = p.rho1 + p.rho2 < 1.0
    return StabilityReport(bool(stable), p.rho1, p.rho2)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def check_qos(mean_wait2: float, p: SystemParams) -> bool:
    """True when the class-2 mean queueing delay is strictly below ``epsilon``."""
    if mean_wait2 < 0:
        raise ValueError("mean_wait2 must be >= 0")
    return mean_wait2 < p.epsilon
