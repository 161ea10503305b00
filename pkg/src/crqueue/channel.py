"""Interference-limited transmission-time model of the secondary link.

The secondary transmitter uses the largest power that keeps interference at
the primary receiver below ``Q``.  The resulting transmission time ``T`` has
CDF

    F(t) = q / (exp(b/t) + q - 1),   q = Q/N0,  b = S ln2 / B,

which is heavy-tailed: ``1 - F(t) ~ b / (q t)``, so ``E[T]`` is infinite and
only the deadline-truncated mean ``E[min(T, t_out)]`` is finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .params import ChannelParams
from .quadrature import integrate


@dataclass(frozen=True)
class ServiceTimeLaw:
    b_bar: float
    q_over_n0: float

    def __post_init__(self) -> None:
        if not (self.b_bar > 0 and math.isfinite(self.b_bar)):
            raise ValueError(f"b_bar must be > 0, got {self.b_bar!r}")
        if not (self.q_over_n0 > 0 and math.isfinite(self.q_over_n0)):
            raise ValueError(f"q_over_n0 must be > 0, got {self.q_over_n0!r}")

    @classmethod
    def from_channel(cls, ch: ChannelParams) -> "ServiceTimeLaw":
        return cls(ch.b_bar, ch.snr)


def _check_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("time argument must be > 0")
    return t


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def max_transmit_power(q_lin: float, g_sp: float) -> float:
    """Largest transmit power keeping interference at the primary receiver <= Q."""
    if not g_sp > 0:
        raise ValueError("g_sp must be > 0")
    if not q_lin > 0:
        raise ValueError("q_lin must be > 0")
    return q_lin / g_sp


def transmission_time(law: ServiceTimeLaw, g_ss: float, g_sp: float) -> float:
    """Deterministic transmission time for given link gains at maximum power."""
    if not (g_ss > 0 and g_sp > 0):
        raise ValueError("gains must be > 0")
    snr = (g_ss / g_sp) * law.q_over_n0
    if not snr > 0:
        raise ValueError("SNR argument must be > 0")
    return law.b_bar / math.log1p(snr)


def service_time_cdf(law: ServiceTimeLaw, t):
    x = law.b_bar / _check_times(t)
    q = law.q_over_n0
    with np.errstate(over="ignore"):
        out = q / (np.expm1(x) + q)
    return _scalar(out)


def service_time_pdf(law: ServiceTimeLaw, t):
    t = _check_times(t)
    b, q = law.b_bar, law.q_over_n0
    # exp(b/t)/(q-1+exp(b/t))^2 rewritten in y = exp(-b/t) to avoid overflow
    y = np.exp(-b / t)
    out = (b * q / (t * t)) * y / ((q - 1.0) * y + 1.0) ** 2
    return _scalar(out)


def outage_probability(law: ServiceTimeLaw, t_out: float) -> float:
    """Probability that a transmission is not completed within ``t_out``."""
    return 1.0 - service_time_cdf(law, t_out)


def sample_service_time(law: ServiceTimeLaw, u):
    """Inverse-CDF sampler; ``u`` must lie in the open unit interval."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise ValueError("u must lie in (0, 1)")
    out = law.b_bar / np.log1p(law.q_over_n0 * (1.0 - u) / u)
    return _scalar(out)


class TransmissionTimeEstimate(NamedTuple):
    """Result of :func:`expected_transmission_time`.

    ``closed_form`` is the integral in ``u = exp(b/t)``
    followed by the deadline term ``q t_out (1/q - 1/(1 - exp(b/t_out)))``.
    ``truncated_mean`` is ``E[min(T, t_out)]``.  The two differ because the
    deadline term of the closed form always exceeds ``t_out``.
    """

    closed_form: float
    truncated_mean: float
    relative_gap: float
    integral_term: float
    deadline_term: float


def _substituted_integral(law: ServiceTimeLaw, t_out: float, abs_tol: float) -> float:
    b, q = law.b_bar, law.q_over_n0
    lower = math.exp(b / t_out)
    if math.isinf(lower):
        return 0.0

    def integrand(u):
        return b / ((q - 1.0 + u) ** 2 * np.log(u))

    # the integrand peaks at the lower limit; resolve [c, 2c] on its own and
    # hand the tail to the 1/v fold
    head, _ = integrate(integrand, lower, 2.0 * lower, abs_tol=abs_tol / 2)
    tail, _ = integrate(integrand, 2.0 * lower, math.inf, abs_tol=abs_tol / 2)
    return q * (head + tail)


def truncated_mean(law: ServiceTimeLaw, t_out: float, abs_tol: float = 1e-12) -> float:
    """``E[min(T, t_out)] = int_0^t_out t f(t) dt + t_out * P_out``."""
    t_out = float(_check_times(t_out))
    b = law.b_bar
    brk = [c * b for c in (0.05, 0.2, 1.0, 5.0) if c * b < t_out]
    body, _ = integrate(lambda t: t * service_time_pdf(law, t), 0.0, t_out,
                        abs_tol=abs_tol, breakpoints=brk)
    return body + t_out * outage_probability(law, t_out)


def expected_transmission_time(law: ServiceTimeLaw, t_out: float,
                               abs_tol: float = 1e-10) -> TransmissionTimeEstimate:
    """Mean transmission time under a deadline, closed form and direct.

    Raises :class:`~crqueue.quadrature.QuadratureError` if either integral
    fails to converge.
    """
    t_out = float(_check_times(t_out))
    b, q = law.b_bar, law.q_over_n0
    integral_term = _substituted_integral(law, t_out, abs_tol)
    with np.errstate(over="ignore"):
        deadline_term = q * t_out * (1.0 / q - 1.0 / (1.0 - math.exp(b / t_out)))
    closed_form = integral_term + deadline_term
    oracle = truncated_mean(law, t_out, abs_tol=min(abs_tol, 1e-12))
    gap = (closed_form - oracle) / oracle
    return TransmissionTimeEstimate(closed_form, oracle, gap, integral_term, deadline_term)


def mean_transmission_time(law: ServiceTimeLaw) -> float:
    """Untruncated ``E[T]``.

    The survival function decays like ``b / (q t)``, so the mean is infinite
    for every ``q > 0``; callers wanting a finite service rate must use
    :func:`truncated_mean`.
    """
    return math.inf


def channel_service_rate(ch: ChannelParams) -> float:
    """Service rate ``1 / E[min(T, t_out)]`` implied by the link."""
    return 1.0 / truncated_mean(ServiceTimeLaw.from_channel(ch), ch.t_out)
