"""
Transmission time over a power-limited link
===========================================

The secondary transmitter caps its power so the primary receiver sees at
most Q of interference.  With Rayleigh fading the time to push S bits through
bandwidth B has cdf F(t) = q / (expm1(b/t) + q), b = S ln2 / B.
"""

import numpy as np

from crqueue import ChannelParams, ServiceTimeLaw
from crqueue.channel import (channel_service_rate, expected_transmission_time,
                             outage_probability, sample_service_time, truncated_mean)

ch = ChannelParams.from_db(0.0, bandwidth=1e6, packet_size=4096, t_out=0.01508)
law = ServiceTimeLaw.from_channel(ch)
print(f"b = {law.b_bar:.3e} s, q = {law.q_over_n0:g}")

# the tail decays like b/(q t), so the plain mean is infinite; the deadline fixes it
for t_out in (0.005, 0.01508, 0.05, 0.5):
    print(f"t_out={t_out:<7} P_out={float(outage_probability(law, t_out)):.4f}  "
          f"E[min(T, t_out)]={truncated_mean(law, t_out):.3e}")

est = expected_transmission_time(law, ch.t_out)
print(f"integral + deadline form: {est.closed_form:.4e}  vs truncated mean {est.truncated_mean:.4e}")
print(f"service rate seen by the queue: {channel_service_rate(ch):.2f} packets/s")

# inverse-transform sampling reproduces the outage fraction
rng = np.random.default_rng(1)
t = sample_service_time(law, rng.random(200_000))
print(f"sampled outage fraction: {(t > ch.t_out).mean():.4f}")

# a better channel (higher Q/N0) shortens transmissions
for db in (0, 5, 10):
    print(f"{db:>2} dB -> mu1 = {channel_service_rate(ch.with_(q_lin=10 ** (db / 10))):.1f}")
