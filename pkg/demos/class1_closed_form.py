"""
High-priority queue in closed form
==================================

The class-1 count is a birth-death chain: arrivals at lambda1 and, with n
packets present, departures at mu1 + (n-1) gamma.  Here we look at how the
impatience rate shapes that law and check it against the full Markov chain.
"""

import numpy as np

from crqueue import SystemParams, class1_metrics, class1_steady_state, solve_auto
from crqueue.ctmc import marginal_class1

p = SystemParams(lambda1=150, mu1=160, gamma=100, n1_cap=100)
ss = class1_steady_state(p)
print("P(n) for n = 0..5:", np.round(ss.probs[:6], 5))

# impatience truncates the queue long before the capacity is reached
for gamma in (0, 10, 100):
    m = class1_metrics(p.with_(gamma=gamma))
    print(f"gamma={gamma:>3}  P0={m.empty_prob:.4f}  E[n]={m.mean_len:7.3f}  "
          f"E[Tq1]={m.mean_wait:.5f}  overflow={m.overflow_prob:.3e}")

# the two-dimensional chain, with class-2 traffic added, has the same class-1 marginal
model, dist = solve_auto(p.with_(lambda2=20, mu2=160, n1_cap=30))
gap = np.abs(marginal_class1(dist) - class1_steady_state(p.with_(n1_cap=30)).probs).max()
print(f"chain states: {model.n_states}, max marginal gap: {gap:.1e}")
