"""
Escort families and exact temperature sensitivities
===================================================

Raising a distribution to a power gamma = 1/T traces the escort family.
Expectations along that family move with an exact covariance slope, set
masses move with a centered log-prob gap, and the entropy of the tempered
family responds with Var(log p) / T^3, which is never negative.
"""

import numpy as np

from ssdlab import (
    Categorical,
    entropy,
    entropy_decomposition,
    entropy_temperature_response,
    escort_distribution,
    escort_sensitivity,
    set_mass_log_sensitivity,
    temper,
)

np.set_printoptions(precision=4, suppress=True)

p = Categorical([0.35, 0.25, 0.15, 0.10, 0.08, 0.07])
members = (0, 1, 2, 3, 4, 5)

# The escort family: gamma < 1 flattens, gamma > 1 sharpens.
for gamma in (0.5, 1.0, 2.0, 5.0):
    esc = escort_distribution(p, members, gamma)
    print(f"gamma={gamma:>3.1f}  escort: {esc.probs}")

# Exact slope of an expectation along the family, checked against a
# centered finite difference.
f = np.array([1.0, 0.5, 0.2, -0.1, -0.4, -0.8])
gamma = 1.3
h = 1e-6


def mean_at(g):
    esc = escort_distribution(p, members, g)
    return float((esc.probs[list(members)] * f).sum())


slope = escort_sensitivity(p, members, gamma, f)
fd = (mean_at(gamma + h) - mean_at(gamma - h)) / (2 * h)
print(f"\nescort slope {slope:.8f} vs finite difference {fd:.8f}")

# Log-mass slope of an event: positive when the event holds the high
# log-prob tokens, negative when it holds the tail.
head = set_mass_log_sensitivity(p, members, gamma, (0, 1))
tail = set_mass_log_sensitivity(p, members, gamma, (4, 5))
print(f"log-mass slope, head event: {head:+.6f}")
print(f"log-mass slope, tail event: {tail:+.6f}")

# Entropy response to temperature: dH/dT = Var(log p) / T^3 >= 0.
print("\nT      H(temper)   dH/dT")
for t in (0.5, 0.8, 1.0, 1.5, 2.5):
    ht = entropy(temper(p, t, members))
    resp = entropy_temperature_response(p, members, t)
    print(f"{t:.1f}    {ht:.6f}   {resp:.6f}")

# Entropy also splits exactly across a head/tail partition: a binary gate
# term plus mass-weighted conditional entropies.
bd = entropy_decomposition(p, (0, 1))
print("\ngate + weighted parts:",
      f"{bd.gate_entropy:.6f} + {bd.head_entropy:.6f} + "
      f"{bd.tail_entropy:.6f} = {bd.total:.6f}")
print("direct entropy:       ", f"{entropy(p):.6f}")
