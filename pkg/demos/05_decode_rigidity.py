"""
What decode knobs can and cannot express
========================================

Any stack of temperature, top-k, and top-p collapses to one rigid family:
a power of the base distribution on a rank prefix.  That rigidity makes
tuning a one-dimensional search, and it bounds which (rank, threshold)
goals are even feasible.
"""

import itertools

import numpy as np

from ssdlab import (
    Categorical,
    decode_normal_form,
    feasible_topp_interval,
    power_rigidity_check,
    prefix_mass_curve,
)

np.set_printoptions(precision=4, suppress=True)

p = Categorical([0.30, 0.22, 0.16, 0.11, 0.08, 0.06, 0.04, 0.03])

# Apply the three operators in every order.  The surviving set is always a
# prefix of the descending ranking and the kept shape is always p ** (1/T)
# renormalized, no matter the order.
print("order                       prefix  rigidity")
for order in itertools.permutations(("temper", "top_k", "top_p")):
    policy = decode_normal_form(p, order, alpha=1.4, k=5, top_p=0.8)
    dev = power_rigidity_check(policy, p)
    print(f"{'+'.join(order):<26}  {policy.prefix_len}       {dev:.2e}")

# Consequence: the only reachable shapes are power-on-prefix.  A target
# that boosts a mid-rank token above a higher-ranked one is unreachable by
# decode knobs alone; changing the underlying distribution is the only way.

# The prefix mass curve S_j(T) says how much tempered mass the top-j prefix
# holds.  Heating always bleeds mass out of every prefix.
print("\nprefix mass curves (k = 5)")
print("T      S_1     S_2     S_3     S_4     S_5")
for t in (0.5, 1.0, 2.0):
    curve = prefix_mass_curve(p, t, 5)
    print(f"{t:.1f}  ", "  ".join(f"{s:.4f}" for s in curve))

# Feasibility: suppose decoding must keep exactly 1 token at a lock state
# while keeping at least 2 at a fork state, using one shared top-p value.
# The lock curve caps the threshold from above, the fork curve props it
# from below, and heating squeezes the window shut.
lock = Categorical([0.75, 0.10, 0.08, 0.07])
fork = Categorical([0.40, 0.30, 0.20, 0.10])
print("\nT      window                feasible")
for t in (0.6, 1.0, 1.6, 2.4):
    rep = feasible_topp_interval(lock, 1, fork, 2, t, 4)
    print(f"{t:.1f}    [{rep.lower:.4f}, {rep.upper:.4f}]      {rep.feasible}")
