"""
The entanglement-based variant
==============================

Conditioning the idler on |+x> instead of |H> leaves the signal photon
maximally mixed in both the x and y bases, whatever a^2 is.
"""

# %%
import numpy as np

from sqqss import Variant, eve_success_exact, per_photon_probs
from sqqss.protocol import ALL_ACTIONS

# %%
for a_sq in (0.5, 0.7, 0.9, 1.0):
    worst = max(np.abs(per_photon_probs(Variant.ENTANGLEMENT, a_sq, act.phase).as_array() - 0.25).max() for act in ALL_ACTIONS)
    print(f"a^2={a_sq:.1f}  max |p - 1/4| = {worst:.1e}")

# %%
# So the vote is a fair coin for every photon budget.
for n in (1, 10, 100):
    print(n, eve_success_exact(per_photon_probs(Variant.ENTANGLEMENT, 0.9), n))
