"""
From a measured purity to an error rate
=======================================

A source with purity 0.78 has a dephased coherence term.  The same number
sets the polarization fringe visibility, the fidelity of the prepared
states and the error rate of an honest session.
"""

# %%
from sqqss import SourceModel, Variant, fidelity_from_visibility, protocol, visibility_from_purity

# %%
vis = visibility_from_purity(0.78)
print(f"visibility {vis:.4f}, fidelity {fidelity_from_visibility(vis):.4f}")

# %%
# A polarizer scan on the signal with the idler fixed at 45 degrees recovers V.
model = SourceModel(visibility=vis)
scan = protocol.purity_scan(model, 45.0)
print(f"fringe visibility {protocol.fringe_visibility(scan):.4f}")

# %%
# Honest three-party session: roughly half the runs survive sifting and
# (1 - V) / 2 of those decode wrongly.
stats = protocol.run_session(Variant.ENTANGLEMENT, model, 3, 100_000, seed=7)
print(f"sift fraction {stats.sift_fraction:.4f}, error rate {stats.error_rate:.4f}")
