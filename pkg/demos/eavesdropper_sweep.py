"""
How much does an unbalanced source leak?
========================================

Eve taps a fraction of every signal qubit's photons and votes on which
detector pair fired most.  With a perfectly balanced source she learns
nothing; as a^2 moves away from 1/2 her odds climb.
"""

# %%
import numpy as np

from sqqss import Variant, eve_success_exact, eve_success_montecarlo, per_photon_probs

# %%
# Per-photon detection probabilities at a^2 = 0.6.  The x detectors see the
# imbalance, the y detectors stay flat.
probs = per_photon_probs(Variant.CORRELATION, 0.6)
print(probs)

# %%
# Exact answer by enumerating every multinomial count, and a seeded Monte Carlo
# cross-check.
exact = eve_success_exact(probs, 100)
mc, err = eve_success_montecarlo(probs, 100, trials=200_000, seed=1)
print(f"exact {exact:.4f}   monte carlo {mc:.4f} +- {err:.4f}")

# %%
# Whole curve for a few photon budgets.
grid = np.linspace(0.5, 1.0, 11)
print("a^2   " + "".join(f"n={n:<8d}" for n in (10, 25, 50, 100)))
for a_sq in grid:
    p = per_photon_probs(Variant.CORRELATION, a_sq)
    print(f"{a_sq:.2f}  " + "".join(f"{eve_success_exact(p, n):<10.4f}" for n in (10, 25, 50, 100)))
