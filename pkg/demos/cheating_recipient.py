"""
A dishonest recipient
=====================

Recipient 2 intercepts the qubit, measures it in a random basis, resends
what they saw and announces whatever they like.  A check on a random subset
of valid runs reveals the intrusion as a 25% error rate.
"""

# %%
from sqqss import SourceModel, Variant, protocol

# %%
honest = protocol.run_session(Variant.CORRELATION, SourceModel(), 3, 200_000, seed=3)
cheated = protocol.simulate_cheater_intercept_resend(Variant.CORRELATION, SourceModel(), 3, 200_000, seed=3)
print(f"honest   error rate {honest.error_rate:.4f}")
print(f"cheater  error rate {cheated.error_rate:.4f} over {cheated.runs_scored} checked runs")

# %%
# Knowing the right basis in advance removes the signature entirely.
oracle = protocol.simulate_cheater_intercept_resend(
    Variant.CORRELATION, SourceModel(), 3, 200_000, seed=3, cheater_basis="oracle"
)
print(f"oracle   error rate {oracle.error_rate:.4f}")
