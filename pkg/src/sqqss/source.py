"""Photon-pair source models.

A source emits ``a|HH> + sqrt(1-a^2)|VV>`` whose two terms keep only a fraction
``visibility`` of their mutual coherence. Averaging any spread of relative phase
between the terms yields exactly this form, with ``visibility`` equal to the
mean resultant length of the phase distribution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import TwoPhotonState


class DomainError(ValueError):
    """Raised when a value lies outside what the dephasing model can represent."""


@dataclass(frozen=True)
class SourceModel:
    """Emission parameters for one qubit's worth of photons.

    Attributes:
        a_sq: weight of the ``|HH>`` term.
        visibility: coherence between the ``|HH>`` and ``|VV>`` terms.
        photons_per_qubit: photons an eavesdropper may split off per qubit.
        poisson: draw the photon number from a Poisson law with mean
            ``photons_per_qubit`` instead of using it exactly.
    """

    a_sq: float = 0.5
    visibility: float = 1.0
    photons_per_qubit: int = 1
    poisson: bool = False

    def __post_init__(self):
        if not 0.0 <= self.a_sq <= 1.0:
            raise DomainError(f"a_sq must lie in [0, 1], got {self.a_sq}")
        if not 0.0 <= self.visibility <= 1.0:
            raise DomainError(f"visibility must lie in [0, 1], got {self.visibility}")
        if int(self.photons_per_qubit) != self.photons_per_qubit or self.photons_per_qubit < 0:
            raise DomainError(
                f"photons_per_qubit must be a non-negative integer, got {self.photons_per_qubit}"
            )

    @classmethod
    def from_purity(cls, purity: float, **kwargs) -> "SourceModel":
        return cls(visibility=visibility_from_purity(purity), **kwargs)


def emit(model: SourceModel) -> TwoPhotonState:
    a_sq = model.a_sq
    coherence = model.visibility * math.sqrt(a_sq * (1.0 - a_sq))
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = a_sq
    rho[3, 3] = 1.0 - a_sq
    rho[0, 3] = rho[3, 0] = coherence
    return TwoPhotonState(rho)


def purity_from_visibility(visibility: float) -> float:
    if not 0.0 <= visibility <= 1.0:
        raise DomainError(f"visibility must lie in [0, 1], got {visibility}")
    return (1.0 + visibility**2) / 2.0


def visibility_from_purity(purity: float) -> float:
    # Tolerate round-off just outside the domain edges.
    if purity < 0.5 - 1e-12 or purity > 1.0 + 1e-12:
        raise DomainError(
            f"purity {purity} is outside [0.5, 1] and not reachable by dephasing a symmetric pair"
        )
    return math.sqrt(min(max(2.0 * purity - 1.0, 0.0), 1.0))


def fidelity_from_visibility(visibility: float) -> float:
    """Overlap of the symmetric dephased pair with the ideal Bell state."""
    if not 0.0 <= visibility <= 1.0:
        raise DomainError(f"visibility must lie in [0, 1], got {visibility}")
    return (1.0 + visibility) / 2.0


def x_basis_coefficients(a_sq: float) -> tuple[float, float]:
    """Amplitudes of the pair state rewritten in the diagonal basis.

    ``a|HH> + b|VV> = c_same (|+x,+x> + |-x,-x>) + c_diff (|+x,-x> + |-x,+x>)``
    with ``c_same = (a + b)/2`` and ``c_diff = (a - b)/2``.
    """
    if not 0.0 <= a_sq <= 1.0:
        raise DomainError(f"a_sq must lie in [0, 1], got {a_sq}")
    a = math.sqrt(a_sq)
    b = math.sqrt(1.0 - a_sq)
    return (a + b) / 2.0, (a - b) / 2.0
