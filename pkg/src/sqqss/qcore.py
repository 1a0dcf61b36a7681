"""Small dense linear algebra for one- and two-photon polarization states.

Two-photon operators live on the ordered basis ``|HH>, |HV>, |VH>, |VV>`` with
the signal photon first. Single-photon density matrices are plain 2x2 complex
arrays in the ``|H>, |V>`` basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

ATOL = 1e-12
EIG_ATOL = 1e-10
ZERO_PROB = 1e-14

Subsystem = Literal["signal", "idler"]
Axis = Literal["H", "V", "+x", "-x", "+y", "-y"]
Basis = Literal["x", "y", "hv"]

_SQRT_HALF = np.sqrt(0.5)

HWP_H_TO_X = _SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


class ZeroProbabilityOutcome(ValueError):
    """Raised when conditioning on an outcome that (numerically) never happens."""


@dataclass(frozen=True)
class PureState1:
    """A single-photon polarization ket ``amp_h |H> + amp_v |V>``."""

    amp_h: complex
    amp_v: complex

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp_h, self.amp_v], dtype=complex)

    @classmethod
    def from_vector(cls, vec) -> "PureState1":
        vec = np.asarray(vec, dtype=complex).reshape(2)
        return cls(complex(vec[0]), complex(vec[1]))

    def norm(self) -> float:
        return float(np.sqrt(abs(self.amp_h) ** 2 + abs(self.amp_v) ** 2))

    def normalize(self) -> "PureState1":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState1(self.amp_h / nrm, self.amp_v / nrm)

    def density(self) -> np.ndarray:
        vec = self.vector
        return np.outer(vec, vec.conj())


H = PureState1(1, 0)
V = PureState1(0, 1)
PLUS_X = PureState1(_SQRT_HALF, _SQRT_HALF)
MINUS_X = PureState1(_SQRT_HALF, -_SQRT_HALF)
PLUS_Y = PureState1(_SQRT_HALF, 1j * _SQRT_HALF)
MINUS_Y = PureState1(_SQRT_HALF, -1j * _SQRT_HALF)

AXES: dict[str, PureState1] = {
    "H": H,
    "V": V,
    "+x": PLUS_X,
    "-x": MINUS_X,
    "+y": PLUS_Y,
    "-y": MINUS_Y,
}

BASIS_AXES: dict[str, tuple[str, str]] = {
    "hv": ("H", "V"),
    "x": ("+x", "-x"),
    "y": ("+y", "-y"),
}


def linear_polarization(angle: float) -> PureState1:
    """Linear polarization at ``angle`` radians from horizontal."""
    return PureState1(np.cos(angle), np.sin(angle))


@dataclass(frozen=True, eq=False)
class TwoPhotonState:
    """Density operator of a signal/idler photon pair.

    The matrix is validated on construction (Hermitian, unit trace, positive
    semidefinite) and made read-only.
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex).reshape(4, 4)
        if not np.allclose(rho, rho.conj().T, atol=ATOL, rtol=0):
            raise ValueError("density matrix is not Hermitian")
        rho = 0.5 * (rho + rho.conj().T)
        if abs(np.trace(rho).real - 1.0) > ATOL:
            raise ValueError(f"trace is {np.trace(rho).real!r}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -EIG_ATOL:
            raise ValueError("density matrix has a negative eigenvalue")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_ket(cls, ket) -> "TwoPhotonState":
        ket = np.asarray(ket, dtype=complex).reshape(4)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()))

    @classmethod
    def product(cls, signal: PureState1, idler: PureState1) -> "TwoPhotonState":
        return cls.from_ket(np.kron(signal.vector, idler.vector))


BELL_PHI_PLUS = TwoPhotonState.from_ket([1, 0, 0, 1])

State = Union[PureState1, TwoPhotonState, np.ndarray]


@dataclass(frozen=True)
class Projector:
    """Rank-one polarization projector acting on one photon of the pair."""

    axis: Axis
    subsystem: Subsystem = "idler"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}")
        _check_subsystem(self.subsystem)

    def local_matrix(self) -> np.ndarray:
        return AXES[self.axis].density()

    def matrix(self) -> np.ndarray:
        return _lift(self.local_matrix(), self.subsystem)


def _check_subsystem(subsystem: str) -> None:
    if subsystem not in ("signal", "idler"):
        raise ValueError(f"subsystem must be 'signal' or 'idler', got {subsystem!r}")


def _lift(op: np.ndarray, subsystem: str) -> np.ndarray:
    _check_subsystem(subsystem)
    if subsystem == "signal":
        return np.kron(op, IDENTITY2)
    return np.kron(IDENTITY2, op)


def _apply_local_unitary(state: State, u: np.ndarray, subsystem: str) -> State:
    if isinstance(state, PureState1):
        return PureState1.from_vector(u @ state.vector)
    if isinstance(state, TwoPhotonState):
        big = _lift(u, subsystem)
        return TwoPhotonState(big @ state.rho @ big.conj().T)
    rho = np.asarray(state, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 density matrix, got shape {rho.shape}")
    return u @ rho @ u.conj().T


def phase_unitary(phi: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phi)]).astype(complex)


def apply_phase(state: State, phi: float, subsystem: Subsystem = "signal") -> State:
    """Shift the phase of the ``|V>`` component by ``phi`` radians."""
    if not np.isfinite(phi):
        raise ValueError("phase must be finite")
    return _apply_local_unitary(state, phase_unitary(phi), subsystem)


def apply_hwp_h_to_x(state: State, subsystem: Subsystem = "signal") -> State:
    """Half-wave plate at 22.5 deg: ``|H> -> |+x>``, ``|V> -> |-x>``."""
    return _apply_local_unitary(state, HWP_H_TO_X, subsystem)


def as_density(state) -> np.ndarray:
    if isinstance(state, PureState1):
        return state.density()
    if isinstance(state, TwoPhotonState):
        return np.array(state.rho)
    return np.asarray(state, dtype=complex)


def reduced_state(state: TwoPhotonState, keep: Subsystem = "signal") -> np.ndarray:
    """Partial trace over the photon that is not kept."""
    _check_subsystem(keep)
    r = state.rho.reshape(2, 2, 2, 2)  # (s, i, s', i')
    if keep == "signal":
        return np.einsum("ajbj->ab", r)
    return np.einsum("jajb->ab", r)


def condition_on(state: TwoPhotonState, proj: Projector) -> tuple[np.ndarray, float]:
    """Post-select ``proj`` on one photon; return the other photon's state.

    Returns the renormalized 2x2 density matrix of the complementary photon and
    the probability of the post-selected outcome.
    """
    big = proj.matrix()
    projected = big @ state.rho @ big
    prob = float(np.trace(projected).real)
    if prob < ZERO_PROB:
        raise ZeroProbabilityOutcome(
            f"outcome {proj.axis} on {proj.subsystem} has probability {prob:.3e}"
        )
    other = "idler" if proj.subsystem == "signal" else "signal"
    reduced = reduced_state(TwoPhotonState(projected / prob), keep=other)
    return reduced, min(max(prob, 0.0), 1.0)


def measure_probs(state, basis: Basis = "x") -> tuple[float, float]:
    """Outcome probabilities ``(p_plus, p_minus)`` of a single-photon measurement."""
    rho = as_density(state)
    plus, minus = (AXES[a] for a in BASIS_AXES[basis])
    p_plus = float(np.real(plus.vector.conj() @ rho @ plus.vector))
    p_minus = float(np.real(minus.vector.conj() @ rho @ minus.vector))
    total = p_plus + p_minus
    return p_plus / total, p_minus / total


def joint_probability(state: TwoPhotonState, signal: PureState1, idler: PureState1) -> float:
    """Probability that both photons pass analyzers set to the given states."""
    ket = np.kron(signal.vector, idler.vector)
    return float(np.real(ket.conj() @ state.rho @ ket))


def purity(rho) -> float:
    rho = as_density(rho)
    return float(np.real(np.trace(rho @ rho)))


def fidelity_to(rho, psi) -> float:
    """Overlap ``<psi|rho|psi>`` with a pure reference state."""
    rho = as_density(rho)
    if isinstance(psi, PureState1):
        vec = psi.vector
    elif isinstance(psi, TwoPhotonState):
        # Rank-one state: recover the ket from the dominant eigenvector.
        w, v = np.linalg.eigh(psi.rho)
        vec = v[:, -1]
    else:
        vec = np.asarray(psi, dtype=complex).ravel()
    vec = vec / np.linalg.norm(vec)
    return float(np.real(vec.conj() @ rho @ vec))
