"""Single-qubit secret sharing rounds and sessions.

Participants are numbered from 1 (the sender) to N. Each applies one of four
phase shifts ``q * pi/2`` with ``q`` in 0..3; ``q`` odd is class Y and
``q // 2`` is the participant's secret (or shadow) bit, so that
``phase = pi/2 * [class Y] + pi * secret``.

For a valid run measured in basis ``m`` (0 for x, 1 for y) the sender's bit is

    outcome ^ (xor of recipients' bits) ^ (((#Y - m) / 2) mod 2)

which follows from requiring ``sum(phase) - m*pi/2 == pi * outcome (mod 2pi)``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from . import qcore
from .qcore import Projector
from .source import SourceModel, emit
from .streams import SeedLike, map_blocks

HALF_PI = math.pi / 2


class Variant(str, enum.Enum):
    CORRELATION = "correlation"
    ENTANGLEMENT = "entanglement"
    SEND_BACK = "send-back"

    @property
    def idler_axis(self) -> str:
        return "+x" if self is Variant.ENTANGLEMENT else "H"


class InvalidRun(ValueError):
    """Raised when decoding a run that was discarded during sifting."""


@dataclass(frozen=True)
class PhaseAction:
    class_bit: Literal["X", "Y"]
    secret_bit: int

    def __post_init__(self):
        if self.class_bit not in ("X", "Y"):
            raise ValueError(f"class_bit must be 'X' or 'Y', got {self.class_bit!r}")
        if self.secret_bit not in (0, 1):
            raise ValueError(f"secret_bit must be 0 or 1, got {self.secret_bit!r}")

    @property
    def quarter_turns(self) -> int:
        return (self.class_bit == "Y") + 2 * self.secret_bit

    @property
    def phase(self) -> float:
        return self.quarter_turns * HALF_PI

    @classmethod
    def from_quarter_turns(cls, q: int) -> "PhaseAction":
        q = int(q) % 4
        return cls("Y" if q % 2 else "X", q // 2)

    @classmethod
    def from_phase(cls, phi: float) -> "PhaseAction":
        q = phi / HALF_PI
        if abs(q - round(q)) > 1e-9:
            raise ValueError(f"phase {phi} is not a multiple of pi/2")
        return cls.from_quarter_turns(round(q))


ALL_ACTIONS: tuple[PhaseAction, ...] = tuple(PhaseAction.from_quarter_turns(q) for q in range(4))


@dataclass(frozen=True)
class RunRecord:
    variant: Variant
    actions: tuple[PhaseAction, ...]
    outcome_bit: int | None
    valid: bool
    measurement_basis: Literal["x", "y"] = "x"

    @property
    def class_y_count(self) -> int:
        return sum(a.class_bit == "Y" for a in self.actions)

    @property
    def sender_bit(self) -> int:
        return self.actions[0].secret_bit


@dataclass(frozen=True)
class SessionStats:
    """Tallies from a batch of runs.

    ``runs_scored`` is the subset of valid runs whose errors were counted: every
    valid run for an honest session, the checked subset for cheating tests.
    """

    runs_total: int
    runs_valid: int
    runs_scored: int
    errors: int

    @property
    def sift_fraction(self) -> float:
        return self.runs_valid / self.runs_total if self.runs_total else float("nan")

    @property
    def error_rate(self) -> float:
        return self.errors / self.runs_scored if self.runs_scored else float("nan")

    @property
    def fidelity(self) -> float:
        return 1.0 - self.error_rate

    def __add__(self, other: "SessionStats") -> "SessionStats":
        return SessionStats(
            self.runs_total + other.runs_total,
            self.runs_valid + other.runs_valid,
            self.runs_scored + other.runs_scored,
            self.errors + other.errors,
        )


EMPTY_STATS = SessionStats(0, 0, 0, 0)


def _as_variant(variant) -> Variant:
    return variant if isinstance(variant, Variant) else Variant(variant)


def _check_participants(variant: Variant, n_participants: int) -> None:
    if n_participants < 2:
        raise ValueError("need a sender and at least one recipient")
    if variant is Variant.SEND_BACK and n_participants % 2 == 0:
        # Even class-X parity only coincides with a deterministic outcome when
        # the number of operations N + 1 is even.
        raise ValueError("the send-back validity rule requires an odd number of participants")


def is_valid(variant, actions: Sequence[PhaseAction], measurement_basis: str = "x") -> bool:
    """Sifting rule applied to the publicly announced classes."""
    variant = _as_variant(variant)
    if variant is Variant.SEND_BACK:
        x_count = sum(a.class_bit == "X" for a in actions) + (measurement_basis == "x")
        return x_count % 2 == 0
    return sum(a.class_bit == "Y" for a in actions) % 2 == 0


def signal_state(variant, model: SourceModel) -> tuple[np.ndarray, float]:
    """Signal photon entering the chain, given a coincidence, and the gate probability."""
    variant = _as_variant(variant)
    rho, prob = qcore.condition_on(emit(model), Projector(variant.idler_axis, "idler"))
    if variant is not Variant.ENTANGLEMENT:
        rho = qcore.apply_hwp_h_to_x(rho)
    return rho, prob


def prepare_signal(variant, model: SourceModel, rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    rho, prob = signal_state(variant, model)
    return rho, bool(rng.random() < prob)


def run_round(
    variant,
    model: SourceModel,
    actions: Sequence[PhaseAction],
    rng: np.random.Generator,
    measurement_basis: Literal["x", "y"] | None = None,
) -> RunRecord:
    """Simulate one photon passing through every participant."""
    variant = _as_variant(variant)
    actions = tuple(actions)
    _check_participants(variant, len(actions))
    if variant is Variant.SEND_BACK:
        if measurement_basis is None:
            measurement_basis = "y" if rng.random() < 0.5 else "x"
    elif measurement_basis not in (None, "x"):
        raise ValueError("only the send-back variant measures outside the x basis")
    measurement_basis = measurement_basis or "x"

    # Pairs without a coincidence are never counted; draw again.
    while True:
        rho, accepted = prepare_signal(variant, model, rng)
        if accepted:
            break
    for action in actions:
        rho = qcore.apply_phase(rho, action.phase)
    p_plus, _ = qcore.measure_probs(rho, measurement_basis)
    outcome = 0 if rng.random() < p_plus else 1
    return RunRecord(
        variant=variant,
        actions=actions,
        outcome_bit=outcome,
        valid=is_valid(variant, actions, measurement_basis),
        measurement_basis=measurement_basis,
    )


def decode(outcome_bit: int, recipient_bits: Iterable[int], y_count: int, basis_bit: int = 0) -> int:
    bit = outcome_bit
    for b in recipient_bits:
        bit ^= b
    return bit ^ (((y_count - basis_bit) // 2) % 2)


def reconstruct_secret(record: RunRecord) -> int:
    """Recover the sender's bit from the outcome and all recipients' shadows."""
    if not record.valid or record.outcome_bit is None:
        raise InvalidRun("run was discarded during sifting")
    return decode(
        record.outcome_bit,
        (a.secret_bit for a in record.actions[1:]),
        record.class_y_count,
        int(record.measurement_basis == "y"),
    )


def announcement_order(record: RunRecord) -> list[tuple[int, str]]:
    """Public class announcements in the order they are made.

    Recipients speak first; the sender then reveals the preparation class and,
    for the send-back variant, the measurement class.
    """
    order = [(j + 1, a.class_bit) for j, a in enumerate(record.actions) if j > 0]
    order.append((1, record.actions[0].class_bit))
    if record.variant is Variant.SEND_BACK:
        order.append((1, "X" if record.measurement_basis == "x" else "Y"))
    return order


def _plus_table(rho: np.ndarray) -> np.ndarray:
    """p(+) for every total phase (quarter turns 0..3) and basis (x, y)."""
    table = np.empty((2, 4))
    for m, basis in enumerate(("x", "y")):
        for q in range(4):
            table[m, q] = qcore.measure_probs(qcore.apply_phase(rho, q * HALF_PI), basis)[0]
    return table


def _sample_actions(rng: np.random.Generator, size: int, n_participants: int) -> np.ndarray:
    return rng.integers(0, 4, size=(size, n_participants))


def _score_block(
    variant: Variant,
    q: np.ndarray,
    basis: np.ndarray,
    outcome: np.ndarray,
    check_fraction: float,
    rng: np.random.Generator,
) -> SessionStats:
    y_count = (q % 2).sum(axis=1)
    if variant is Variant.SEND_BACK:
        x_count = (1 - q % 2).sum(axis=1) + (1 - basis)
        valid = x_count % 2 == 0
    else:
        valid = y_count % 2 == 0
    secrets = q // 2
    recipients = np.bitwise_xor.reduce(secrets[:, 1:], axis=1)
    decoded = outcome ^ recipients ^ (((y_count - basis) // 2) % 2)
    wrong = decoded != secrets[:, 0]
    scored = valid & (rng.random(len(q)) < check_fraction) if check_fraction < 1 else valid
    return SessionStats(
        runs_total=len(q),
        runs_valid=int(valid.sum()),
        runs_scored=int(scored.sum()),
        errors=int((wrong & scored).sum()),
    )


def _draw_basis(variant: Variant, rng: np.random.Generator, size: int) -> np.ndarray:
    if variant is Variant.SEND_BACK:
        return rng.integers(0, 2, size=size)
    return np.zeros(size, dtype=np.int64)


def run_session(
    variant,
    model: SourceModel,
    n_participants: int,
    runs: int,
    seed: SeedLike = None,
    workers: int = 1,
) -> SessionStats:
    """Many rounds with uniformly random actions; errors scored on every valid run.

    Rounds are sampled in vectorized blocks using outcome probabilities computed
    once from the conditioned signal state; this draws from the same law as
    repeated :func:`run_round` calls.
    """
    variant = _as_variant(variant)
    _check_participants(variant, n_participants)
    if runs < 1:
        raise ValueError("runs must be at least 1")
    table = _plus_table(signal_state(variant, model)[0])

    def block(size: int, rng: np.random.Generator) -> SessionStats:
        q = _sample_actions(rng, size, n_participants)
        basis = _draw_basis(variant, rng, size)
        p_plus = table[basis, q.sum(axis=1) % 4]
        outcome = (rng.random(size) >= p_plus).astype(np.int64)
        return _score_block(variant, q, basis, outcome, 1.0, rng)

    return sum(map_blocks(block, runs, seed, workers), EMPTY_STATS)


def simulate_cheater_intercept_resend(
    variant,
    model: SourceModel,
    n_participants: int,
    runs: int,
    seed: SeedLike = None,
    cheater: int = 2,
    check_fraction: float = 0.2,
    cheater_basis: Literal["random", "oracle"] = "random",
    workers: int = 1,
) -> SessionStats:
    """Session with one recipient measuring and resending the transiting photon.

    Participant ``cheater`` measures the incoming photon in x or y, resends the
    eigenstate it observed, then applies its own phase as usual. Errors are
    scored on a random ``check_fraction`` of the valid runs. The ``"oracle"``
    cheater always picks the basis the incoming state is prepared in.
    """
    variant = _as_variant(variant)
    _check_participants(variant, n_participants)
    if not 2 <= cheater <= n_participants:
        raise ValueError(f"cheater must be a recipient index in 2..{n_participants}")
    if not 0.0 < check_fraction <= 1.0:
        raise ValueError("check_fraction must lie in (0, 1]")
    if cheater_basis not in ("random", "oracle"):
        raise ValueError(f"unknown cheater_basis {cheater_basis!r}")

    rho = signal_state(variant, model)[0]
    intercept = _plus_table(rho)
    # resent[b, r] is the p(+) table of the eigenstate resent after measuring
    # basis b with result r.
    eigen = {(0, 0): qcore.PLUS_X, (0, 1): qcore.MINUS_X, (1, 0): qcore.PLUS_Y, (1, 1): qcore.MINUS_Y}
    resent = np.empty((2, 2, 2, 4))
    for (b, r), ket in eigen.items():
        resent[b, r] = _plus_table(ket.density())

    def block(size: int, rng: np.random.Generator) -> SessionStats:
        q = _sample_actions(rng, size, n_participants)
        basis = _draw_basis(variant, rng, size)
        before = q[:, : cheater - 1].sum(axis=1) % 4
        after = q[:, cheater - 1 :].sum(axis=1) % 4
        if cheater_basis == "oracle":
            spy_basis = before % 2
        else:
            spy_basis = rng.integers(0, 2, size=size)
        spy_result = (rng.random(size) >= intercept[spy_basis, before]).astype(np.int64)
        p_plus = resent[spy_basis, spy_result, basis, after]
        outcome = (rng.random(size) >= p_plus).astype(np.int64)
        return _score_block(variant, q, basis, outcome, check_fraction, rng)

    return sum(map_blocks(block, runs, seed, workers), EMPTY_STATS)


def outcome_probabilities(variant, model: SourceModel, actions: Sequence[PhaseAction], measurement_basis: str = "x") -> tuple[float, float]:
    """Exact ``(p_plus, p_minus)`` of the final measurement for fixed actions."""
    rho = signal_state(variant, model)[0]
    for action in actions:
        rho = qcore.apply_phase(rho, action.phase)
    return qcore.measure_probs(rho, measurement_basis)


def marginal_signal_state(
    variant,
    model: SourceModel,
    n_participants: int,
    known: Mapping[int, PhaseAction],
) -> np.ndarray:
    """Pre-measurement signal state averaged over every action not in ``known``.

    ``known`` maps participant index (1 = sender) to a fixed action; all other
    participants' actions are averaged uniformly and exhaustively.
    """
    rho0 = signal_state(variant, model)[0]
    unknown = [j for j in range(1, n_participants + 1) if j not in known]
    fixed_phase = sum(a.phase for a in known.values())
    total = np.zeros((2, 2), dtype=complex)
    combos = list(itertools.product(ALL_ACTIONS, repeat=len(unknown)))
    for combo in combos:
        phase = fixed_phase + sum(a.phase for a in combo)
        total += qcore.apply_phase(rho0, phase)
    return total / len(combos)


def purity_scan(
    model: SourceModel,
    idler_angle: float = 45.0,
    hwp_angles: Iterable[float] | None = None,
) -> list[tuple[float, float]]:
    """Coincidence probability versus signal half-wave-plate angle (degrees).

    The idler passes a linear polarizer at ``idler_angle``; the signal passes a
    half-wave plate at angle ``theta`` followed by a polarizing beam splitter,
    which together transmit linear polarization at ``2 * theta``.
    """
    if hwp_angles is None:
        hwp_angles = np.arange(0.0, 180.0 + 1e-9, 2.5)
    state = emit(model)
    idler = qcore.linear_polarization(math.radians(idler_angle))
    return [
        (float(theta), qcore.joint_probability(state, qcore.linear_polarization(math.radians(2 * theta)), idler))
        for theta in hwp_angles
    ]


def fringe_visibility(scan: Sequence[tuple[float, float]]) -> float:
    probs = np.array([p for _, p in scan])
    hi, lo = probs.max(), probs.min()
    return float((hi - lo) / (hi + lo))
