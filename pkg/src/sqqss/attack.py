"""Photon-number-splitting eavesdropper.

Eve diverts ``n`` photons per qubit right after the sender, splits them 50/50
between an x-basis and a y-basis analyzer and guesses the bit belonging to the
detector with the most counts, choosing uniformly among tied detectors. The
``+x``/``+y`` detectors vote for bit 0 and ``-x``/``-y`` for bit 1.

Detector order everywhere is ``(+x, -x, +y, -y)``.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy import stats
from scipy.special import gammaln, xlogy

from . import qcore
from .protocol import PhaseAction, Variant, _as_variant
from .source import SourceModel, emit
from .streams import SeedLike, map_blocks, seed_sequence

log = logging.getLogger(__name__)

MAX_EXACT_N = 200
_SUCCESS_SETS = {0: (0, 2), 1: (1, 3)}


@dataclass(frozen=True)
class PerPhotonProbs:
    p_plus_x: float
    p_minus_x: float
    p_plus_y: float
    p_minus_y: float

    def __post_init__(self):
        values = self.as_array()
        if np.any(values < -1e-15) or np.any(values > 1 + 1e-15):
            raise ValueError(f"probabilities must lie in [0, 1], got {values}")
        if abs(values.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {values.sum()!r}, expected 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_plus_x, self.p_minus_x, self.p_plus_y, self.p_minus_y])

    def mirrored(self) -> "PerPhotonProbs":
        """Swap the roles of the plus and minus detectors."""
        return PerPhotonProbs(self.p_minus_x, self.p_plus_x, self.p_minus_y, self.p_plus_y)


@dataclass(frozen=True)
class EveStrategy:
    """How Eve turns detector counts into a guess.

    With ``reversal`` set, Eve flips every guess when she concludes that the
    minus detectors are favoured. ``calibration_runs`` is the number of publicly
    checked runs she scores her own guesses on to decide this (a tie decides by
    coin flip); ``None`` stands for perfect knowledge of the source asymmetry.
    """

    reversal: bool = False
    calibration_runs: int | None = 20

    def __post_init__(self):
        if self.calibration_runs is not None and self.calibration_runs < 1:
            raise ValueError("calibration_runs must be positive or None")


STRAIGHT = EveStrategy()


def per_photon_probs(
    variant,
    a_sq: float,
    sender_phase: float = 0.0,
    visibility: float = 1.0,
) -> PerPhotonProbs:
    """Detection probabilities for one photon tapped right after the sender.

    Eve has no access to the idler, so she sees the reduced signal state; the
    50-50 beam splitter in front of her analyzers halves each basis.
    """
    variant = _as_variant(variant)
    state = emit(SourceModel(a_sq=a_sq, visibility=visibility))
    if variant is not Variant.ENTANGLEMENT:
        state = qcore.apply_hwp_h_to_x(state, "signal")
    state = qcore.apply_phase(state, sender_phase, "signal")
    rho = qcore.reduced_state(state, "signal")
    px, mx = qcore.measure_probs(rho, "x")
    py, my = qcore.measure_probs(rho, "y")
    return PerPhotonProbs(px / 2, mx / 2, py / 2, my / 2)


@functools.lru_cache(maxsize=16)
def _compositions(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All (i, j, k, l) with i+j+k+l = n and their log multinomial coefficients."""
    i, j, k = np.meshgrid(np.arange(n + 1), np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = (i + j + k) <= n
    counts = np.stack([i[keep], j[keep], k[keep]], axis=1)
    counts = np.column_stack([counts, n - counts.sum(axis=1)])
    log_coef = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1)
    counts.flags.writeable = False
    log_coef.flags.writeable = False
    return counts, log_coef


def multinomial_weights(probs: PerPhotonProbs, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Counts table and the probability of each row under the multinomial law."""
    if not 0 <= n <= MAX_EXACT_N:
        raise ValueError(f"exact enumeration supports 0 <= n <= {MAX_EXACT_N}, got {n}")
    counts, log_coef = _compositions(n)
    log_w = log_coef + xlogy(counts, probs.as_array()).sum(axis=1)
    return counts, np.exp(log_w)


@functools.lru_cache(maxsize=32)
def _tie_credit(n: int, success: tuple[int, int]) -> np.ndarray:
    counts, _ = _compositions(n)
    top = counts == counts.max(axis=1, keepdims=True)
    return top[:, list(success)].sum(axis=1) / top.sum(axis=1)


def _straight_success(probs: PerPhotonProbs, n: int, sender_bit: int) -> float:
    if n == 0:
        return 0.5
    _, weights = multinomial_weights(probs, n)
    return math.fsum(weights * _tie_credit(n, _SUCCESS_SETS[sender_bit]))


def _prefers_reversal(probs: PerPhotonProbs, sender_bit: int) -> bool:
    p = probs.as_array()
    good, bad = _SUCCESS_SETS[sender_bit], _SUCCESS_SETS[1 - sender_bit]
    return p[list(bad)].sum() > p[list(good)].sum()


def reversal_probability(success: float, calibration_runs: int) -> float:
    """Chance that fewer than half of Eve's calibration guesses come out right."""
    m = calibration_runs
    correct = stats.binom(m, success)
    p_less = correct.cdf((m - 1) // 2)
    p_tie = correct.pmf(m // 2) if m % 2 == 0 else 0.0
    return float(p_less + 0.5 * p_tie)


def _apply_strategy(
    straight: float,
    reversed_: float,
    probs: PerPhotonProbs,
    sender_bit: int,
    strategy: EveStrategy,
) -> float:
    if not strategy.reversal:
        return straight
    if strategy.calibration_runs is None:
        return reversed_ if _prefers_reversal(probs, sender_bit) else straight
    p_rev = reversal_probability(straight, strategy.calibration_runs)
    return (1.0 - p_rev) * straight + p_rev * reversed_


def eve_success_exact(
    probs: PerPhotonProbs,
    n: int,
    strategy: EveStrategy = STRAIGHT,
    sender_bit: int = 0,
) -> float:
    """Probability that Eve guesses the sender's bit from ``n`` tapped photons.

    Sums the multinomial law over every count vector, crediting each with the
    fraction of tied top detectors that vote for the right bit.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    straight = _straight_success(probs, n, sender_bit)
    reversed_ = _straight_success(probs.mirrored(), n, sender_bit) if strategy.reversal else straight
    return _apply_strategy(straight, reversed_, probs, sender_bit, strategy)


def detected_photon_law(
    n: int,
    photon_number: Literal["fixed", "poisson"] = "fixed",
    pickoff: float = 1.0,
    tail: float = 1e-16,
) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of photons Eve actually detects per qubit.

    ``n`` photons (or a Poisson number with mean ``n``) reach her tap and each
    is detected with probability ``pickoff``.
    """
    if not 0.0 < pickoff <= 1.0:
        raise ValueError("pickoff must lie in (0, 1]")
    if photon_number == "fixed":
        support = np.arange(n + 1)
        return support, stats.binom(n, pickoff).pmf(support)
    if photon_number == "poisson":
        law = stats.poisson(n * pickoff)
        support = np.arange(int(law.isf(tail)) + 1)
        return support, law.pmf(support)
    raise ValueError(f"unknown photon_number {photon_number!r}")


def eve_success_exact_lossy(
    probs: PerPhotonProbs,
    n: int,
    photon_number: Literal["fixed", "poisson"] = "fixed",
    pickoff: float = 1.0,
    strategy: EveStrategy = STRAIGHT,
    sender_bit: int = 0,
) -> float:
    """Exact success when Eve's detected photon number is itself random.

    A qubit with no detected photons gets a uniformly random guess.
    """
    support, weights = detected_photon_law(n, photon_number, pickoff)
    if support[-1] > MAX_EXACT_N:
        raise ValueError(f"detected photon number reaches {support[-1]} > {MAX_EXACT_N}")
    straight = math.fsum(w * _straight_success(probs, int(d), sender_bit) for d, w in zip(support, weights))
    mirrored = probs.mirrored()
    reversed_ = math.fsum(w * _straight_success(mirrored, int(d), sender_bit) for d, w in zip(support, weights))
    return _apply_strategy(straight, reversed_, probs, sender_bit, strategy)


def tie_terms(probs: PerPhotonProbs, n: int) -> dict[str, float]:
    """Probabilities of the leading-detector patterns used by the closed form.

    ``i`` counts +x, ``j`` counts -x and ``k``, ``l`` the two y detectors. A key
    such as ``"i=k"`` is the probability that exactly those detectors share the
    strict maximum.
    """
    counts, weights = multinomial_weights(probs, n)
    top = counts == counts.max(axis=1, keepdims=True)
    patterns = {
        "i": (1, 0, 0, 0),
        "j": (0, 1, 0, 0),
        "i=k": (1, 0, 1, 0),
        "j=k": (0, 1, 1, 0),
        "i=k=l": (1, 0, 1, 1),
        "j=k=l": (0, 1, 1, 1),
    }
    out = {}
    for name, pattern in patterns.items():
        mask = np.all(top == np.array(pattern, dtype=bool), axis=1)
        out[name] = math.fsum(weights[mask])
    return out


def eve_success_closedform(probs: PerPhotonProbs, n: int) -> tuple[float, float]:
    """Tie-aware closed form and its large-``n`` approximation.

    Valid when the two detectors of one basis are equally likely, which is the
    case for any sender phase; if the balanced pair is x rather than y the
    bases are relabelled first. Returns ``(full, approximation)``.
    """
    p = probs.as_array()
    if not math.isclose(p[2], p[3], rel_tol=0, abs_tol=1e-15):
        if not math.isclose(p[0], p[1], rel_tol=0, abs_tol=1e-15):
            raise ValueError("closed form needs one basis with balanced detectors")
        probs = PerPhotonProbs(probs.p_plus_y, probs.p_minus_y, probs.p_plus_x, probs.p_minus_x)
    t = tie_terms(probs, n)
    approx = 0.5 * (1.0 + t["i"] - t["j"])
    full = 0.5 * (1.0 + t["i"] - t["j"] + t["i=k"] - t["j=k"]) + (t["i=k=l"] - t["j=k=l"]) / 6.0
    return full, approx


def _sample_counts(
    rng: np.random.Generator,
    p: np.ndarray,
    n: int,
    shape: tuple[int, ...],
    photon_number: str,
    pickoff: float,
) -> np.ndarray:
    if photon_number == "poisson":
        return rng.poisson(n * pickoff * p, size=shape + (4,))
    if pickoff < 1.0:
        cats = np.append(pickoff * p, 1.0 - pickoff)
        return rng.multinomial(n, cats, size=shape)[..., :4]
    return rng.multinomial(n, p, size=shape)


def _guess_is_right(rng: np.random.Generator, counts: np.ndarray, sender_bit: int) -> np.ndarray:
    # Continuous jitter below 1 breaks ties uniformly without reordering counts.
    jittered = counts + rng.random(counts.shape)
    winner = jittered.argmax(axis=-1)
    return np.isin(winner, _SUCCESS_SETS[sender_bit])


def eve_success_montecarlo(
    probs: PerPhotonProbs,
    n: int,
    trials: int,
    seed: SeedLike = None,
    strategy: EveStrategy = STRAIGHT,
    sender_bit: int = 0,
    photon_number: Literal["fixed", "poisson"] = "fixed",
    pickoff: float = 1.0,
    workers: int = 1,
) -> tuple[float, float]:
    """Sampled success rate and its binomial standard error.

    When ``strategy`` calibrates, every trial gets its own independent set of
    calibration runs, so the estimate targets :func:`eve_success_exact`.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if photon_number not in ("fixed", "poisson"):
        raise ValueError(f"unknown photon_number {photon_number!r}")
    p = probs.as_array().clip(0.0, None)
    p = p / p.sum()
    oracle_flip = strategy.reversal and strategy.calibration_runs is None and _prefers_reversal(probs, sender_bit)

    def block(size: int, rng: np.random.Generator) -> tuple[int, int]:
        counts = _sample_counts(rng, p, n, (size,), photon_number, pickoff)
        right = _guess_is_right(rng, counts, sender_bit)
        blank = int((counts.sum(axis=1) == 0).sum())
        if strategy.reversal and strategy.calibration_runs is not None:
            m = strategy.calibration_runs
            cal = _sample_counts(rng, p, n, (size, m), photon_number, pickoff)
            score = _guess_is_right(rng, cal, sender_bit).sum(axis=1)
            flip = (2 * score < m) | ((2 * score == m) & (rng.random(size) < 0.5))
            right = right ^ flip
        elif oracle_flip:
            right = ~right
        return int(right.sum()), blank

    results = map_blocks(block, trials, seed, workers)
    hits = sum(r[0] for r in results)
    blank = sum(r[1] for r in results)
    if blank:
        log.info("%d of %d trials detected no photons; guessed at random", blank, trials)
    estimate = hits / trials
    stderr = math.sqrt(max(estimate * (1.0 - estimate), 0.0) / trials)
    return estimate, stderr


@dataclass(frozen=True)
class SweepRow:
    a_sq: float
    n: int
    p_success_exact: float
    p_success_mc: float
    mc_stderr: float


def sweep_a2(
    variant,
    n_list: Sequence[int] = (10, 25, 50, 100),
    a2_grid: Iterable[float] | None = None,
    mode: Literal["exact", "mc", "both"] = "exact",
    trials: int = 100_000,
    seed: SeedLike = None,
    sender_phase: float = 0.0,
    workers: int = 1,
) -> list[SweepRow]:
    """Eve's success over a grid of source asymmetries and photon numbers.

    Points below ``a_sq = 0.5`` are filled from their mirror ``1 - a_sq``, where
    Eve reverses her guesses. Columns not requested by ``mode`` hold NaN.
    """
    if mode not in ("exact", "mc", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    if a2_grid is None:
        a2_grid = np.linspace(0.5, 1.0, 21)
    grid = [float(a) for a in a2_grid]
    if any(not 0.0 <= a <= 1.0 for a in grid):
        raise ValueError("a_sq grid must lie within [0, 1]")
    sender_bit = PhaseAction.from_phase(sender_phase).secret_bit
    points = [(a, int(n)) for a in grid for n in n_list]
    children = seed_sequence(seed).spawn(len(points))
    rows = []
    for (a_sq, n), child in zip(points, children):
        probs = per_photon_probs(variant, max(a_sq, 1.0 - a_sq), sender_phase)
        exact = mc = err = math.nan
        if mode in ("exact", "both"):
            exact = eve_success_exact(probs, n, sender_bit=sender_bit)
        if mode in ("mc", "both"):
            mc, err = eve_success_montecarlo(probs, n, trials, child, sender_bit=sender_bit, workers=workers)
        rows.append(SweepRow(a_sq, n, exact, mc, err))
    return rows
