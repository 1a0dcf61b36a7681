"""Acceptance criteria for the library, one check per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly with
``python tests/test_acceptance.py``; either way one PASS/FAIL line is printed
per criterion.
"""
from __future__ import annotations

import itertools
import math
import time

import numpy as np
import pytest

from sqqss import protocol
from sqqss.attack import (
    EveStrategy,
    eve_success_closedform,
    eve_success_exact,
    eve_success_montecarlo,
    per_photon_probs,
    sweep_a2,
)
from sqqss.protocol import ALL_ACTIONS, Variant
from sqqss.source import SourceModel, fidelity_from_visibility, visibility_from_purity

A2_GRID = np.linspace(0.5, 1.0, 21)
N_LIST = (10, 25, 50, 100)
MC_TRIALS = 100_000
SEED = 20260101


def criterion_1():
    probs = per_photon_probs(Variant.CORRELATION, 0.6)
    start = time.perf_counter()
    value = eve_success_exact(probs, 100)
    elapsed = time.perf_counter() - start
    ok = abs(value - 0.78) <= 0.01 and elapsed < 10.0
    return ok, f"exact success at a^2=0.6, n=100 is {value:.5f} (target 0.78 +- 0.01) in {elapsed:.2f}s"


def criterion_2():
    rows = sweep_a2(Variant.CORRELATION, N_LIST, A2_GRID, mode="both", trials=MC_TRIALS, seed=SEED)
    problems = []
    for n in N_LIST:
        curve = [r for r in rows if r.n == n]
        exact = np.array([r.p_success_exact for r in curve])
        if np.any(exact < 0.5 - 1e-12):
            problems.append(f"n={n} below 0.5")
        if np.any(np.diff(exact) < 0):
            problems.append(f"n={n} not non-decreasing")
        if abs(exact[0] - 0.5) > 1e-12:
            problems.append(f"n={n} a^2=0.5 gives {exact[0]!r}")
        for r in curve:
            if abs(r.p_success_mc - r.p_success_exact) > 4 * r.mc_stderr:
                problems.append(f"MC off at a^2={r.a_sq:.3f} n={n}")
    worst = max(abs(r.p_success_mc - r.p_success_exact) / r.mc_stderr for r in rows if r.mc_stderr > 0)
    detail = f"{len(rows)} grid points, worst MC deviation {worst:.2f} stderr"
    return not problems, detail + ("; " + ", ".join(problems) if problems else "")


def criterion_3():
    worst_probs = 0.0
    worst_exact = 0.0
    mc_ok = True
    worst_z = 0.0
    ss = np.random.SeedSequence(SEED)
    for a_sq in A2_GRID:
        for action in ALL_ACTIONS:
            probs = per_photon_probs(Variant.ENTANGLEMENT, a_sq, action.phase)
            worst_probs = max(worst_probs, float(np.abs(probs.as_array() - 0.25).max()))
    for a_sq, n in itertools.product(A2_GRID, N_LIST):
        probs = per_photon_probs(Variant.ENTANGLEMENT, a_sq)
        worst_exact = max(worst_exact, abs(eve_success_exact(probs, n) - 0.5))
        est, err = eve_success_montecarlo(probs, n, MC_TRIALS, ss.spawn(1)[0])
        worst_z = max(worst_z, abs(est - 0.5) / err)
        mc_ok &= abs(est - 0.5) <= 4 * err
    ok = worst_probs <= 1e-12 and worst_exact <= 1e-12 and mc_ok
    return ok, (
        f"max |p - 1/4| = {worst_probs:.1e}, max |exact - 1/2| = {worst_exact:.1e}, "
        f"worst MC deviation {worst_z:.2f} stderr"
    )


def criterion_4():
    vis = visibility_from_purity(0.78)
    fid = fidelity_from_visibility(vis)
    stats = protocol.run_session(Variant.ENTANGLEMENT, SourceModel(visibility=vis), 3, 100_000, seed=SEED)
    scan = protocol.purity_scan(SourceModel(visibility=vis), 45.0)
    scan_vis = protocol.fringe_visibility(scan)
    ok = (
        abs(vis - 0.748) <= 5e-4
        and abs(fid - 0.874) <= 5e-4
        and abs(stats.error_rate - 0.13) <= 0.01
        and abs(scan_vis - vis) <= 1e-3
    )
    return ok, (
        f"V={vis:.4f}, F={fid:.4f}, session error_rate={stats.error_rate:.4f} "
        f"over {stats.runs_valid} valid runs, scan visibility={scan_vis:.4f}"
    )


def criterion_5():
    fractions = {}
    for variant in (Variant.CORRELATION, Variant.ENTANGLEMENT):
        stats = protocol.run_session(variant, SourceModel(), 3, 100_000, seed=SEED)
        fractions[variant.value] = stats.sift_fraction
    ok = all(abs(f - 0.5) <= 0.01 for f in fractions.values())
    return ok, ", ".join(f"{k} sift_fraction={v:.4f}" for k, v in fractions.items())


def criterion_6():
    # 1.1e6 runs -> ~5.5e5 valid -> ~1.1e5 checked at the default 20% check fraction.
    stats = protocol.simulate_cheater_intercept_resend(
        Variant.CORRELATION, SourceModel(), 3, 1_100_000, seed=SEED, check_fraction=0.2
    )
    ok = abs(stats.error_rate - 0.25) <= 0.01 and stats.runs_scored >= 100_000
    return ok, f"error_rate={stats.error_rate:.4f} over {stats.runs_scored} checked runs"


def criterion_7():
    problems = []
    grid = np.linspace(0.0, 1.0, 21)
    worst = 0.0
    for a_sq in grid:
        probs = per_photon_probs(Variant.CORRELATION, a_sq)
        for n in range(1, 31):
            diff = abs(eve_success_closedform(probs, n)[0] - eve_success_exact(probs, n))
            worst = max(worst, diff)
    if worst > 1e-10:
        problems.append(f"closed form off by {worst:.1e}")

    oracle = EveStrategy(reversal=True, calibration_runs=None)
    for a_sq in A2_GRID:
        for n in N_LIST:
            upper = eve_success_exact(per_photon_probs(Variant.CORRELATION, a_sq), n)
            lower = eve_success_exact(per_photon_probs(Variant.CORRELATION, 1.0 - a_sq), n, oracle)
            if upper != lower:
                problems.append(f"reversal asymmetry at a^2={a_sq:.3f}, n={n}")

    symmetric = per_photon_probs(Variant.CORRELATION, 0.5)
    worst_half = max(abs(eve_success_exact(symmetric, n) - 0.5) for n in range(1, 101))
    if worst_half > 1e-12:
        problems.append(f"a^2=0.5 gives Eve {0.5 + worst_half}")

    checked = 0
    rng = np.random.default_rng(SEED)
    for n_participants in (2, 3, 4):
        for actions in itertools.product(ALL_ACTIONS, repeat=n_participants):
            record = protocol.run_round(Variant.CORRELATION, SourceModel(), actions, rng)
            if not record.valid:
                continue
            checked += 1
            if protocol.reconstruct_secret(record) != record.sender_bit:
                problems.append(f"reconstruction failed for {actions}")
    detail = (
        f"closed form vs enumeration {worst:.1e}; max |P(a^2=0.5) - 1/2| = {worst_half:.1e}; "
        f"{checked} valid noiseless action tuples reconstructed"
    )
    return not problems, detail + ("; " + ", ".join(problems[:5]) if problems else "")


CRITERIA = [
    ("1 Eve success a^2=0.6, n=100", criterion_1),
    ("2 correlation-based sweep", criterion_2),
    ("3 entanglement-based immunity", criterion_3),
    ("4 purity/visibility/fidelity chain", criterion_4),
    ("5 sifting rate", criterion_5),
    ("6 intercept-resend detection", criterion_6),
    ("7 property suite", criterion_7),
]


def report(name: str, ok: bool, detail: str) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}"


@pytest.mark.parametrize("name, check", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + report(name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for name, check in CRITERIA:
        ok, detail = check()
        results.append(ok)
        print(report(name, ok, detail), flush=True)
    raise SystemExit(0 if all(results) else 1)
