"""Experiment runners behind the presets and the CSV writer.

Every runner returns ``(header, rows, summary)``. Output depends only on the
configuration, so equal configs (seed included) give byte-identical CSV files.

CSV columns per task:

* sweep: ``a_sq, n, p_success_exact, p_success_mc, mc_stderr``
* session / cheater: ``variant, participants, runs_total, runs_valid,
  runs_scored, errors, sift_fraction, error_rate, fidelity``
* attack: ``variant, a_sq, n, photon_number, pickoff, p_success_exact,
  p_success_mc, mc_stderr``
* purity_scan: ``idler_deg, hwp_deg, coincidence_probability``
* fidelity: ``participant, phase_deg, fidelity_exact``
"""
from __future__ import annotations

import csv
import itertools
import math
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import attack, protocol, source
from .config import ExperimentConfig

Table = tuple[list[str], list[list], str]


def _model(config: ExperimentConfig) -> source.SourceModel:
    return source.SourceModel(
        a_sq=config.a_sq,
        visibility=config.effective_visibility,
        photons_per_qubit=config.photons_per_qubit,
        poisson=config.photon_number == "poisson",
    )


def _seed(config: ExperimentConfig, stream: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence(config.seed, spawn_key=(stream,))


def run_sweep(config: ExperimentConfig) -> Table:
    rows = attack.sweep_a2(
        config.variant,
        n_list=config.n_list,
        a2_grid=config.a2_grid,
        mode=config.mode,
        trials=config.trials,
        seed=_seed(config),
        sender_phase=config.sender_phase,
        workers=config.workers,
    )
    header = ["a_sq", "n", "p_success_exact", "p_success_mc", "mc_stderr"]
    body = [[r.a_sq, r.n, r.p_success_exact, r.p_success_mc, r.mc_stderr] for r in rows]
    lines = [f"{config.variant} photon-number-splitting sweep, {len(rows)} points"]
    for r in rows:
        if math.isclose(r.a_sq, 0.6) and r.n == max(config.n_list):
            lines.append(f"a_sq=0.6 n={r.n}: exact={r.p_success_exact:.4f} mc={r.p_success_mc:.4f}")
    worst = max(abs(v - 0.5) for r in rows for v in (r.p_success_exact, r.p_success_mc) if not math.isnan(v))
    lines.append(f"largest departure from 0.5: {worst:.4f}")
    return header, body, "\n".join(lines)


def _session_row(config: ExperimentConfig, stats: protocol.SessionStats) -> list:
    return [
        config.variant,
        config.participants,
        stats.runs_total,
        stats.runs_valid,
        stats.runs_scored,
        stats.errors,
        stats.sift_fraction,
        stats.error_rate,
        stats.fidelity,
    ]


SESSION_HEADER = [
    "variant",
    "participants",
    "runs_total",
    "runs_valid",
    "runs_scored",
    "errors",
    "sift_fraction",
    "error_rate",
    "fidelity",
]


def run_session(config: ExperimentConfig) -> Table:
    stats = protocol.run_session(
        config.variant, _model(config), config.participants, config.runs, _seed(config), config.workers
    )
    summary = (
        f"{config.variant} session, N={config.participants}: sift_fraction={stats.sift_fraction:.4f} "
        f"error_rate={stats.error_rate:.4f} fidelity={stats.fidelity:.4f}"
    )
    return SESSION_HEADER, [_session_row(config, stats)], summary


def run_cheater(config: ExperimentConfig) -> Table:
    stats = protocol.simulate_cheater_intercept_resend(
        config.variant,
        _model(config),
        config.participants,
        config.runs,
        _seed(config),
        cheater=config.cheater,
        check_fraction=config.check_fraction,
        cheater_basis=config.cheater_basis,
        workers=config.workers,
    )
    summary = (
        f"intercept-resend by participant {config.cheater}: checked runs={stats.runs_scored} "
        f"error_rate={stats.error_rate:.4f} (honest rounds on an ideal source give 0)"
    )
    return SESSION_HEADER, [_session_row(config, stats)], summary


def run_attack(config: ExperimentConfig) -> Table:
    sender_bit = protocol.PhaseAction.from_phase(config.sender_phase).secret_bit
    probs = attack.per_photon_probs(config.variant, config.a_sq, config.sender_phase, config.effective_visibility)
    strategy = attack.EveStrategy(config.reversal, config.calibration_runs)
    n = config.photons_per_qubit
    exact = mc = err = math.nan
    if config.mode in ("exact", "both"):
        if config.photon_number == "fixed" and config.pickoff == 1.0:
            exact = attack.eve_success_exact(probs, n, strategy, sender_bit)
        else:
            exact = attack.eve_success_exact_lossy(probs, n, config.photon_number, config.pickoff, strategy, sender_bit)
    if config.mode in ("mc", "both"):
        mc, err = attack.eve_success_montecarlo(
            probs,
            n,
            config.trials,
            _seed(config),
            strategy,
            sender_bit,
            config.photon_number,
            config.pickoff,
            config.workers,
        )
    header = ["variant", "a_sq", "n", "photon_number", "pickoff", "p_success_exact", "p_success_mc", "mc_stderr"]
    row = [config.variant, config.a_sq, n, config.photon_number, config.pickoff, exact, mc, err]
    summary = f"Eve vs {config.variant}, a_sq={config.a_sq} n={n}: exact={exact:.4f} mc={mc:.4f}+-{err:.4f}"
    return header, [row], summary


def run_purity_scan(config: ExperimentConfig) -> Table:
    model = _model(config)
    angles = np.arange(0.0, 180.0 + 1e-9, config.hwp_step)
    rows, lines = [], []
    for idler in config.idler_angles:
        scan = protocol.purity_scan(model, idler, angles)
        rows.extend([idler, theta, p] for theta, p in scan)
        vis = protocol.fringe_visibility(scan)
        lines.append(
            f"idler {idler:g} deg: visibility={vis:.4f} -> purity={source.purity_from_visibility(min(vis, 1.0)):.4f}"
        )
    return ["idler_deg", "hwp_deg", "coincidence_probability"], rows, "\n".join(lines)


def plate_fidelities(
    variant, model: source.SourceModel, n_participants: int
) -> list[tuple[int, float, float]]:
    """Exact success probability per participant and phase setting.

    Each value averages over every valid setting of the other participants.
    """
    tuples = list(itertools.product(protocol.ALL_ACTIONS, repeat=n_participants))
    success = {}
    for actions in tuples:
        if not protocol.is_valid(variant, actions):
            continue
        probs = protocol.outcome_probabilities(variant, model, actions)
        right = sum(
            p for bit, p in enumerate(probs)
            if protocol.decode(bit, (a.secret_bit for a in actions[1:]), sum(a.class_bit == "Y" for a in actions)) == actions[0].secret_bit
        )
        success[actions] = right
    out = []
    for j in range(n_participants):
        for action in protocol.ALL_ACTIONS:
            vals = [v for acts, v in success.items() if acts[j] == action]
            out.append((j + 1, math.degrees(action.phase), math.fsum(vals) / len(vals)))
    return out


def run_fidelity(config: ExperimentConfig) -> Table:
    model = _model(config)
    rows = [list(r) for r in plate_fidelities(config.variant, model, config.participants)]
    stats = protocol.run_session(config.variant, model, config.participants, config.runs, _seed(config), config.workers)
    predicted = source.fidelity_from_visibility(model.visibility)
    summary = (
        f"{config.variant}, visibility={model.visibility:.4f}: predicted fidelity={predicted:.4f}; "
        f"simulated error_rate={stats.error_rate:.4f} over {stats.runs_valid} valid runs"
    )
    return ["participant", "phase_deg", "fidelity_exact"], rows, summary


RUNNERS: dict[str, Callable[[ExperimentConfig], Table]] = {
    "sweep": run_sweep,
    "session": run_session,
    "cheater": run_cheater,
    "attack": run_attack,
    "purity_scan": run_purity_scan,
    "fidelity": run_fidelity,
}


def _fmt(value) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def emit_csv(header: Sequence[str], rows: Sequence[Sequence], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def run_preset(config: ExperimentConfig, out=None) -> tuple[Path, str]:
    """Run the configured experiment, write its CSV and return (path, summary)."""
    header, rows, summary = RUNNERS[config.task](config)
    path = Path(out) if out is not None else Path(f"{config.preset}.csv")
    emit_csv(header, rows, path)
    return path, summary
