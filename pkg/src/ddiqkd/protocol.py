"""Full protocol sessions: honest baseline and attacked runs, with sifting,
key mapping and aggregate statistics.

Per slot the sender draws one of the four protocol phases and Bob draws his
modulator phase, both uniformly.  Honestly, a single photon survives the
channel with probability ``channel_transmittance`` and lands on a detector
with the Born-rule port probabilities; under attack, Eve intercepts at the
sender's output (so channel loss never touches her bright resends), measures
in a random basis and forges a pulse whose detector-port energies drive the
configured click model.

Key mapping: Bob's bit is the phase-index bit of his setting (0 for the
first phase of either basis, 1 for the second).  The sender's bit is her
phase-index bit XOR a correction looked up from the announced Bell outcome
and the shared basis.  The lookup is pinned in ``KEY_CORRECTION`` and
re-derivable by brute force over honest statistics, where it is the unique
table making matched-basis honest trials agree always.  Eve, who hears both
the announced outcome and the sifted basis, applies the same correction to
her measurement result.

Randomness: all of a session's draws come from the seed in one fixed order,
so slot ``i`` consumes a fixed block of the stream.  Identical configs (seed
included) give bit-identical trial streams, and chunked or parallel
evaluation of the per-slot map cannot change the result.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .attacks import (
    BASES,
    AsymmetricThreshold,
    EvePulse,
    EveStrategy,
    FeasibilityError,
    PhaseDeviation,
    SingleDetectorBlinding,
    TimeShift,
    WavelengthBS,
    forge_pulse,
    phase_index,
    plan_time_shift,
)
from .detectors import (
    DetectorResponseCurve,
    TriggerPulse,
    blinded_click_probability,
    curve_map,
    default_curves,
    temporal_click_probability,
)
from .optics import DETECTOR_PORTS, ValidationError, single_photon_probabilities
from .receiver import (
    BB84_PHASES,
    BellOutcome,
    OUTCOME_BY_DETECTOR,
    ReceiverConfig,
    general_port_amplitudes,
)


# --------------------------------------------------------------------------
# detector models


@dataclass(frozen=True)
class IdealDetectors:
    """Honest receiver detectors: efficiency and dark counts, default ideal."""

    efficiency: float = 1.0
    dark_count_prob: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.efficiency <= 1.0):
            raise ValidationError(f"efficiency {self.efficiency} outside [0, 1]")
        if not (0.0 <= self.dark_count_prob < 1.0):
            raise ValidationError(f"dark count probability {self.dark_count_prob} outside [0, 1)")


@dataclass(frozen=True)
class ThresholdModel:
    """Blinded detectors in the sharp-threshold limit: click iff energy >= mu_th."""

    mu_th: float

    def __post_init__(self) -> None:
        if not self.mu_th > 0:
            raise ValidationError(f"mu_th {self.mu_th} must be > 0")


@dataclass(frozen=True)
class BlindedModel:
    """Blinded detectors driven by measured response curves (power-domain)."""

    curves: tuple[DetectorResponseCurve, ...]


@dataclass(frozen=True)
class TemporalModel:
    """Blinded detectors with their temporal response windows applied."""

    curves: tuple[DetectorResponseCurve, ...]


DetectorModel = IdealDetectors | ThresholdModel | BlindedModel | TemporalModel


@dataclass(frozen=True)
class SessionConfig:
    """One protocol session.  ``detectors=None`` derives the natural model
    from the attack (sharp thresholds for the threshold attacks, the bundled
    curve fixture for the curve-driven ones, ideal detectors honestly)."""

    n_slots: int
    seed: int = 0
    channel_transmittance: float = 1.0
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    detectors: DetectorModel | None = None
    attack: EveStrategy | None = None

    def __post_init__(self) -> None:
        if self.n_slots < 1:
            raise ValidationError("n_slots must be >= 1")
        if not (0.0 < self.channel_transmittance <= 1.0):
            raise ValidationError(
                f"channel transmittance {self.channel_transmittance} outside (0, 1]"
            )


# --------------------------------------------------------------------------
# key mapping

_B = BellOutcome

#: Correction XOR-ed onto the sender's phase-index bit, by (basis, outcome).
KEY_CORRECTION = {
    ("Z", _B.PSI_PLUS): 0,
    ("Z", _B.PHI_PLUS): 0,
    ("Z", _B.PSI_MINUS): 1,
    ("Z", _B.PHI_MINUS): 1,
    ("X", _B.PSI_PLUS): 0,
    ("X", _B.PHI_PLUS): 1,
    ("X", _B.PSI_MINUS): 1,
    ("X", _B.PHI_MINUS): 0,
}


def derive_key_correction() -> dict[tuple[str, BellOutcome], int]:
    """Brute-force the correction lookup from honest matched-basis statistics.

    For every matched settings pair and every outcome of nonzero probability,
    zero error forces correction = alice_phase_bit XOR bob_phase_bit; the
    table is consistent and complete, and equals ``KEY_CORRECTION``.
    """
    from .receiver import balanced_port_amplitudes

    table: dict[tuple[str, BellOutcome], int] = {}
    for ti in range(4):
        for bi in range(4):
            if ti % 2 != bi % 2:
                continue
            probs = single_photon_probabilities(
                balanced_port_amplitudes(1.0, BB84_PHASES[ti], BB84_PHASES[bi])
            )
            for det in range(4):
                if probs[det] < 1e-12:
                    continue
                needed = (ti // 2) ^ (bi // 2)
                key = (BASES[ti % 2], OUTCOME_BY_DETECTOR[det])
                if table.setdefault(key, needed) != needed:
                    raise RuntimeError(f"inconsistent key correction at {key}")
    return table


def sift_and_key(theta_a: float, phi_b: float, outcome: BellOutcome) -> tuple[int, int] | None:
    """Sift one single-click slot; (alice_bit, bob_bit) or None on basis mismatch.

    ``theta_a`` and ``phi_b`` are the nominal chosen settings (modulator
    deviations do not change what the parties announce).
    """
    if outcome in (BellOutcome.NO_CLICK, BellOutcome.DOUBLE_CLICK):
        raise ValidationError(f"sift_and_key requires a single click, got {outcome}")
    ti, bi = phase_index(theta_a), phase_index(phi_b)
    if ti % 2 != bi % 2:
        return None
    correction = KEY_CORRECTION[(BASES[ti % 2], outcome)]
    return ((ti // 2) ^ correction, bi // 2)


# --------------------------------------------------------------------------
# records and statistics


@dataclass(frozen=True)
class TrialRecord:
    """One protocol slot, as recorded for per-trial export."""

    slot: int
    theta_a: float
    phi_b: float
    eve: tuple[str, float, EvePulse] | None  # (basis, measured phase, pulse)
    energies: tuple[float, float, float, float]
    outcome: BellOutcome
    sifted: bool
    alice_bit: int | None = None
    bob_bit: int | None = None
    eve_bit: int | None = None


@dataclass(frozen=True)
class SessionStats:
    """Aggregates of one session.

    ``bell_histogram`` holds single-click tallies per Bell outcome: counts
    for sampled sessions, per-slot probabilities for exact enumeration
    (``n_slots`` is None in that case).  ``qber`` is 0.0 when nothing was
    sifted; ``eve_knowledge`` is None for honest sessions.
    """

    n_slots: int | None
    gain: float
    sifted_rate: float
    qber: float
    double_click_rate: float
    bell_histogram: tuple[float, float, float, float]
    eve_knowledge: float | None

    def to_dict(self) -> dict:
        hist = {
            outcome.value: value
            for outcome, value in zip(OUTCOME_BY_DETECTOR, self.bell_histogram)
        }
        return {
            "n_slots": self.n_slots,
            "gain": self.gain,
            "sifted_rate": self.sifted_rate,
            "qber": self.qber,
            "double_click_rate": self.double_click_rate,
            "bell_histogram": hist,
            "eve_knowledge": self.eve_knowledge,
        }


# --------------------------------------------------------------------------
# model resolution and click-probability tables

_CORR = np.array(
    [[KEY_CORRECTION[(b, o)] for o in OUTCOME_BY_DETECTOR] for b in BASES], dtype=np.int64
)


def _auto_model(attack: EveStrategy | None) -> DetectorModel:
    if attack is None:
        return IdealDetectors()
    if isinstance(attack, (SingleDetectorBlinding, PhaseDeviation, WavelengthBS)):
        return ThresholdModel(attack.mu_th)
    if isinstance(attack, AsymmetricThreshold):
        return BlindedModel(tuple(default_curves()))
    if isinstance(attack, TimeShift):
        return TemporalModel(tuple(default_curves()))
    raise ValidationError(f"unknown attack {attack!r}")


def _resolve(cfg: SessionConfig) -> SessionConfig:
    """Fill in derived defaults and check model/attack consistency."""
    model = cfg.detectors if cfg.detectors is not None else _auto_model(cfg.attack)
    attack = cfg.attack
    if attack is None:
        if not isinstance(model, IdealDetectors):
            raise ValidationError("honest sessions use IdealDetectors")
    elif isinstance(attack, (SingleDetectorBlinding, PhaseDeviation, WavelengthBS)):
        if not isinstance(model, ThresholdModel):
            raise ValidationError(f"{type(attack).__name__} needs a ThresholdModel")
        if model.mu_th != attack.mu_th:
            raise ValidationError(
                f"model mu_th {model.mu_th} disagrees with strategy mu_th {attack.mu_th}"
            )
    elif isinstance(attack, AsymmetricThreshold):
        if not isinstance(model, BlindedModel):
            raise ValidationError("AsymmetricThreshold needs a BlindedModel")
    elif isinstance(attack, TimeShift):
        if not isinstance(model, TemporalModel):
            raise ValidationError("TimeShift needs a TemporalModel")
        if attack.targets is None:
            planned = plan_time_shift(model.curves, p_b=attack.p_b, e_t=attack.e_t)
            attack = dataclasses.replace(attack, targets=planned.targets)
    return dataclasses.replace(cfg, detectors=model, attack=attack)


def _model_curves(model: BlindedModel | TemporalModel) -> dict[str, DetectorResponseCurve]:
    cmap = curve_map(model.curves)
    missing = [d for d in DETECTOR_PORTS if d not in cmap]
    if missing:
        raise ValidationError(f"curve set lacks detectors: {', '.join(missing)}")
    return cmap


def _pulse_energies(cfg: SessionConfig, pulse: EvePulse, phi_b_nominal: float) -> np.ndarray:
    """Mean photon number per detector port for one forged pulse."""
    rc = cfg.receiver
    t1, t2 = pulse.splitting if pulse.splitting is not None else (rc.t1, rc.t2)
    amps = general_port_amplitudes(
        pulse.mu, pulse.phi_e, pulse.gamma, t1, t2, phi_b_nominal + rc.phi_b
    )
    return np.abs(amps) ** 2


def _attacked_tables(cfg: SessionConfig) -> tuple[np.ndarray, np.ndarray, list[EvePulse]]:
    """Energy and click-probability tables over (eve index, bob index, detector).

    Both tables are indexed by the nominal measured/chosen phases; strategy
    deviations enter through :func:`forge_pulse`.
    """
    attack, model = cfg.attack, cfg.detectors
    active = np.asarray(cfg.receiver.active_detectors, dtype=float)
    energies = np.zeros((4, 4, 4))
    probs = np.zeros((4, 4, 4))
    pulses = []
    cmap = _model_curves(model) if isinstance(model, (BlindedModel, TemporalModel)) else None
    for ei in range(4):
        pulse = forge_pulse(attack, BB84_PHASES[ei])
        pulses.append(pulse)
        for bj in range(4):
            e = _pulse_energies(cfg, pulse, BB84_PHASES[bj])
            energies[ei, bj] = e
            if isinstance(model, ThresholdModel):
                p = (e >= model.mu_th).astype(float)
            elif isinstance(model, BlindedModel):
                p_b, _ = attack.operating_point(BASES[ei % 2])
                e_pj = e * attack.photon_energy_pj
                p = np.array(
                    [
                        blinded_click_probability(cmap[d], p_b, e_pj[k])
                        for k, d in enumerate(DETECTOR_PORTS)
                    ]
                )
            elif isinstance(model, TemporalModel):
                e_pj = e * attack.photon_energy_pj
                p = np.array(
                    [
                        temporal_click_probability(
                            cmap[d], TriggerPulse(e_pj[k], pulse.arrival_time), attack.p_b
                        )
                        for k, d in enumerate(DETECTOR_PORTS)
                    ]
                )
            else:
                raise ValidationError("attacked sessions need a bright-light detector model")
            probs[ei, bj] = p * active
    return energies, probs, pulses


def _honest_table(cfg: SessionConfig) -> np.ndarray:
    """Born-rule port probabilities over (sender index, bob index, detector).

    Probabilities below 1e-12 are rounding residue of exact zeros (the
    smallest physical value on the protocol lattice is order 1e-3) and are
    snapped away so exact enumeration treats impossible outcomes as such.
    """
    rc = cfg.receiver
    table = np.zeros((4, 4, 4))
    for ti in range(4):
        for bj in range(4):
            amps = general_port_amplitudes(
                0.5, BB84_PHASES[ti], 0.5, rc.t1, rc.t2, BB84_PHASES[bj] + rc.phi_b
            )
            probs = single_photon_probabilities(amps)
            probs[probs < 1e-12] = 0.0
            table[ti, bj] = probs / probs.sum()
    return table


def validate_attack(cfg: SessionConfig) -> SessionConfig:
    """Check the attack runs cleanly; returns the resolved config.

    Clean means: deterministic clicks at the operating point, no clicks in
    any slot where Eve's and Bob's bases differ (those can be sifted and
    would cause errors), and at most one click everywhere.  The
    network-imperfection and power-domain attacks must additionally click in
    every basis-matched slot, mirroring their narratives.  Raises
    :class:`FeasibilityError` before any slot runs.
    """
    cfg = _resolve(cfg)
    if cfg.attack is None:
        return cfg
    _, probs, _ = _attacked_tables(cfg)
    fractional = (probs > 0.0) & (probs < 1.0)
    if fractional.any():
        raise FeasibilityError(
            "operating point falls in the detectors' probabilistic region"
        )
    strict = isinstance(cfg.attack, (PhaseDeviation, WavelengthBS, AsymmetricThreshold))
    clicks_per_slot = probs.sum(axis=2)
    for ei in range(4):
        for bj in range(4):
            n = clicks_per_slot[ei, bj]
            if ei % 2 != bj % 2:
                if n > 0:
                    raise FeasibilityError(
                        "clicks in basis-mismatched slots would cause key errors"
                    )
            else:
                if n > 1:
                    raise FeasibilityError("double clicks in basis-matched slots")
                if strict and n != 1:
                    raise FeasibilityError(
                        f"{type(cfg.attack).__name__} must click in every matched slot"
                    )
    return cfg


# --------------------------------------------------------------------------
# session evaluation


def _classify(click_matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(outcome index 0..5, clicked detector) per slot; 4=no click, 5=double."""
    counts = click_matrix.sum(axis=1)
    det = click_matrix.argmax(axis=1)
    outcome = np.where(counts == 0, 4, np.where(counts > 1, 5, det))
    return outcome, det


def _aggregate(
    n: int,
    theta: np.ndarray,
    phib: np.ndarray,
    outcome: np.ndarray,
    eve_idx: np.ndarray | None,
) -> tuple[SessionStats, np.ndarray, np.ndarray, np.ndarray]:
    single = outcome < 4
    double = outcome == 5
    matched = (theta % 2) == (phib % 2)
    sifted = single & matched
    alice_bit = np.where(sifted, (theta // 2) ^ _CORR[theta % 2, np.minimum(outcome, 3)], -1)
    bob_bit = np.where(sifted, phib // 2, -1)
    errors = int(np.sum(sifted & (alice_bit != bob_bit)))
    n_sifted = int(sifted.sum())
    if eve_idx is not None:
        eve_bit = np.where(sifted, (eve_idx // 2) ^ _CORR[phib % 2, np.minimum(outcome, 3)], -1)
        eve_knowledge = (
            float(np.sum(sifted & (eve_bit == bob_bit)) / n_sifted) if n_sifted else 0.0
        )
    else:
        eve_bit = np.full(n, -1)
        eve_knowledge = None
    hist = tuple(float(np.sum(outcome[single] == d)) for d in range(4))
    stats = SessionStats(
        n_slots=n,
        gain=float(single.sum() / n),
        sifted_rate=float(n_sifted / n),
        qber=float(errors / n_sifted) if n_sifted else 0.0,
        double_click_rate=float(double.sum() / n),
        bell_histogram=hist,
        eve_knowledge=eve_knowledge,
    )
    return stats, sifted, np.stack([alice_bit, bob_bit, eve_bit]), outcome


_OUTCOMES = tuple(OUTCOME_BY_DETECTOR) + (BellOutcome.NO_CLICK, BellOutcome.DOUBLE_CLICK)


def run_session(
    cfg: SessionConfig, collect_trials: bool = False
) -> SessionStats | tuple[SessionStats, list[TrialRecord]]:
    """Run one sampled session; optionally also return per-slot records."""
    cfg = validate_attack(cfg)
    n = cfg.n_slots
    rng = np.random.default_rng(cfg.seed)
    theta = rng.integers(0, 4, n)
    phib = rng.integers(0, 4, n)
    eve_basis = rng.integers(0, 2, n)
    meas_u = rng.random(n)
    loss_u = rng.random(n)
    outcome_u = rng.random(n)
    click_u = rng.random((n, 4))
    dark_u = rng.random((n, 4))

    active = np.asarray(cfg.receiver.active_detectors, dtype=bool)
    if cfg.attack is None:
        det_model: IdealDetectors = cfg.detectors
        table = _honest_table(cfg)
        cum = np.cumsum(table, axis=2)
        arrive = loss_u < cfg.channel_transmittance * det_model.efficiency
        landing = (outcome_u[:, None] >= cum[theta, phib]).sum(axis=1)
        landing = np.minimum(landing, 3)
        clicks = np.zeros((n, 4), dtype=bool)
        clicks[np.arange(n), landing] = arrive & active[landing]
        if det_model.dark_count_prob > 0:
            clicks |= (dark_u < det_model.dark_count_prob) & active
        outcome, _ = _classify(clicks)
        eve_idx = None
        energies_tab = table
        e_idx_arr = np.zeros(n, dtype=np.int64)
        pulses = None
    else:
        energies_tab, probs, pulses = _attacked_tables(cfg)
        matched_eve = (theta % 2) == eve_basis
        e_idx_arr = np.where(matched_eve, theta, eve_basis + 2 * (meas_u >= 0.5))
        clicks = click_u < probs[e_idx_arr, phib]
        outcome, _ = _classify(clicks)
        eve_idx = e_idx_arr

    stats, sifted, bits, outcome = _aggregate(n, theta, phib, outcome, eve_idx)
    if not collect_trials:
        return stats
    records = []
    for i in range(n):
        if cfg.attack is None:
            eve = None
        else:
            eve = (BASES[int(e_idx_arr[i]) % 2], BB84_PHASES[int(e_idx_arr[i])], pulses[int(e_idx_arr[i])])
        row_idx = e_idx_arr[i] if cfg.attack is not None else theta[i]
        is_sifted = bool(sifted[i])
        records.append(
            TrialRecord(
                slot=i,
                theta_a=BB84_PHASES[int(theta[i])],
                phi_b=BB84_PHASES[int(phib[i])],
                eve=eve,
                energies=tuple(float(x) for x in energies_tab[int(row_idx), int(phib[i])]),
                outcome=_OUTCOMES[int(outcome[i])],
                sifted=is_sifted,
                alice_bit=int(bits[0, i]) if is_sifted else None,
                bob_bit=int(bits[1, i]) if is_sifted else None,
                eve_bit=int(bits[2, i]) if is_sifted and cfg.attack is not None else None,
            )
        )
    return stats, records


# --------------------------------------------------------------------------
# exact enumeration


class _ExactAccumulator:
    def __init__(self) -> None:
        self.gain = 0.0
        self.double = 0.0
        self.sifted = 0.0
        self.errors = 0.0
        self.eve_match = 0.0
        self.hist = [0.0, 0.0, 0.0, 0.0]

    def add(self, weight: float, ti: int, bj: int, ei: int | None, pattern: Sequence[bool]) -> None:
        fired = [d for d in range(4) if pattern[d]]
        if len(fired) > 1:
            self.double += weight
            return
        if not fired:
            return
        det = fired[0]
        self.gain += weight
        self.hist[det] += weight
        if ti % 2 != bj % 2:
            return
        self.sifted += weight
        corr = _CORR[ti % 2, det]
        alice = (ti // 2) ^ corr
        bob = bj // 2
        if alice != bob:
            self.errors += weight
        if ei is not None and ((ei // 2) ^ _CORR[bj % 2, det]) == bob:
            self.eve_match += weight

    def stats(self, attacked: bool) -> SessionStats:
        return SessionStats(
            n_slots=None,
            gain=self.gain,
            sifted_rate=self.sifted,
            qber=self.errors / self.sifted if self.sifted else 0.0,
            double_click_rate=self.double,
            bell_histogram=tuple(self.hist),
            eve_knowledge=(self.eve_match / self.sifted if self.sifted else 0.0)
            if attacked
            else None,
        )


def _pattern_branches(probs: Sequence[float]):
    """Expand per-detector click probabilities into weighted click patterns."""
    fixed = [bool(p == 1.0) for p in probs]
    free = [d for d, p in enumerate(probs) if 0.0 < p < 1.0]
    if not free:
        yield 1.0, fixed
        return
    for bits in itertools.product((False, True), repeat=len(free)):
        w = 1.0
        pattern = list(fixed)
        for d, b in zip(free, bits):
            pattern[d] = b
            w *= probs[d] if b else 1.0 - probs[d]
        if w > 0.0:
            yield w, pattern


def enumerate_exact(cfg: SessionConfig) -> SessionStats:
    """Exact session statistics by summation over the discrete choice tree.

    Replaces sampling with probability-weighted enumeration of every
    (sender phase, Eve basis, measurement branch, Bob phase) combination and
    every click pattern they can produce; the Monte Carlo path must converge
    to these numbers within binomial fluctuations.
    """
    cfg = validate_attack(cfg)
    acc = _ExactAccumulator()
    active = np.asarray(cfg.receiver.active_detectors, dtype=bool)
    if cfg.attack is None:
        det_model: IdealDetectors = cfg.detectors
        table = _honest_table(cfg)
        eta = cfg.channel_transmittance * det_model.efficiency
        d = det_model.dark_count_prob
        for ti in range(4):
            for bj in range(4):
                w_ab = 1.0 / 16.0
                landings = [(eta * table[ti, bj, k], k) for k in range(4)]
                landings.append((1.0 - eta, None))
                for p_land, det in landings:
                    if p_land == 0.0:
                        continue
                    base = [False] * 4
                    if det is not None and active[det]:
                        base[det] = True
                    if d == 0.0:
                        acc.add(w_ab * p_land, ti, bj, None, base)
                        continue
                    dark_p = [d if active[k] else 0.0 for k in range(4)]
                    for w_dark, darks in _pattern_branches(dark_p):
                        pattern = [a or b for a, b in zip(base, darks)]
                        acc.add(w_ab * p_land * w_dark, ti, bj, None, pattern)
        return acc.stats(attacked=False)

    _, probs, _ = _attacked_tables(cfg)
    for ti in range(4):
        for basis_idx in range(2):
            if ti % 2 == basis_idx:
                branches = [(1.0, ti)]
            else:
                branches = [(0.5, basis_idx), (0.5, basis_idx + 2)]
            for w_m, ei in branches:
                for bj in range(4):
                    w = (1.0 / 4.0) * 0.5 * w_m * (1.0 / 4.0)
                    for w_p, pattern in _pattern_branches(list(probs[ei, bj])):
                        acc.add(w * w_p, ti, bj, ei, pattern)
    return acc.stats(attacked=True)


def breakeven_transmittance(
    attack: EveStrategy | None, cfg: SessionConfig, tol: float = 1e-12
) -> float:
    """Largest channel transmittance at which the attacked click rate still
    covers the honest one, found by bisection over exact enumerations.

    The honest reference shares the receiver but uses ideal detectors; the
    attacked gain is transmittance-independent because Eve intercepts at the
    sender's output and resends bright light.
    """
    if attack is None:
        attacked_cfg = dataclasses.replace(cfg, attack=None, detectors=IdealDetectors())
    else:
        attacked_cfg = dataclasses.replace(cfg, attack=attack)
    attacked_gain = enumerate_exact(attacked_cfg).gain

    def honest_gain(eta: float) -> float:
        honest = dataclasses.replace(
            cfg, attack=None, detectors=IdealDetectors(), channel_transmittance=eta
        )
        return enumerate_exact(honest).gain

    if attacked_gain <= 0.0:
        return 0.0
    if attacked_gain >= honest_gain(1.0) - tol:
        return 1.0
    lo, hi = 0.0, 1.0  # honest gain is nondecreasing in transmittance
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if honest_gain(mid) <= attacked_gain:
            lo = mid
        else:
            hi = mid
    return lo
