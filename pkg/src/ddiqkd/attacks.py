"""Eavesdropping strategies against the four-detector receiver.

All five strategies share one skeleton: Eve intercepts every signal right at
the sender's output, measures it in a random BB84 basis, and resends a bright
forged pulse toward Bob whose parameters depend on the strategy:

* ``SingleDetectorBlinding``: plain bright resend against a receiver with a
  single active, blinded detector.
* ``AsymmetricThreshold``: all four detectors blinded; Eve picks a blinding
  power / trigger energy combination where the detectors' threshold curves
  disagree, so only her intended detector of each hot pair can click.
* ``TimeShift``: blinded detectors with mismatched temporal response windows;
  Eve shifts each pulse's arrival time into the window of exactly one
  detector.
* ``PhaseDeviation``: exploits a systematic offset in Bob's phase modulator
  by offsetting her own phase, making the two hot detectors' energies
  slightly unequal.
* ``WavelengthBS``: moves her pulses to a wavelength where Bob's splitting
  ratios and her chosen polarization weight make the port energies
  asymmetric.

Strategies are immutable values; every function is pure given the caller's
RNG stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .detectors import (
    PHOTON_ENERGY_PJ,
    DetectorResponseCurve,
    blinded_click_probability,
    curve_map,
)
from .optics import DETECTOR_PORTS, ValidationError
from .receiver import BB84_PHASES, phase_energy_table

BASES = ("Z", "X")

_QUARTER = 0.5 * math.pi


def phase_index(phi: float) -> int:
    """Index of a protocol phase in ``BB84_PHASES`` (tolerant to 1e-9 drift)."""
    r = phi % (2.0 * math.pi)
    snapped = round(r / _QUARTER)
    if abs(r - snapped * _QUARTER) > 1e-9:
        raise ValidationError(f"{phi} is not a protocol phase")
    return int(snapped) % 4


def basis_of_index(idx: int) -> str:
    return BASES[idx % 2]


def bit_of_index(idx: int) -> int:
    return idx // 2


def phase_basis(phi: float) -> str:
    return basis_of_index(phase_index(phi))


def phase_bit(phi: float) -> int:
    return bit_of_index(phase_index(phi))


def basis_phases(basis: str) -> tuple[float, float]:
    if basis == "Z":
        return (BB84_PHASES[0], BB84_PHASES[2])
    if basis == "X":
        return (BB84_PHASES[1], BB84_PHASES[3])
    raise ValidationError(f"unknown basis {basis!r}")


def eve_measure(theta_a: float, eve_basis: str, rng: np.random.Generator) -> float:
    """Eve's BB84 measurement of the sender's phase.

    Measuring in the preparation basis returns the prepared phase; in the
    conjugate basis the two outcomes are equally likely (the BB84 overlaps
    are all 1/2).
    """
    idx = phase_index(theta_a)
    lo, hi = basis_phases(eve_basis)
    if basis_of_index(idx) == eve_basis:
        return BB84_PHASES[idx]
    return lo if rng.random() < 0.5 else hi


class FeasibilityError(Exception):
    """The strategy cannot run cleanly (errors or double clicks would leak)."""


@dataclass(frozen=True)
class EvePulse:
    """Eve's forged signal: total mean photon number 2*mu at phase ``phi_e``.

    ``gamma`` is the H-polarization weight and ``splitting`` the pair of
    beamsplitter transmittances Bob's receiver exhibits at the pulse's
    wavelength; ``None`` means the design wavelength, i.e. the receiver's own
    ratios (1/2 by default).  The defaults reproduce the plain bright-resend
    pulse of the one-detector attack.
    """

    mu: float
    phi_e: float
    gamma: float = 0.5
    splitting: tuple[float, float] | None = None
    arrival_time: float | None = None

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValidationError(f"pulse mean photon number {self.mu} < 0")
        if not (0.0 <= self.gamma <= 1.0):
            raise ValidationError(f"gamma={self.gamma} outside [0, 1]")


@dataclass(frozen=True)
class SingleDetectorBlinding:
    """Bright intercept-resend against a receiver with one active detector."""

    mu: float
    mu_th: float


@dataclass(frozen=True)
class AsymmetricThreshold:
    """Blinded four-detector attack at operating point(s) (p_b [mW], e_t [pJ]).

    ``e_t`` is the trigger energy delivered to a hot port (the port carrying
    the pulse's full mean photon number).  ``schedule`` optionally overrides
    the static point per measurement basis.
    """

    p_b: float
    e_t: float
    schedule: Mapping[str, tuple[float, float]] | None = None
    photon_energy_pj: float = PHOTON_ENERGY_PJ

    def operating_point(self, basis: str) -> tuple[float, float]:
        if self.schedule is not None and basis in self.schedule:
            return tuple(self.schedule[basis])
        return (self.p_b, self.e_t)


@dataclass(frozen=True)
class TimeShift:
    """Blinded four-detector attack steering arrival times into one window.

    ``targets`` maps each basis to the detector Eve aims at and the pulse
    arrival time (ns); build it with :func:`plan_time_shift`.
    """

    p_b: float
    e_t: float
    targets: Mapping[str, tuple[str, float]] | None = None
    photon_energy_pj: float = PHOTON_ENERGY_PJ


@dataclass(frozen=True)
class PhaseDeviation:
    """Exploits a fixed offset in Bob's modulator with an offset of Eve's own."""

    delta_phi_e: float
    mu: float
    mu_th: float


@dataclass(frozen=True)
class WavelengthBS:
    """Wavelength-shifted pulses seeing splitting ratios (t1, t2), weight gamma."""

    gamma: float
    t1: float
    t2: float
    mu: float
    mu_th: float

    def __post_init__(self) -> None:
        for name, x in (("gamma", self.gamma), ("t1", self.t1), ("t2", self.t2)):
            if not (0.0 <= x <= 1.0):
                raise ValidationError(f"{name}={x} outside [0, 1]")


EveStrategy = (
    SingleDetectorBlinding | AsymmetricThreshold | TimeShift | PhaseDeviation | WavelengthBS
)


def forge_pulse(strategy: EveStrategy, phi_e: float, slot_index: int = 0) -> EvePulse:
    """Build Eve's resent pulse for a measurement result ``phi_e``.

    ``slot_index`` is a hook for per-slot schedules; the bundled strategies
    key their choices off the pulse phase alone.
    """
    if isinstance(strategy, SingleDetectorBlinding):
        return EvePulse(mu=strategy.mu, phi_e=phi_e)
    if isinstance(strategy, PhaseDeviation):
        return EvePulse(mu=strategy.mu, phi_e=phi_e + strategy.delta_phi_e)
    if isinstance(strategy, WavelengthBS):
        return EvePulse(
            mu=strategy.mu,
            phi_e=phi_e,
            gamma=strategy.gamma,
            splitting=(strategy.t1, strategy.t2),
        )
    if isinstance(strategy, AsymmetricThreshold):
        _, e_t = strategy.operating_point(phase_basis(phi_e))
        return EvePulse(mu=e_t / strategy.photon_energy_pj, phi_e=phi_e)
    if isinstance(strategy, TimeShift):
        if strategy.targets is None:
            raise FeasibilityError("time-shift targets unresolved; use plan_time_shift")
        basis = phase_basis(phi_e)
        if basis not in strategy.targets:
            raise FeasibilityError(f"no time-shift target for basis {basis}")
        _, arrival = strategy.targets[basis]
        return EvePulse(
            mu=strategy.e_t / strategy.photon_energy_pj, phi_e=phi_e, arrival_time=arrival
        )
    raise ValidationError(f"unknown strategy {strategy!r}")


def feasible_mu_window(e_high: float, e_low: float) -> tuple[float, float] | None:
    """Threshold interval (e_low, e_high] separating clicks from silence, or None."""
    if e_high < 0 or e_low < 0:
        raise ValidationError("energies must be >= 0")
    if e_high > e_low:
        return (e_low, e_high)
    return None


def phase_deviation_energies(mu, phi_e, phi_b) -> np.ndarray:
    """Port energies of the balanced receiver in cosine form.

    Independent of the amplitude route: mu/2 * (1 +- cos(phi_e -+ phi_b))
    for the difference-phase pair (D1, D3) and the sum-phase pair (D2, D4).
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < 0):
        raise ValidationError("mean photon number must be >= 0")
    diff = np.cos(np.asarray(phi_e) - np.asarray(phi_b))
    tot = np.cos(np.asarray(phi_e) + np.asarray(phi_b))
    half = 0.5 * mu
    return np.stack(
        np.broadcast_arrays(
            half * (1.0 + diff), half * (1.0 + tot), half * (1.0 - diff), half * (1.0 - tot)
        )
    )


@lru_cache(maxsize=1)
def _unit_energy_table() -> np.ndarray:
    return phase_energy_table(1.0)


def expected_click_pair(basis: str) -> tuple[str, str]:
    """The two detectors that go hot when Eve's and Bob's phases coincide."""
    idx = 0 if basis == "Z" else 1
    if basis not in BASES:
        raise ValidationError(f"unknown basis {basis!r}")
    row = _unit_energy_table()[idx, idx]
    hot = np.flatnonzero(row > 0.75)
    return (DETECTOR_PORTS[hot[0]], DETECTOR_PORTS[hot[1]])


def orthogonal_click_pair(basis: str) -> tuple[str, str]:
    """The hot detectors when Bob's phase is the basis partner of Eve's."""
    idx = 0 if basis == "Z" else 1
    if basis not in BASES:
        raise ValidationError(f"unknown basis {basis!r}")
    row = _unit_energy_table()[idx, idx + 2]
    hot = np.flatnonzero(row > 0.75)
    return (DETECTOR_PORTS[hot[0]], DETECTOR_PORTS[hot[1]])


def threshold_window(
    energy_table: np.ndarray,
    active: Sequence[bool],
    require_click_every_matched_slot: bool,
) -> tuple[float, float] | None:
    """Click-threshold window keeping an intercept-resend session clean.

    ``energy_table`` has shape (4, 4, 4): Eve's nominal phase index x Bob's
    nominal phase index x detector energy.  Any threshold in the returned
    (low, high] yields zero clicks in basis-mismatched slots and at most one
    click in basis-matched slots; with ``require_click_every_matched_slot``
    the high end is tightened so every matched slot clicks exactly once.
    """
    table = np.where(np.asarray(active, dtype=bool), np.asarray(energy_table), -np.inf)
    low = 0.0
    highs = []
    for i in range(4):
        for j in range(4):
            ranked = sorted(table[i, j], reverse=True)
            top, second = ranked[0], ranked[1]
            if i % 2 == j % 2:
                if second > -np.inf:
                    low = max(low, second)
                highs.append(top)
            else:
                low = max(low, top)
    high = min(highs) if require_click_every_matched_slot else max(highs)
    return feasible_mu_window(high, low)


def select_operating_point(
    curves: Sequence[DetectorResponseCurve] | Mapping[str, DetectorResponseCurve],
    constraints: Sequence[tuple[str, str]],
    pb_step: float = 0.005,
    et_step: float = 0.005,
) -> tuple[float, float] | None:
    """Grid-search a (P_B, E_T) point satisfying must-click / must-not-click pairs.

    Every constraint ``(i, j)`` demands a sure click on detector ``i`` and a
    sure non-click on detector ``j`` at the same trigger energy.  Among the
    feasible grid points the one with the largest worst-case margin to the
    threshold curves wins, ties broken toward smaller (P_B, E_T).  Feasibility
    is judged by :func:`blinded_click_probability` itself, so any returned
    point re-verifies by construction.
    """
    cmap = curves if isinstance(curves, Mapping) else curve_map(curves)
    involved = []
    for i, j in constraints:
        for d in (i, j):
            if d not in cmap:
                raise ValidationError(f"no response curve for detector {d!r}")
            if cmap[d] not in involved:
                involved.append(cmap[d])
    if not involved:
        raise ValidationError("no constraints given")
    pb_lo = max(c.power_range()[0] for c in involved)
    pb_hi = min(c.power_range()[1] for c in involved)
    if pb_lo > pb_hi:
        return None
    et_hi = max(y for c in involved for _, y in c.always_points) + et_step

    def grid(lo: float, hi: float, step: float) -> np.ndarray:
        pts = lo + step * np.arange(int((hi - lo) / step + 1e-9) + 1)
        return pts if pts[-1] >= hi - 1e-12 else np.append(pts, hi)

    best = None
    best_margin = -np.inf
    for pb in grid(pb_lo, pb_hi, pb_step):
        for et in grid(0.0, et_hi, et_step):
            margin = np.inf
            ok = True
            for i, j in constraints:
                if blinded_click_probability(cmap[i], pb, et) != 1.0:
                    ok = False
                    break
                if blinded_click_probability(cmap[j], pb, et) != 0.0:
                    ok = False
                    break
                margin = min(margin, et - cmap[i].e_always(pb), cmap[j].e_never(pb) - et)
            if ok and margin > best_margin:
                best_margin = margin
                best = (float(pb), float(et))
    return best


def _isolated_time(
    curves: Mapping[str, DetectorResponseCurve], detector: str
) -> float | None:
    """Midpoint of the largest stretch of ``detector``'s window free of all others."""
    t0, t1 = curves[detector].time_window
    cuts = {t0, t1}
    others = [curves[d].time_window for d in curves if d != detector]
    for a, b in others:
        for edge in (a, b):
            if t0 < edge < t1:
                cuts.add(edge)
    grid = sorted(cuts)
    best = None
    for lo, hi in zip(grid, grid[1:]):
        mid = 0.5 * (lo + hi)
        if any(a <= mid <= b for a, b in others):
            continue
        if best is None or hi - lo > best[0]:
            best = (hi - lo, mid)
    return None if best is None else best[1]


def plan_time_shift(
    curves: Sequence[DetectorResponseCurve] | Mapping[str, DetectorResponseCurve],
    p_b: float = 0.32,
    e_t: float | None = None,
) -> TimeShift:
    """Resolve a time-shift strategy against measured curves.

    For each basis the target is the lexicographically first detector of the
    expected hot pair that (a) owns an arrival time outside every other
    detector's response window, (b) surely clicks on the full trigger energy
    and (c) stays silent on half of it, so basis-mismatched slots leave no
    trace.  ``e_t=None`` picks the middle of the clean energy interval of the
    overall first feasible target.
    """
    cmap = curves if isinstance(curves, Mapping) else curve_map(curves)

    def clean_interval(det: str) -> tuple[float, float] | None:
        lo = cmap[det].e_always(p_b)
        hi = 2.0 * cmap[det].e_never(p_b)
        return (lo, hi) if lo <= hi else None

    if e_t is None:
        for det in sorted(cmap):
            span = clean_interval(det)
            if span is not None and _isolated_time(cmap, det) is not None:
                e_t = 0.5 * (span[0] + span[1])
                break
        if e_t is None:
            raise FeasibilityError("no detector has a clean trigger-energy interval")

    targets = {}
    for basis in BASES:
        for det in sorted(expected_click_pair(basis)):
            t = _isolated_time(cmap, det)
            if t is None:
                continue
            if blinded_click_probability(cmap[det], p_b, e_t) != 1.0:
                continue
            if blinded_click_probability(cmap[det], p_b, 0.5 * e_t) != 0.0:
                continue
            targets[basis] = (det, t)
            break
        if basis not in targets:
            raise FeasibilityError(
                f"no isolatable detector for basis {basis} at P_B={p_b} mW, E_T={e_t} pJ"
            )
    return TimeShift(p_b=p_b, e_t=float(e_t), targets=targets)


def plan_asymmetric_threshold(
    curves: Sequence[DetectorResponseCurve] | Mapping[str, DetectorResponseCurve],
    pb_step: float = 0.005,
    et_step: float = 0.005,
) -> AsymmetricThreshold | None:
    """Find asymmetric-threshold operating points for all four hot pairs.

    Tries every consistent choice of winner per hot pair, preferring a single
    static point; falls back to one point per basis.  Returned points are
    additionally required to stay silent at half the trigger energy (the
    energy every detector sees in basis-mismatched slots).
    """
    cmap = curves if isinstance(curves, Mapping) else curve_map(curves)
    pairs = {
        "Z": (expected_click_pair("Z"), orthogonal_click_pair("Z")),
        "X": (expected_click_pair("X"), orthogonal_click_pair("X")),
    }

    def half_silent(point: tuple[float, float], dets: Sequence[str]) -> bool:
        pb, et = point
        return all(blinded_click_probability(cmap[d], pb, 0.5 * et) == 0.0 for d in dets)

    def winner_choices(pair_list):
        if not pair_list:
            yield []
            return
        (a, b), *rest = pair_list
        for tail in winner_choices(rest):
            yield [(a, b)] + tail
            yield [(b, a)] + tail

    all_pairs = [p for basis in BASES for p in pairs[basis]]
    for combo in winner_choices(all_pairs):
        point = select_operating_point(cmap, combo, pb_step, et_step)
        if point is not None and half_silent(point, list(cmap)):
            return AsymmetricThreshold(p_b=point[0], e_t=point[1])

    schedule = {}
    for basis in BASES:
        found = None
        for combo in winner_choices(list(pairs[basis])):
            point = select_operating_point(cmap, combo, pb_step, et_step)
            if point is not None and half_silent(point, list(cmap)):
                found = point
                break
        if found is None:
            return None
        schedule[basis] = found
    first = schedule[BASES[0]]
    return AsymmetricThreshold(p_b=first[0], e_t=first[1], schedule=schedule)
