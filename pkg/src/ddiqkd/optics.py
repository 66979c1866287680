"""Coherent-state propagation through a polarization-aware linear-optics network.

Amplitudes are complex numbers in units of sqrt(photons): a mode carrying the
polarization pair (h, v) holds a mean photon number |h|^2 + |v|^2.  The same
arithmetic serves single-photon states, with |amplitude|^2 read as a relative
detection probability instead of an energy.

Beamsplitter convention, for transmittance t and input modes (in1, in2):

    out1 = sqrt(t) * in1 + sqrt(1 - t) * in2
    out2 = sqrt(1 - t) * in1 - sqrt(t) * in2

The minus sign sits on the second output's second term.  Any other unitary
choice differs only by per-port phases; the receiver network in
:mod:`ddiqkd.receiver` fixes its wiring against this convention so that the
interferometer's difference port carries ``in1 - in2`` with no extra sign.

Every operation here is a pure function on immutable values, so concurrent
use needs no locking.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

#: Spatial mode labels: the receiver's internal paths plus four detector ports.
MODES = ("a", "b", "c", "d", "e", "f", "g", "k", "D1", "D2", "D3", "D4")

#: Detector-port labels, in click-pattern order.
DETECTOR_PORTS = ("D1", "D2", "D3", "D4")


class ConfigurationError(Exception):
    """A network references a mode label that does not exist or is misused."""


class ValidationError(ValueError):
    """A numeric parameter is outside its allowed range."""


@dataclass(frozen=True)
class PolAmplitude:
    """Complex amplitudes of the horizontal and vertical polarization of one mode."""

    h: complex = 0j
    v: complex = 0j

    def __post_init__(self) -> None:
        for c in (self.h, self.v):
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValidationError(f"non-finite amplitude {c!r}")

    def energy(self) -> float:
        """Mean photon number carried by this mode."""
        return abs(self.h) ** 2 + abs(self.v) ** 2

    def is_vacuum(self) -> bool:
        return self.h == 0 and self.v == 0

    def scaled(self, factor: complex) -> "PolAmplitude":
        return PolAmplitude(self.h * factor, self.v * factor)

    def plus(self, other: "PolAmplitude", weight: complex = 1.0) -> "PolAmplitude":
        return PolAmplitude(self.h + weight * other.h, self.v + weight * other.v)

    def swapped(self) -> "PolAmplitude":
        return PolAmplitude(self.v, self.h)

    def scalar(self) -> complex:
        """Single complex amplitude of a polarization-resolved port (one component zero)."""
        return self.h + self.v


VACUUM = PolAmplitude()


@dataclass(frozen=True)
class OpticalState:
    """Amplitudes of every spatial mode.  All labels are always present;
    unpopulated ports are explicit vacuum so energy bookkeeping is total."""

    modes: Mapping[str, PolAmplitude] = field(default_factory=dict)

    def __post_init__(self) -> None:
        full = {label: VACUUM for label in MODES}
        for label, amp in dict(self.modes).items():
            if label not in full:
                raise ConfigurationError(f"unknown mode label {label!r}")
            full[label] = amp
        object.__setattr__(self, "modes", full)

    def amplitude(self, label: str) -> PolAmplitude:
        try:
            return self.modes[label]
        except KeyError:
            raise ConfigurationError(f"unknown mode label {label!r}") from None

    def energy(self, label: str) -> float:
        return self.amplitude(label).energy()

    def total_energy(self) -> float:
        return sum(amp.energy() for amp in self.modes.values())

    def replacing(self, updates: Mapping[str, PolAmplitude]) -> "OpticalState":
        new = dict(self.modes)
        new.update(updates)
        return OpticalState(new)


@dataclass(frozen=True)
class BeamSplitter:
    """Two-input, two-output splitter with transmittance ``t`` in (0, 1)."""

    t: float
    inputs: tuple[str, str]
    outputs: tuple[str, str]

    def __post_init__(self) -> None:
        if not (0.0 < self.t < 1.0):
            raise ValidationError(f"beamsplitter transmittance {self.t} outside (0, 1)")


@dataclass(frozen=True)
class PhaseModulator:
    """Multiplies both polarization components of a mode by exp(i * phase).

    ``out`` names the output mode; it defaults to acting in place.
    """

    phase: float
    mode: str
    out: str | None = None


@dataclass(frozen=True)
class HalfWavePlate:
    """Swaps the horizontal and vertical amplitudes of a mode (plate at 45 degrees)."""

    mode: str
    out: str | None = None


@dataclass(frozen=True)
class PolarizingBeamSplitter:
    """Routes H to ``outputs[0]`` and V to ``outputs[1]``."""

    mode: str
    outputs: tuple[str, str]


Element = Union[BeamSplitter, PhaseModulator, HalfWavePlate, PolarizingBeamSplitter]


def _take(state: OpticalState, updates: dict[str, PolAmplitude], label: str) -> PolAmplitude:
    amp = updates.get(label, state.amplitude(label))
    updates[label] = VACUUM
    return amp


def _put(state: OpticalState, updates: dict[str, PolAmplitude], label: str, amp: PolAmplitude) -> None:
    current = updates.get(label, state.amplitude(label))
    if not current.is_vacuum():
        raise ConfigurationError(f"output mode {label!r} already populated")
    updates[label] = amp


def apply_beamsplitter(state: OpticalState, el: BeamSplitter) -> OpticalState:
    """Mix the two input modes into the two output modes, conserving energy."""
    updates: dict[str, PolAmplitude] = {}
    in1 = _take(state, updates, el.inputs[0])
    in2 = _take(state, updates, el.inputs[1])
    ct, cr = math.sqrt(el.t), math.sqrt(1.0 - el.t)
    _put(state, updates, el.outputs[0], in1.scaled(ct).plus(in2, cr))
    _put(state, updates, el.outputs[1], in1.scaled(cr).plus(in2, -ct))
    return state.replacing(updates)


def apply_phase_modulator(state: OpticalState, el: PhaseModulator) -> OpticalState:
    updates: dict[str, PolAmplitude] = {}
    amp = _take(state, updates, el.mode)
    out = el.out if el.out is not None else el.mode
    _put(state, updates, out, amp.scaled(cmath.exp(1j * el.phase)))
    return state.replacing(updates)


def apply_hwp(state: OpticalState, el: HalfWavePlate) -> OpticalState:
    updates: dict[str, PolAmplitude] = {}
    amp = _take(state, updates, el.mode)
    out = el.out if el.out is not None else el.mode
    _put(state, updates, out, amp.swapped())
    return state.replacing(updates)


def apply_pbs(state: OpticalState, el: PolarizingBeamSplitter) -> OpticalState:
    if el.outputs[0] == el.outputs[1]:
        raise ConfigurationError("polarizing beamsplitter outputs must differ")
    updates: dict[str, PolAmplitude] = {}
    amp = _take(state, updates, el.mode)
    _put(state, updates, el.outputs[0], PolAmplitude(h=amp.h))
    _put(state, updates, el.outputs[1], PolAmplitude(v=amp.v))
    return state.replacing(updates)


_APPLY = {
    BeamSplitter: apply_beamsplitter,
    PhaseModulator: apply_phase_modulator,
    HalfWavePlate: apply_hwp,
    PolarizingBeamSplitter: apply_pbs,
}


def propagate(network: Sequence[Element], state: OpticalState) -> OpticalState:
    """Apply the network elements in order.  An empty network is the identity."""
    for el in network:
        try:
            fn = _APPLY[type(el)]
        except KeyError:
            raise ConfigurationError(f"unknown element {el!r}") from None
        state = fn(state, el)
    return state


def energies(state: OpticalState) -> dict[str, float]:
    """Mean photon number arriving at each detector port."""
    return {port: state.energy(port) for port in DETECTOR_PORTS}


def single_photon_probabilities(amps: Sequence[complex]) -> np.ndarray:
    """Born-rule detection probabilities for one photon across four ports."""
    mags = np.abs(np.asarray(amps, dtype=complex)) ** 2
    total = mags.sum()
    if total == 0.0:
        raise ValidationError("all-zero amplitude vector has no click distribution")
    return mags / total
