"""Click models for the four receiver detectors.

Three regimes are covered:

* an idealized threshold detector that clicks whenever the incoming mean
  photon number reaches ``mu_th`` (the bright-light blinded limit),
* blinded detectors whose click behaviour depends on the continuous blinding
  power P_B and the trigger-pulse energy E_T, captured by a pair of
  piecewise-linear curves per detector: below E_never(P_B) the click
  probability is 0, above E_always(P_B) it is 1, linear in between,
* a temporal response window per detector outside of which a pulse can never
  register, regardless of its energy.

Response curves are loaded from CSV.  The bundled fixture is synthetic: the
curves are constructed to pass through two published operating points for a
pair of commercially deployed blinded detectors (roughly, one detector clicks
at 0.2 mW / 0.1 pJ where the other stays silent, and the roles reverse near
0.56 mW / 0.19 pJ), not measured data.

Protocol-level energies are kept in mean-photon-number units; picojoules and
milliwatts appear only in curve files.  ``PHOTON_ENERGY_PJ`` converts between
the two for mixed scenarios.

Curves are immutable after loading and click evaluation is pure given the
caller's RNG, so everything here is safe for concurrent use.
"""

from __future__ import annotations

import csv
import importlib.resources
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .optics import ValidationError

#: Energy of one 1550 nm photon in picojoules (h*c/lambda).
PHOTON_ENERGY_PJ = 1.2815779e-07


class CurveFileError(ValueError):
    """A curve file failed to parse or violates a curve invariant."""


@dataclass(frozen=True)
class ThresholdDetector:
    """Deterministic blinded detector: clicks iff energy >= mu_th."""

    mu_th: float

    def __post_init__(self) -> None:
        if not self.mu_th > 0:
            raise ValidationError(f"click threshold {self.mu_th} must be > 0")


def threshold_click(energy: float, det: ThresholdDetector) -> bool:
    """Inclusive threshold: ``energy == mu_th`` clicks."""
    if energy < 0:
        raise ValidationError(f"energy {energy} < 0")
    return energy >= det.mu_th


@dataclass(frozen=True)
class TriggerPulse:
    """A bright trigger pulse: energy in pJ, arrival time in ns."""

    energy: float
    arrival_time: float

    def __post_init__(self) -> None:
        if self.energy < 0:
            raise ValidationError(f"pulse energy {self.energy} < 0")


@dataclass(frozen=True)
class DetectorResponseCurve:
    """Trigger thresholds versus blinding power for one blinded detector.

    ``never_points`` / ``always_points`` are (P_B [mW], E [pJ]) samples of the
    maximal no-click and minimal sure-click trigger energies; both lists are
    interpolated linearly and never extrapolated.
    """

    detector: str
    never_points: tuple[tuple[float, float], ...]
    always_points: tuple[tuple[float, float], ...]
    time_window: tuple[float, float]

    def __post_init__(self) -> None:
        for name, pts in (("never", self.never_points), ("always", self.always_points)):
            if len(pts) < 1:
                raise CurveFileError(f"{self.detector}: empty {name} curve")
            powers = [p for p, _ in pts]
            if sorted(powers) != powers or len(set(powers)) != len(powers):
                raise CurveFileError(f"{self.detector}: {name} curve not sorted by P_B")
        lo, hi = self.power_range()
        if lo > hi:
            raise CurveFileError(f"{self.detector}: never/always curves cover disjoint power ranges")
        for pb in sorted({p for p, _ in self.never_points + self.always_points} | {lo, hi}):
            if lo <= pb <= hi and self.e_never(pb) > self.e_always(pb):
                raise CurveFileError(
                    f"{self.detector}: E_never > E_always at P_B={pb} mW"
                )
        if not self.time_window[0] < self.time_window[1]:
            raise CurveFileError(f"{self.detector}: empty time window {self.time_window}")

    def power_range(self) -> tuple[float, float]:
        """Blinding-power interval covered by both curves."""
        return (
            max(self.never_points[0][0], self.always_points[0][0]),
            min(self.never_points[-1][0], self.always_points[-1][0]),
        )

    def _interp(self, points: tuple[tuple[float, float], ...], p_b: float) -> float:
        lo, hi = self.power_range()
        if not (lo <= p_b <= hi):
            raise ValidationError(
                f"{self.detector}: P_B={p_b} mW outside covered range [{lo}, {hi}]"
            )
        xs, ys = zip(*points)
        return float(np.interp(p_b, xs, ys))

    def e_never(self, p_b: float) -> float:
        return self._interp(self.never_points, p_b)

    def e_always(self, p_b: float) -> float:
        return self._interp(self.always_points, p_b)


def blinded_click_probability(curve: DetectorResponseCurve, p_b: float, e_t: float) -> float:
    """Click probability of a blinded detector for trigger energy ``e_t`` at power ``p_b``.

    Sure-click takes precedence on a degenerate curve (E_never == E_always),
    which makes the degenerate case behave exactly like ``threshold_click``.
    """
    if e_t < 0:
        raise ValidationError(f"trigger energy {e_t} < 0")
    e_always = curve.e_always(p_b)
    e_never = curve.e_never(p_b)
    if e_t >= e_always:
        return 1.0
    if e_t <= e_never:
        return 0.0
    return (e_t - e_never) / (e_always - e_never)


def temporal_click(
    curve: DetectorResponseCurve,
    pulse: TriggerPulse,
    p_b: float,
    rng: np.random.Generator | None = None,
) -> bool:
    """Click decision with the detector's response window applied.

    Outside ``time_window`` the probability is 0 whatever the energy.  An RNG
    is only consulted when the blinded click probability is strictly between
    0 and 1; all attack operating points sit in the deterministic regime.
    """
    t0, t1 = curve.time_window
    if not (t0 <= pulse.arrival_time <= t1):
        return False
    p = blinded_click_probability(curve, p_b, pulse.energy)
    if p == 0.0:
        return False
    if p == 1.0:
        return True
    if rng is None:
        raise ValidationError("click probability is fractional; an RNG is required")
    return bool(rng.random() < p)


def temporal_click_probability(
    curve: DetectorResponseCurve, pulse: TriggerPulse, p_b: float
) -> float:
    """Window-gated click probability (0 outside the response window)."""
    t0, t1 = curve.time_window
    if not (t0 <= pulse.arrival_time <= t1):
        return 0.0
    return blinded_click_probability(curve, p_b, pulse.energy)


def _parse_rows(rows: Iterable[Sequence[str]], source: str) -> list[DetectorResponseCurve]:
    never: dict[str, list[tuple[float, float]]] = {}
    always: dict[str, list[tuple[float, float]]] = {}
    windows: dict[str, tuple[float, float]] = {}
    order: list[str] = []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise CurveFileError(f"{source}:{lineno}: expected 4 columns, got {len(row)}")
        det, kind = row[0].strip(), row[1].strip()
        try:
            x, y = float(row[2]), float(row[3])
        except ValueError as exc:
            raise CurveFileError(f"{source}:{lineno}: {exc}") from None
        if det not in order:
            order.append(det)
        if kind == "never":
            never.setdefault(det, []).append((x, y))
        elif kind == "always":
            always.setdefault(det, []).append((x, y))
        elif kind == "window":
            if det in windows:
                raise CurveFileError(f"{source}:{lineno}: duplicate window for {det}")
            windows[det] = (x, y)
        else:
            raise CurveFileError(f"{source}:{lineno}: unknown kind {kind!r}")
    if not order:
        raise CurveFileError(f"{source}: no curve rows found")
    curves = []
    for det in order:
        missing = [k for k, d in (("never", never), ("always", always), ("window", windows)) if det not in d]
        if missing:
            raise CurveFileError(f"{source}: detector {det} missing {', '.join(missing)} rows")
        curves.append(
            DetectorResponseCurve(
                detector=det,
                never_points=tuple(never[det]),
                always_points=tuple(always[det]),
                time_window=windows[det],
            )
        )
    return curves


def load_curves(path: str | Path) -> list[DetectorResponseCurve]:
    """Load and validate detector response curves from a CSV file.

    Format: header ``detector,kind,P_B_mW,E_pJ``; threshold rows use kind
    ``never``/``always``, response windows use kind ``window`` with the start
    and end times (ns) in the last two columns.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CurveFileError(f"{path}: {exc}") from None
    lines = text.splitlines()
    if not lines:
        raise CurveFileError(f"{path}: empty file")
    reader = csv.reader(lines)
    header = next(reader)
    if [h.strip() for h in header] != ["detector", "kind", "P_B_mW", "E_pJ"]:
        raise CurveFileError(f"{path}: bad header {header!r}")
    return _parse_rows(reader, str(path))


def default_curves() -> list[DetectorResponseCurve]:
    """The bundled synthetic four-detector fixture."""
    ref = importlib.resources.files("ddiqkd.data") / "blinded_detector_curves.csv"
    with importlib.resources.as_file(ref) as path:
        return load_curves(path)


def curve_map(curves: Sequence[DetectorResponseCurve]) -> dict[str, DetectorResponseCurve]:
    return {c.detector: c for c in curves}
