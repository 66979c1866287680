"""Command-line front end.

Subcommands::

    table1     energy grid over both parties' phase settings, as CSV
    verify     random cross-check of closed forms against network propagation
    sweep      normalized port energies versus Eve's phase, as CSV
    session    run a protocol session from a JSON config
    opsearch   search blinding operating points on a curve file
    breakeven  channel transmittance where an attack's rate stops covering

Exit codes: 0 success, 2 usage, 3 bad config, 4 infeasible attack,
5 verification failure.

Angles are printed in radians; anywhere an angle is accepted (flags and JSON
configs) a string like ``"0.5pi"`` is also understood, avoiding float drift
in configs.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .attacks import (
    AsymmetricThreshold,
    FeasibilityError,
    PhaseDeviation,
    SingleDetectorBlinding,
    TimeShift,
    WavelengthBS,
    select_operating_point,
)
from .detectors import (
    CurveFileError,
    blinded_click_probability,
    curve_map,
    default_curves,
    load_curves,
)
from .optics import ConfigurationError, ValidationError
from .protocol import (
    BlindedModel,
    IdealDetectors,
    SessionConfig,
    TemporalModel,
    ThresholdModel,
    breakeven_transmittance,
    enumerate_exact,
    run_session,
)
from .receiver import (
    BB84_PHASES,
    ReceiverConfig,
    balanced_port_amplitudes,
    general_port_amplitudes,
    phase_energy_table,
    propagated_port_amplitudes,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_INFEASIBLE = 4
EXIT_VERIFY = 5

VERIFY_TOLERANCE = 1e-12

#: Transmittance equivalent of the 3 dB rule of thumb for intercept-resend
#: attacks on standard receivers, reported alongside the computed break-even.
REFERENCE_TRANSMITTANCE = 0.5


def parse_angle(text: str | float) -> float:
    """Radians from a float or a pi-fraction string: ``0.5pi``, ``pi/36``, ``-3pi/2``."""
    if isinstance(text, (int, float)):
        return float(text)
    s = text.strip().lower().replace(" ", "")
    try:
        if "pi" in s:
            head, _, tail = s.partition("pi")
            num = float(head) if head not in ("", "+", "-") else float(head + "1")
            den = 1.0
            if tail:
                if not tail.startswith("/"):
                    raise ValueError(tail)
                den = float(tail[1:])
            return num * math.pi / den
        return float(s)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"cannot parse angle {text!r}") from None


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be > 0")
    return value


def _angle_arg(text: str) -> float:
    try:
        return parse_angle(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _open_out(args) -> object:
    return open(args.out, "w", newline="") if args.out else sys.stdout


def _emit_rows(args, header: list[str], rows: list[list]) -> None:
    """Tabular output: CSV unless JSON was asked for explicitly."""
    stream = _open_out(args)
    try:
        if args.format == "json":
            json.dump([dict(zip(header, row)) for row in rows], stream, indent=2)
            stream.write("\n")
        else:
            writer = csv.writer(stream)
            writer.writerow(header)
            writer.writerows(rows)
    finally:
        if stream is not sys.stdout:
            stream.close()


def _emit_obj(args, obj: dict) -> None:
    stream = _open_out(args)
    try:
        json.dump(obj, stream, indent=2)
        stream.write("\n")
    finally:
        if stream is not sys.stdout:
            stream.close()


def _error(kind: str, message: str) -> dict:
    return {"error": {"kind": kind, "message": message}}


# --------------------------------------------------------------------------
# config files


def _load_curve_source(source: str | None):
    if source in (None, "default"):
        return default_curves()
    return load_curves(source)


def _receiver_from_json(data: dict) -> ReceiverConfig:
    return ReceiverConfig(
        t1=float(data.get("t1", 0.5)),
        t2=float(data.get("t2", 0.5)),
        phi_b=parse_angle(data.get("phi_b", 0.0)),
        active_detectors=tuple(bool(x) for x in data.get("active_detectors", [True] * 4)),
    )


def _detectors_from_json(data: dict | None):
    if data is None:
        return None
    model = data.get("model")
    if model == "ideal":
        return IdealDetectors(
            efficiency=float(data.get("efficiency", 1.0)),
            dark_count_prob=float(data.get("dark_count_prob", 0.0)),
        )
    if model == "threshold":
        return ThresholdModel(mu_th=float(data["mu_th"]))
    if model == "blinded":
        return BlindedModel(curves=tuple(_load_curve_source(data.get("curves"))))
    if model == "temporal":
        return TemporalModel(curves=tuple(_load_curve_source(data.get("curves"))))
    raise ValidationError(f"unknown detector model {model!r}")


def _attack_from_json(data: dict | None):
    if data is None:
        return None
    kind = data.get("type")
    if kind == "single_detector_blinding":
        return SingleDetectorBlinding(mu=float(data["mu"]), mu_th=float(data["mu_th"]))
    if kind == "phase_deviation":
        return PhaseDeviation(
            delta_phi_e=parse_angle(data["delta_phi_e"]),
            mu=float(data["mu"]),
            mu_th=float(data["mu_th"]),
        )
    if kind == "wavelength_bs":
        return WavelengthBS(
            gamma=float(data["gamma"]),
            t1=float(data["t1"]),
            t2=float(data["t2"]),
            mu=float(data["mu"]),
            mu_th=float(data["mu_th"]),
        )
    if kind == "asymmetric_threshold":
        schedule = data.get("schedule")
        if schedule is not None:
            schedule = {b: (float(p), float(e)) for b, (p, e) in schedule.items()}
        return AsymmetricThreshold(
            p_b=float(data["p_b"]), e_t=float(data["e_t"]), schedule=schedule
        )
    if kind == "time_shift":
        targets = data.get("targets")
        if targets is not None:
            targets = {b: (str(d), float(t)) for b, (d, t) in targets.items()}
        return TimeShift(p_b=float(data["p_b"]), e_t=float(data["e_t"]), targets=targets)
    raise ValidationError(f"unknown attack type {kind!r}")


def load_session_config(path: str | Path, seed_override: int | None = None) -> SessionConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from None
    try:
        cfg = SessionConfig(
            n_slots=int(data["n_slots"]),
            seed=int(data.get("seed", 0)),
            channel_transmittance=float(data.get("channel_transmittance", 1.0)),
            receiver=_receiver_from_json(data.get("receiver", {})),
            detectors=_detectors_from_json(data.get("detectors")),
            attack=_attack_from_json(data.get("attack")),
        )
    except KeyError as exc:
        raise ValidationError(f"config is missing field {exc}") from None
    if seed_override is not None:
        cfg = dataclasses.replace(cfg, seed=seed_override)
    return cfg


# --------------------------------------------------------------------------
# subcommands


def cmd_table1(args) -> int:
    table = phase_energy_table(args.mu)
    rows = []
    for i, phi_e in enumerate(BB84_PHASES):
        for j, phi_b in enumerate(BB84_PHASES):
            rows.append([phi_e, phi_b] + [float(x) for x in table[i, j]])
    _emit_rows(args, ["phi_E", "phi_B", "D1", "D2", "D3", "D4"], rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    worst = 0.0
    for _ in range(args.trials):
        mu = rng.uniform(1e-6, 10.0)
        phi_e, phi_b = rng.uniform(0.0, 2.0 * math.pi, 2)
        if args.check == "eq1":
            cfg = ReceiverConfig(phi_b=phi_b)
            closed = balanced_port_amplitudes(mu, phi_e, phi_b)
            network = propagated_port_amplitudes(cfg, mu, phi_e)
        else:
            t1, t2 = rng.uniform(0.01, 0.99, 2)
            gamma = rng.uniform(0.0, 1.0)
            cfg = ReceiverConfig(t1=t1, t2=t2, phi_b=phi_b)
            closed = general_port_amplitudes(mu, phi_e, gamma, t1, t2, phi_b)
            network = propagated_port_amplitudes(cfg, mu, phi_e, gamma)
        worst = max(worst, float(np.max(np.abs(network - closed))))
    ok = worst < VERIFY_TOLERANCE
    _emit_obj(
        args,
        {
            "check": args.check,
            "trials": args.trials,
            "max_error": worst,
            "tolerance": VERIFY_TOLERANCE,
            "ok": ok,
        },
    )
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_sweep(args) -> int:
    phi_b = args.phi_b + args.delta_phi_b
    grid = np.linspace(0.0, 2.0 * math.pi, args.points)
    amps = general_port_amplitudes(1.0, grid, args.gamma, args.t1, args.t2, phi_b)
    norm = np.abs(amps) ** 2  # mu = 1: energies are already in units of mu
    rows = [[float(grid[i])] + [float(norm[d, i]) for d in range(4)] for i in range(len(grid))]
    _emit_rows(args, ["phi_E", "D1", "D2", "D3", "D4"], rows)
    return EXIT_OK


def cmd_session(args) -> int:
    cfg = load_session_config(args.config, args.seed)
    trials = None
    if args.trials_out:
        mc_stats, trials = run_session(cfg, collect_trials=True)
        stats = enumerate_exact(cfg) if args.exact else mc_stats
    else:
        stats = enumerate_exact(cfg) if args.exact else run_session(cfg)
    if trials is not None:
        with open(args.trials_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["slot", "theta_A", "phi_B", "phi_E", "E1", "E2", "E3", "E4",
                 "outcome", "sifted", "a", "b", "e"]
            )
            for rec in trials:
                writer.writerow(
                    [
                        rec.slot,
                        rec.theta_a,
                        rec.phi_b,
                        "" if rec.eve is None else rec.eve[1],
                        *rec.energies,
                        rec.outcome.value,
                        int(rec.sifted),
                        "" if rec.alice_bit is None else rec.alice_bit,
                        "" if rec.bob_bit is None else rec.bob_bit,
                        "" if rec.eve_bit is None else rec.eve_bit,
                    ]
                )
    _emit_obj(args, stats.to_dict())
    return EXIT_OK


def _parse_constraints(text: str) -> list[tuple[str, str]]:
    out = []
    for chunk in text.replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ">" not in chunk:
            raise ValidationError(f"constraint {chunk!r} is not of the form D1>D2")
        i, j = (part.strip() for part in chunk.split(">", 1))
        out.append((i, j))
    if not out:
        raise ValidationError("no constraints given")
    return out


def cmd_opsearch(args) -> int:
    curves = _load_curve_source(args.curves)
    constraints = _parse_constraints(args.constraints)
    point = select_operating_point(curves, constraints)
    if point is None:
        _emit_obj(args, _error("infeasible", "no operating point satisfies the constraints"))
        return EXIT_INFEASIBLE
    cmap = curve_map(curves)
    echoed = [
        {
            "click": i,
            "no_click": j,
            "click_prob": blinded_click_probability(cmap[i], point[0], point[1]),
            "no_click_prob": blinded_click_probability(cmap[j], point[0], point[1]),
        }
        for i, j in constraints
    ]
    if args.format == "csv":
        header = ["p_b_mw", "e_t_pj", "click", "no_click", "click_prob", "no_click_prob"]
        rows = [
            [point[0], point[1], c["click"], c["no_click"], c["click_prob"], c["no_click_prob"]]
            for c in echoed
        ]
        _emit_rows(args, header, rows)
        return EXIT_OK
    _emit_obj(
        args,
        {
            "found": True,
            "p_b_mw": point[0],
            "e_t_pj": point[1],
            "constraints": echoed,
            "verified": all(c["click_prob"] == 1.0 and c["no_click_prob"] == 0.0 for c in echoed),
        },
    )
    return EXIT_OK


def cmd_breakeven(args) -> int:
    cfg = load_session_config(args.config, args.seed)
    eta = breakeven_transmittance(cfg.attack, cfg)
    attacked = enumerate_exact(cfg)
    _emit_obj(
        args,
        {
            "breakeven_transmittance": eta,
            "breakeven_loss_db": (-10.0 * math.log10(eta)) if eta > 0 else None,
            "attacked_gain": attacked.gain,
            "reference_transmittance": REFERENCE_TRANSMITTANCE,
            "reference_loss_db": -10.0 * math.log10(REFERENCE_TRANSMITTANCE),
            "matches_reference": abs(eta - REFERENCE_TRANSMITTANCE) < 1e-9,
        },
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    # global flags are declared twice: on the main parser with their real
    # defaults, and on a SUPPRESS-default parent so they are accepted after
    # the subcommand too without clobbering values given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="override the RNG seed")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="write the report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS,
                        help="tabular commands default to csv, reports to json")
    parser = argparse.ArgumentParser(
        prog="ddiqkd",
        description="Simulate a single-photon Bell-measurement QKD receiver and its detector-control attacks.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", parents=[common],
                       help="detector energies over all settings pairs")
    p.add_argument("--mu", type=_positive_float, required=True)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("verify", parents=[common],
                       help="closed forms versus network propagation")
    p.add_argument("check", choices=("eq1", "eq3"))
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common],
                       help="normalized port energies versus the sender phase")
    p.add_argument("--phi-b", type=_angle_arg, default=0.5 * math.pi)
    p.add_argument("--delta-phi-b", type=_angle_arg, default=0.0)
    p.add_argument("--t1", type=float, default=0.5)
    p.add_argument("--t2", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--points", type=int, default=721)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("session", parents=[common],
                       help="run a protocol session from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--exact", action="store_true", help="exact enumeration instead of sampling")
    p.add_argument("--trials-out", default=None, help="also write the per-slot CSV here")
    p.set_defaults(func=cmd_session)

    p = sub.add_parser("opsearch", parents=[common],
                       help="search blinding operating points")
    p.add_argument("--curves", default="default", help="curve CSV path, or 'default'")
    p.add_argument("--constraints", required=True, help="e.g. 'D1>D2,D3>D4'")
    p.set_defaults(func=cmd_opsearch)

    p = sub.add_parser("breakeven", parents=[common],
                       help="transmittance where the attacked rate stops covering")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_breakeven)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    # the global flags use SUPPRESS so either position works; fill the gaps
    for name in ("seed", "out", "format"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        return args.func(args)
    except FeasibilityError as exc:
        _emit_obj(args, _error("infeasible", str(exc)))
        return EXIT_INFEASIBLE
    except (ValidationError, ConfigurationError, CurveFileError) as exc:
        _emit_obj(args, _error("config", str(exc)))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
