"""Command-line entry point: ``cavityqed <subcommand> [options]``.

Sweep subcommands (figure1, validate, distill-scan) emit one row per grid
point; report subcommands (w-state, ghz4, timing) emit ``quantity,value``
rows. CSV uses 6 decimals, JSON keeps full precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import svg
from .dynamics import (
    Propagator,
    ZeroProbabilityError,
    analytic_ghz4_evolution,
    analytic_w_evolution,
    distillation_probability,
    measure_atom,
)
from .entanglement import fidelity_to, make_target, w_class_fidelity
from .experiments import (
    CollisionMixture,
    SweepSeries,
    format_fixed,
    dispersive_validation_sweep,
    distillation_scan,
    figure1_series,
    timing_error_study,
    validation_property,
)
from .hilbert import BasisDescriptor, StateVector, basis_state
from .models import ModelParams, vacuum_sector_hamiltonian

EXIT_ERROR = 1
EXIT_PROPERTY_FAILED = 3


class CliError(Exception):
    pass


def _amplitude_rows(prefix: str, psi: StateVector) -> list[tuple[str, float]]:
    rows = []
    for label, amp in psi.support(1e-12).items():
        rows += [
            (f"{prefix}[{label}].re", amp.real),
            (f"{prefix}[{label}].im", amp.imag),
            (f"{prefix}[{label}].abs", abs(amp)),
        ]
    return rows


def report_csv(rows: list[tuple[str, float]]) -> str:
    return "quantity,value\n" + "".join(f"{k},{format_fixed(v, 6)}\n" for k, v in rows)


def report_json(rows: list[tuple[str, float]], config: dict) -> str:
    return json.dumps({"config": config, "rows": [{"quantity": k, "value": float(v)} for k, v in rows]}, indent=2)


# ---------------------------------------------------------------- commands


def cmd_w_state(n: int, lambda_t: float) -> list[tuple[str, float]]:
    psi = analytic_w_evolution(n, lambda_t)
    rows = _amplitude_rows("psi", psi)
    rows.append(("fidelity_w", fidelity_to(psi, make_target("W", n))))
    rows.append(("fidelity_w_phase_adjusted", w_class_fidelity(psi)))
    if n >= 3:
        rows.append(("distillation_probability", distillation_probability(n, lambda_t)))
        try:
            rec = measure_atom(psi, n - 1, 0)
        except ZeroProbabilityError:
            rows.append(("post_measurement_available", 0.0))
        else:
            rows.append(("post_measurement_available", 1.0))
            rows += _amplitude_rows("post", rec.post_state)
            rows.append(("post_fidelity_w", fidelity_to(rec.post_state, make_target("W", n - 1))))
    return rows


def ghz_class_point() -> StateVector:
    """(|0011> + i sqrt(3) |1100>) / 2, the state reached at lambda t = pi/3."""
    basis = BasisDescriptor(4)
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.encode("0011")] = 0.5
    amps[basis.encode("1100")] = 0.5j * np.sqrt(3)
    return StateVector(basis, amps)


def cmd_ghz4(lambda_t: float, mode: str) -> list[tuple[str, float]]:
    psi = analytic_ghz4_evolution(lambda_t, mode)
    basis = psi.basis
    rows = [(f"abs[{b}]", abs(psi.amplitude(b))) for b in ("0011", "1100")]
    cross = max(abs(psi.amplitude(b)) for b in ("1001", "0101", "1010", "0110"))
    rows.append(("abs_cross_max", cross))
    rows += _amplitude_rows("psi", psi)
    rows.append(("fidelity_ghz_class_point", fidelity_to(psi, ghz_class_point())))
    prop = Propagator(vacuum_sector_hamiltonian(ModelParams.unit_exchange(4)))
    numeric = prop.evolve(basis_state(basis, "0011"), lambda_t)
    rows.append(("fidelity_vs_numerical", fidelity_to(psi, numeric)))
    return rows


def cmd_timing(lambda_t0: float, fraction_late: float, fraction_early: float, phase_mode: str):
    rec = timing_error_study(lambda_t0, fraction_late, fraction_early, phase_mode)
    return [("fidelity_late", rec.fidelity_late), ("fidelity_early", rec.fidelity_early)]


FIGURE1_CURVES = [
    svg.Curve("P_eg", "P(e1,g2)", "solid"),
    svg.Curve("P_ge", "P(g1,e2)", "dashed"),
    svg.Curve("P_ee", "P(e1,e2), P(g1,g2)", "dotted"),
]


# ---------------------------------------------------------------- argument parsing


def _grid(args) -> np.ndarray:
    start, stop, points = args.grid
    points = int(points)
    if not start < stop:
        raise CliError(f"grid start ({start}) must be below end ({stop})")
    if points < 2:
        raise CliError("grid needs at least 2 points")
    return np.linspace(start, stop, points)


def _ratios(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="recorded in the run config")

    parser = argparse.ArgumentParser(prog="cavityqed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("w-state", parents=[common], help="W-class evolution and distillation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda-t", type=float, default=2 * np.pi / 9)

    p = sub.add_parser("ghz4", parents=[common], help="four-atom two-excitation evolution")
    p.add_argument("--lambda-t", type=float, default=np.pi / 3)
    p.add_argument("--mode", choices=("corrected", "printed"), default="corrected")

    p = sub.add_parser("figure1", parents=[common], help="collision probabilities versus lambda t")
    p.add_argument("--grid", nargs=3, type=float, metavar=("START", "END", "POINTS"), default=(0.0, 2 * np.pi, 200))
    p.add_argument("--mixture", action="store_true", help="add the three-atom mixture-model columns")

    p = sub.add_parser("timing", parents=[common], help="timing-error fidelities for W_3")
    p.add_argument("--lambda-t0", type=float, default=2 * np.pi / 9)
    p.add_argument("--fraction", type=float, default=0.1, help="late and early fraction of t0")
    p.add_argument("--fraction-late", type=float, default=None)
    p.add_argument("--fraction-early", type=float, default=None)
    p.add_argument("--phase-mode", choices=("paper", "model"), default="paper")

    p = sub.add_parser("validate", parents=[common], help="effective-model infidelity versus delta/g")
    p.add_argument("--ratios", type=_ratios, default=[10.0, 20.0, 40.0, 80.0])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--lambda-t", type=float, default=np.pi / 4)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("distill-scan", parents=[common], help="distillation probability versus lambda t")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", nargs=3, type=float, metavar=("START", "END", "POINTS"), default=(0.0, np.pi, 50))
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("out",)}
    cfg["out"] = str(args.out) if args.out else None
    return json.loads(json.dumps(cfg, default=lambda o: list(o) if isinstance(o, tuple) else str(o)))


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        out.write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _render_series(series: SweepSeries, args, curves: list[svg.Curve], title: str) -> str:
    if args.format == "csv":
        return series.to_csv()
    if args.format == "json":
        return series.to_json(_config(args))
    return svg.render(series, curves, title=title)


def _render_report(rows, args) -> str:
    if args.format == "svg":
        raise CliError(f"svg output is only available for sweep subcommands, not {args.command}")
    return report_csv(rows) if args.format == "csv" else report_json(rows, _config(args))


def run(args, parser) -> int:
    cmd = args.command
    if cmd == "w-state":
        if args.n < 2:
            parser.error("w-state requires --n >= 2")
        _emit(_render_report(cmd_w_state(args.n, args.lambda_t), args), args.out)
    elif cmd == "ghz4":
        _emit(_render_report(cmd_ghz4(args.lambda_t, args.mode), args), args.out)
    elif cmd == "timing":
        late = args.fraction if args.fraction_late is None else args.fraction_late
        early = args.fraction if args.fraction_early is None else args.fraction_early
        _emit(_render_report(cmd_timing(args.lambda_t0, late, early, args.phase_mode), args), args.out)
    elif cmd == "figure1":
        mixture = CollisionMixture() if args.mixture else None
        series = figure1_series(_grid(args), mixture)
        _emit(_render_series(series, args, FIGURE1_CURVES, "Collision probabilities"), args.out)
    elif cmd == "distill-scan":
        if args.n < 3:
            parser.error("distill-scan requires --n >= 3")
        series = distillation_scan(args.n, _grid(args))
        curves = [svg.Curve("probability", f"P(0 on atom {args.n})", "solid")]
        _emit(_render_series(series, args, curves, f"Distillation, n = {args.n}"), args.out)
    elif cmd == "validate":
        if args.n < 1:
            parser.error("validate requires --n >= 1")
        series = dispersive_validation_sweep(args.ratios, args.lambda_t, args.n, workers=args.workers)
        curves = [
            svg.Curve("infidelity", "infidelity", "solid"),
            svg.Curve("photon_leakage", "max <a†a>", "dashed"),
        ]
        _emit(_render_series(series, args, curves, "Dispersive validity"), args.out)
        checks = validation_property(series)
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            print(f"validation property failed: {', '.join(failed)}", file=sys.stderr)
            return EXIT_PROPERTY_FAILED
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args, parser)
    except (CliError, ValueError) as exc:
        print(f"cavityqed {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
