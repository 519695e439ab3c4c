"""Command-line front end: scan, calibrate, oracle, check."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .analytic import OracleInput, discrepancy_report
from .checks import run_checks
from .models import ConfigurationError, ModelKind, ModelParams, assemble, cavity_slot
from .observables import photon_stats
from .scan import ConfigError, calibrate_windows, emit, load_config, run_scan
from .steadystate import SolverError, TruncationError, solve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mollowscan",
        description="Cascaded quantum light spectroscopy scans and checks",
    )
    parser.add_argument(
        "--seedless",
        action="store_true",
        help="accepted for interface stability; the product path uses no RNG either way",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_scan = sub.add_parser("scan", help="run a sweep from a config file")
    p_scan.add_argument("--config", required=True)
    p_scan.add_argument("--out", default=".")
    p_scan.add_argument("--format", default="csv", choices=("csv", "json", "svg"))
    p_scan.add_argument("--workers", type=int, default=None, help="override the config worker count")

    p_cal = sub.add_parser("calibrate", help="locate triplet windows from the uncoupled model")
    p_cal.add_argument("--config", required=True)
    p_cal.add_argument("--out", default=None, help="also write the window table as JSON here")

    p_oracle = sub.add_parser("oracle", help="evaluate the closed-form photon statistics")
    p_oracle.add_argument("--omega-drive", type=float, default=8.0)
    p_oracle.add_argument("--gamma-s", type=float, default=0.02)
    p_oracle.add_argument("--kappa", type=float, default=1.0)
    p_oracle.add_argument("--mu1", type=float, default=0.5)
    p_oracle.add_argument("--mu2", type=float, default=0.5)
    p_oracle.add_argument("--delta", type=float, default=0.0)
    p_oracle.add_argument(
        "--numeric",
        action="store_true",
        help="also solve the steady state and attach a discrepancy report",
    )
    p_oracle.add_argument("--n-cavity", type=int, default=8)

    sub.add_parser("check", help="run the small-instance invariant suite")
    return parser


def _cmd_scan(args) -> int:
    config = load_config(args.config)
    if args.workers is not None:
        config = dataclasses.replace(config, workers=args.workers)
    result = run_scan(config)
    path = emit(result, args.format, args.out)
    print(f"wrote {path} ({len(result.rows)} rows, {result.metadata['wall_time_s']:.1f}s)")
    return 0


def _cmd_calibrate(args) -> int:
    config = load_config(args.config)
    windows, _ = calibrate_windows(config)
    table = windows.named()
    print(json.dumps(table, indent=2))
    if args.out:
        from pathlib import Path

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "windows.json").write_text(json.dumps(table, indent=2))
    return 0


def _cmd_oracle(args) -> int:
    inp = OracleInput(
        omega_drive=args.omega_drive,
        gamma_s=args.gamma_s,
        kappa=args.kappa,
        mu1=args.mu1,
        mu2=args.mu2,
        delta=args.delta,
    )
    numeric_na = numeric_g2 = None
    if args.numeric:
        params = ModelParams(
            omega_drive=args.omega_drive, gamma_s=args.gamma_s, kappa=args.kappa,
            mu1=args.mu1, mu2=args.mu2, delta=args.delta, n_cavity=args.n_cavity,
        )
        lv = assemble(ModelKind.CASCADED_JC, params)
        state = solve(lv)
        stats = photon_stats(state.rho, lv.space, cavity_slot(ModelKind.CASCADED_JC))
        numeric_na, numeric_g2 = stats.n_a, stats.g2
    print(json.dumps(discrepancy_report(inp, numeric_na, numeric_g2), indent=2))
    return 0


def _cmd_check() -> int:
    results = run_checks()
    failed = 0
    for name, passed, detail in results:
        marker = "ok  " if passed else "FAIL"
        print(f"{marker} {name}: {detail}")
        failed += 0 if passed else 1
    if failed:
        print(f"{failed} of {len(results)} checks failed")
        return 1
    print(f"all {len(results)} checks passed")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "scan":
            return _cmd_scan(args)
        if args.verb == "calibrate":
            return _cmd_calibrate(args)
        if args.verb == "oracle":
            return _cmd_oracle(args)
        return _cmd_check()
    except (ConfigError, ConfigurationError, ValueError) as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except (SolverError, TruncationError) as exc:
        print(json.dumps({"error": "solver", "message": str(exc)}), file=sys.stderr)
        return 3
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
