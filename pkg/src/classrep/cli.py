"""Command-line driver: ``classrep <command> [options]``.

Exit codes: 0 success, 1 validation failure (or manifest mismatch),
2 configuration error, 3 numerical failure.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from .classrep_equation import kernel_q, kernel_q_box_limit, phi_from_f, residual_density_ode, residual_integro
from .config import INFINITE, Exponent, RunConfig, load_run_config
from .eigensolver import c_n1, density_derivatives, support_end
from .ensemble import cumulative, find_nodes, scaled_distribution, tail_profile
from .errors import ClassrepError, ConfigurationError
from .exporter import ResultExporter, verify_manifest
from .figures import FIGURES, figure_data
from .processor import ClassrepProcessor
from .validation import run_validation
from .wkb import wkb0, wkb2, wkb_limits

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

DEFAULT_POINTS = 401


def parse_m_list(text: str) -> list[Exponent]:
    """Comma-separated exponents; 'inf' or 'infinite' selects the box limit."""
    values: list[Exponent] = []
    for item in text.split(","):
        item = item.strip().lower()
        if item in ("inf", INFINITE):
            values.append(INFINITE)
            continue
        try:
            values.append(int(item))
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid exponent '{item}'") from None
    return values


def parse_n_list(text: str) -> list[int]:
    """Comma-separated indices or ranges such as '0-4'."""
    values: list[int] = []
    try:
        for item in text.split(","):
            if "-" in item:
                start, stop = item.split("-", 1)
                values.extend(range(int(start), int(stop) + 1))
            else:
                values.append(int(item))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid index list '{text}'") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", dest="m_list", type=parse_m_list, help="Exponents, e.g. 1,2,5,inf")
    common.add_argument("--n", dest="n_list", type=parse_n_list, help="State indices, e.g. 0,4 or 0-4")
    common.add_argument("--grid-min", type=float, help="Lower end of the energy grid")
    common.add_argument("--grid-max", type=float, help="Upper end of the energy grid")
    common.add_argument("--points", type=int, help="Samples per output curve")
    common.add_argument("--format", choices=["csv", "json"], help="Table format")
    common.add_argument("--out", dest="output_dir", type=Path, help="Output directory")
    common.add_argument("--workers", type=int, help="Worker processes (default from CLASSREP_WORKERS)")
    common.add_argument("--tolerance-profile", help="Tolerance profile: default, strict or fast")
    common.add_argument("--config", type=Path, help="JSON or YAML run configuration file")

    parser = argparse.ArgumentParser(
        prog="classrep",
        description="Classical-representation energy distributions for bound states of x^(2m)",
    )
    parser.add_argument("--verify", type=Path, metavar="MANIFEST", help="Re-check the checksums of a manifest")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")

    commands = parser.add_subparsers(dest="command")
    commands.add_parser("eigen", parents=[common], help="Eigenvalues, WKB estimates and densities")
    commands.add_parser("wkb", parents=[common], help="WKB eigenvalues and their large-m forms")
    commands.add_parser("density", parents=[common], help="Position densities and derivatives")
    commands.add_parser("distribution", parents=[common], help="Energy distributions f_n and F_n")
    kernel = commands.add_parser("kernel", parents=[common], help="Kernel Q(eps~, eps) tables")
    kernel.add_argument("--eps", type=float, default=1.0, help="Fixed lower energy eps")
    commands.add_parser("residual", parents=[common], help="Residuals of the density and integral equations")
    validate = commands.add_parser("validate", parents=[common], help="Run the validation suite")
    validate.add_argument("--epsilon-shift", type=float, help="Shift eigenvalues before the density check")
    figure = commands.add_parser("figure", parents=[common], help="Data behind one of the standard figures")
    figure.add_argument("number", type=int, choices=sorted(FIGURES), help="Figure number")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = ("m_list", "n_list", "grid_min", "grid_max", "points", "format", "output_dir", "workers")
    values = {key: getattr(args, key, None) for key in keys}
    values["tolerance_profile"] = getattr(args, "tolerance_profile", None)
    values["epsilon_shift"] = getattr(args, "epsilon_shift", None)
    return values


def _parameters(config: RunConfig) -> dict[str, Any]:
    return config.model_dump(mode="json", exclude={"output_dir", "workers"})


def cmd_eigen(config: RunConfig, exporter: ResultExporter) -> tuple[list[dict], ClassrepProcessor]:
    processor = ClassrepProcessor(config)
    points = config.points or DEFAULT_POINTS
    rows, summary = [], []
    for m, n, sol in processor.process_states():
        finite = m != INFINITE
        rows.append(
            {
                "m": str(m),
                "n": n,
                "epsilon": sol.epsilon,
                "wkb0": wkb0(n, m).epsilon if finite else math.nan,
                "wkb2": wkb2(n, m).epsilon if finite else math.nan,
                "accuracy_estimate": sol.accuracy_estimate,
                "c_n1": c_n1(sol),
            }
        )
        x = np.linspace(0.0, 1.0 if sol.is_box else min(support_end(sol, 1e-10), sol.x_max), points)
        psi = sol.wavefunction(x)
        exporter.write_table(f"density/m{m}_n{n}", pd.DataFrame({"x": x, "psi": psi, "rho": psi * psi}))
        summary.append({"m": m, "n": n, "epsilon": sol.epsilon, "accuracy_estimate": sol.accuracy_estimate})
    exporter.write_table("eigenvalues", pd.DataFrame(rows))
    return summary, processor


def cmd_wkb(config: RunConfig, exporter: ResultExporter) -> tuple[list[dict], None]:
    rows = []
    for m in config.finite_m:
        for n in config.n_list:
            limit0, limit2 = wkb_limits(n, m)
            rows.append(
                {
                    "m": m,
                    "n": n,
                    "wkb0": wkb0(n, m).epsilon,
                    "wkb2": wkb2(n, m).epsilon,
                    "wkb0_limit": limit0,
                    "wkb2_limit": limit2,
                }
            )
    exporter.write_table("wkb", pd.DataFrame(rows))
    return [], None


def cmd_density(config: RunConfig, exporter: ResultExporter) -> tuple[list[dict], ClassrepProcessor]:
    processor = ClassrepProcessor(config)
    points = config.points or DEFAULT_POINTS
    for m, n, sol in processor.process_states():
        x = np.linspace(0.0, 1.0 if sol.is_box else min(support_end(sol, 1e-10), sol.x_max), points)
        rho, drho, d2rho = density_derivatives(sol, x)
        exporter.write_table(f"density/m{m}_n{n}", pd.DataFrame({"x": x, "rho": rho, "drho": drho, "d2rho": d2rho}))
    return [], processor


def cmd_distribution(config: RunConfig, exporter: ResultExporter) -> tuple[list[dict], ClassrepProcessor]:
    processor = ClassrepProcessor(config)
    summary = []
    for m, n, sol, f in processor.process_distributions():
        F = cumulative(f).F
        exporter.write_table(f"distribution/m{m}_n{n}", pd.DataFrame({"eps": f.eps_grid, "f": f.f, "F": F}))
        y, g = scaled_distribution(f)
        exporter.write_table(f"scaled/m{m}_n{n}", pd.DataFrame({"y": y, "g": g}))
        eps, values, weighted = tail_profile(f)
        exporter.write_table(f"tail/m{m}_n{n}", pd.DataFrame({"eps": eps, "f": values, "eps_f": weighted}))
        summary.append(
            {
                "m": m,
                "n": n,
                "epsilon": sol.epsilon,
                "integral": f.integral,
                "mean_energy": f.mean_energy,
                "head_exponent": f.head_exponent,
                "nodes": [float(v) for v in find_nodes(f)],
            }
        )
    return summary, processor


def cmd_kernel(config: RunConfig, exporter: ResultExporter, eps: float) -> tuple[list[dict], None]:
    points = config.points or DEFAULT_POINTS
    low = config.grid.grid_min or 1.01 * eps
    high = config.grid.grid_max or 20.0 * eps
    if not eps < low < high:
        raise ConfigurationError(f"kernel grid needs eps < grid-min < grid-max, got {eps}, {low}, {high}")
    eps_tilde = np.linspace(low, high, points)
    frames = []
    for m in config.finite_m:
        q = [kernel_q(float(e), eps, m).value for e in eps_tilde]
        box = [kernel_q_box_limit(float(e), eps, m) for e in eps_tilde]
        frames.append(pd.DataFrame({"m": m, "eps_tilde": eps_tilde, "eps": eps, "q": q, "q_box_limit": box}))
    exporter.write_table("kernel", pd.concat(frames, ignore_index=True))
    return [], None


def cmd_residual(config: RunConfig, exporter: ResultExporter) -> tuple[list[dict], ClassrepProcessor]:
    processor = ClassrepProcessor(config)
    rows = []
    for m, n, sol, f in processor.process_distributions():
        try:
            integro = residual_integro(phi_from_f(f), sol.epsilon, int(m))
        except ClassrepError as e:
            logger.warning(f"Integral-equation residual unavailable for m={m}, n={n}: {e}")
            integro = math.nan
        rows.append({"m": str(m), "n": n, "density_ode": residual_density_ode(sol), "integro": integro})
    exporter.write_table("residuals", pd.DataFrame(rows))
    return rows, processor


def cmd_validate(config: RunConfig, exporter: ResultExporter) -> bool:
    report = run_validation(config)
    exporter.write_json("validation_report", report.model_dump(mode="json") | {"passed": report.passed})
    exporter.write_manifest(
        "validate",
        _parameters(config),
        summary=[c.model_dump(mode="json") for c in report.checks],
        failures=report.failures,
    )
    return report.passed


def run(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, _overrides(args))
    exporter = ResultExporter(config.output_dir, config.format)
    if args.command == "validate":
        return EXIT_OK if cmd_validate(config, exporter) else EXIT_VALIDATION

    if args.command == "figure":
        table, processor = figure_data(args.number, config)
        exporter.write_table(f"figure_{args.number}", table)
        summary, command = [], f"figure {args.number}"
    else:
        handlers = {
            "eigen": cmd_eigen,
            "wkb": cmd_wkb,
            "density": cmd_density,
            "distribution": cmd_distribution,
            "residual": cmd_residual,
        }
        if args.command == "kernel":
            summary, processor = cmd_kernel(config, exporter, args.eps)
        else:
            summary, processor = handlers[args.command](config, exporter)
        command = args.command

    failures = processor.failures if processor is not None else []
    exporter.write_manifest(command, _parameters(config), summary=summary, failures=failures)
    if any(not f.expected for f in failures):
        logger.error(f"{sum(not f.expected for f in failures)} task(s) failed; see the manifest")
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    if args.verify is not None:
        try:
            problems = verify_manifest(args.verify)
        except ConfigurationError as e:
            logger.error(str(e))
            return EXIT_CONFIG
        for problem in problems:
            print(problem)
        return EXIT_VALIDATION if problems else EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG

    try:
        return run(args)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except ClassrepError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
