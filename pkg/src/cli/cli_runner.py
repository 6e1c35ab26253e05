"""
Command-line runner for the generalized Lamé toolkit.

Subcommands:
    eval            s, c, d1, d2 and V on a grid
    verify-catalog  residual check of the fifteen polynomial eigenpairs
    spectrum        lowest Hill energies per Fourier class
    enumerate       polynomial eigenpairs from the Fourier or series route
    series          power-series coefficients for one ansatz kind
    transcription   tabulated versus derived series band entries

Exit statuses: 0 success, 1 usage error or failed verification,
2 domain error, 3 convergence failure.
"""

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from .. import __version__
from ..elliptic.gen_jacobi import ModulusPair, eval_all
from ..spectral import series_recurrences
from ..spectral.catalog import FourierClass, ParamVector
from ..spectral.ince_spectral import (
    CONVERGENCE_TOLERANCE,
    DEFAULT_TRUNCATION,
    HillSpectrumSolver,
    Transform,
    vanishing_catalog,
)
from ..spectral.lame_operator import DEFAULT_GRID_POINTS, DEFAULT_TOLERANCE, potential, real_period_grid, verify_catalog
from ..spectral.series_recurrences import AnsatzKind
from ..utils.errors import ConvergenceError, DomainError, UsageError
from ..utils.logger import get_logger, log_exception, log_performance
from .tables import FORMATS, Table, write_table

logger = get_logger(__name__)

PROGRAM = "genlame"
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3

ENTRY_COLUMNS = ["alpha", "beta", "gamma", "delta", "lambda", "e0", "e1", "e2", "factors"]


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one invocation."""

    command: str
    k1: float = 0.8
    k2: float = 0.3
    params: Optional[ParamVector] = None
    energy: Optional[float] = None
    energy_shift: float = 0.0
    grid: Optional[Tuple[float, float, int]] = None
    truncation: int = DEFAULT_TRUNCATION
    count: int = 4
    tolerance: Optional[float] = None
    route: str = "fourier"
    transform: Optional[str] = None
    kind: Optional[str] = None
    fmt: str = "csv"
    output: Optional[Path] = None
    workers: Optional[int] = None
    log_level: str = "WARNING"

    @property
    def moduli(self) -> ModulusPair:
        return ModulusPair(self.k1, self.k2)

    def require_params(self) -> ParamVector:
        if self.params is None:
            raise UsageError(f"{self.command} needs --params a,b,g,d,l")
        return self.params


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting on bad input."""

    def error(self, message):
        raise UsageError(message)


def _parse_params(text: str) -> ParamVector:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--params expects five comma-separated numbers, got '{text}'")
    if len(values) != 5:
        raise UsageError(f"--params expects five comma-separated numbers, got {len(values)}")
    return ParamVector(*values)


def _parse_grid(text: str) -> Tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid expects start:stop:count, got '{text}'")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"--grid expects start:stop:count, got '{text}'")
    if count < 1:
        raise UsageError(f"--grid count must be positive, got {count}")
    return start, stop, count


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    common = _ArgumentParser(add_help=False)
    common.add_argument("--k1", type=float, default=RunConfig.k1, help="Modulus k1 (default: 0.8)")
    common.add_argument("--k2", type=float, default=RunConfig.k2, help="Modulus k2 <= k1 (default: 0.3)")
    common.add_argument("--params", help="Potential parameters alpha,beta,gamma,delta,lambda")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default=RunConfig.fmt, help="Output format")
    common.add_argument("--output", type=Path, help="Output file (default: stdout)")
    common.add_argument("--tol", type=float, dest="tolerance", help="Tolerance override")
    common.add_argument(
        "--log-level",
        default=RunConfig.log_level,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Console log level (default: WARNING)",
    )

    parser = _ArgumentParser(prog=PROGRAM, description="Generalized Jacobi functions and Lamé spectra")
    parser.add_argument("--version", action="version", version=f"{PROGRAM} {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("eval", parents=[common], help="Evaluate s, c, d1, d2 and V on a grid")
    p.add_argument("--grid", help="start:stop:count (default: one real period, 101 points)")

    p = commands.add_parser("verify-catalog", parents=[common], help="Check the polynomial eigenpairs")
    p.add_argument("--energy-shift", type=float, default=0.0, help="Added to every catalog energy")
    p.add_argument("--grid", help="Only count is used; the grid spans one real period")

    p = commands.add_parser("spectrum", parents=[common], help="Lowest Hill energies per Fourier class")
    p.add_argument("--truncation", type=int, default=DEFAULT_TRUNCATION, help="Starting truncation N")
    p.add_argument("--count", type=int, default=RunConfig.count, help="Energies per class")
    p.add_argument("--transform", choices=[t.value for t in Transform], help="Ince transform")
    p.add_argument("--workers", type=int, help="Thread pool size")

    p = commands.add_parser("enumerate", parents=[common], help="Enumerate polynomial eigenpairs")
    p.add_argument("--route", choices=["fourier", "series"], default="fourier", help="Discovery route")
    p.add_argument("--transform", choices=[t.value for t in Transform], help="Restrict the Fourier route")

    p = commands.add_parser("series", parents=[common], help="Power-series coefficients")
    p.add_argument("--kind", required=True, help="Ansatz kind, e.g. 'c*d1/even' or '1/odd'")
    p.add_argument("--energy", type=float, required=True, help="Spectral parameter E")
    p.add_argument("--count", type=int, default=16, help="Number of coefficients")

    commands.add_parser("transcription", parents=[common], help="Tabulated vs derived band entries")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    """
    Parse command-line arguments into a RunConfig.

    Raises:
        UsageError: on unparseable or inconsistent arguments
        DomainError: if the moduli violate 0 <= k2 <= k1 <= 1
    """
    args = build_parser().parse_args(list(argv))
    values = vars(args)
    if values.get("params") is not None:
        values["params"] = _parse_params(values["params"])
    if values.get("grid") is not None:
        values["grid"] = _parse_grid(values["grid"])
    if values.get("workers") is not None and values["workers"] < 1:
        raise UsageError(f"--workers must be positive, got {values['workers']}")
    if values.get("count") is not None and values["count"] < 1:
        raise UsageError(f"--count must be positive, got {values['count']}")
    # DomainError before dispatch
    ModulusPair(values["k1"], values["k2"])
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{key: value for key, value in values.items() if key in known})


def cmd_eval(config: RunConfig) -> Table:
    """Table of (z, s, c, d1, d2, V)."""
    m = config.moduli
    if config.grid is None:
        if m.k1 >= 1.0:
            raise UsageError("k1 = 1 has no real period; pass --grid")
        z = real_period_grid(m, 101)
    else:
        start, stop, count = config.grid
        z = np.linspace(start, stop, count)
    params = config.params or ParamVector(0.0, 0.0, 0.0, 0.0, 0.0)

    point = eval_all(z, m)
    V = potential(z, params, m)
    table = Table(["z", "s", "c", "d1", "d2", "V"])
    for row in zip(z, point.s, point.c, point.d1, point.d2, np.broadcast_to(V, z.shape)):
        table.add_row(*(float(v) for v in row))
    return table


def cmd_verify_catalog(config: RunConfig) -> Table:
    """Residual report, one row per catalog entry."""
    count = config.grid[2] if config.grid is not None else DEFAULT_GRID_POINTS
    tolerance = config.tolerance if config.tolerance is not None else DEFAULT_TOLERANCE
    report = verify_catalog(config.moduli, count, tolerance, config.energy_shift)
    table = Table(ENTRY_COLUMNS + ["E", "residual", "passed"])
    for row in report:
        record = row["entry"].to_dict()
        table.add_row(
            *(record[key] for key in ENTRY_COLUMNS), float(row["energy"]), float(row["residual"]), row["passed"]
        )
    return table


def cmd_spectrum(config: RunConfig) -> Table:
    """Table of (class, index, E), classes in declaration order, E ascending."""
    params = config.require_params()
    transform = Transform.from_label(config.transform) if config.transform else Transform.STANDARD
    tolerance = config.tolerance if config.tolerance is not None else CONVERGENCE_TOLERANCE
    solver = HillSpectrumSolver(config.moduli, transform, tolerance)
    spectrum = solver.spectrum(params, config.count, config.truncation, workers=config.workers)
    table = Table(["class", "index", "E"])
    for fclass in FourierClass:
        for index, energy in enumerate(spectrum[fclass]):
            table.add_row(fclass.value, index, float(energy))
    return table


def cmd_enumerate(config: RunConfig) -> Table:
    """Discovered polynomial eigenpairs with their Fourier class and route."""
    if config.route == "series":
        entries = series_recurrences.series_catalog()
    else:
        transforms = (
            (Transform.from_label(config.transform),)
            if config.transform
            else (Transform.STANDARD, Transform.D1_SHIFTED)
        )
        entries = vanishing_catalog(transforms)
    table = Table(ENTRY_COLUMNS + ["class", "route"])
    for entry in entries:
        record = entry.to_dict()
        table.add_row(*(record[key] for key in ENTRY_COLUMNS), entry.fourier_class.value, config.route)
    return table


def cmd_series(config: RunConfig) -> Table:
    """Table of (n, power, a_n) for one ansatz kind."""
    kind = AnsatzKind.from_label(config.kind)
    coeffs = series_recurrences.series_coefficients(
        kind, config.require_params(), config.energy, config.moduli, config.count
    )
    ratio = series_recurrences.convergence_ratio(coeffs)
    logger.info(f"Series {kind.label}: coefficient ratio {ratio}")
    table = Table(["n", "power", "a"])
    for n, a in enumerate(coeffs):
        table.add_row(n, 2 * n + kind.eps, float(a))
    return table


def cmd_transcription(config: RunConfig) -> Table:
    """Every tabulated band entry that differs from the derived one."""
    table = Table(["kind", "entry", "agreeing_n", "printed_sample", "derived_sample", "difference"])
    for mismatch in series_recurrences.transcription_report():
        table.add_row(
            mismatch.kind.label,
            mismatch.entry,
            " ".join(str(n) for n in mismatch.agreeing_n),
            mismatch.sample["printed"],
            mismatch.sample["derived"],
            mismatch.difference,
        )
    return table


COMMANDS: Dict[str, Callable[[RunConfig], Table]] = {
    "eval": cmd_eval,
    "verify-catalog": cmd_verify_catalog,
    "spectrum": cmd_spectrum,
    "enumerate": cmd_enumerate,
    "series": cmd_series,
    "transcription": cmd_transcription,
}


def _apply_log_level(level_name: str):
    level = getattr(logging, level_name)
    root = logging.getLogger()
    root.setLevel(level)
    for handler in root.handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
            handler.setLevel(level)


def run(argv: Sequence[str], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """
    Parse, dispatch and write one command.

    Args:
        argv: Arguments without the program name
        stdout: Table stream (default: sys.stdout)
        stderr: Diagnostic stream (default: sys.stderr)

    Returns:
        Exit status
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        config = parse_config(argv)
        _apply_log_level(config.log_level)
        logger.info(f"Running {config.command} at k1={config.k1}, k2={config.k2}")

        start_time = time.time()
        table = COMMANDS[config.command](config)
        write_table(table, config.fmt, config.output, stdout)
        log_performance(logger, config.command, start_time, time.time(), rows=len(table))

        if config.command == "verify-catalog":
            failed = [row for row in table.records() if not row["passed"]]
            if failed:
                stderr.write(f"{PROGRAM}: {len(failed)} of {len(table)} catalog entries failed\n")
                return EXIT_FAILURE
        return EXIT_OK

    except UsageError as e:
        stderr.write(f"{PROGRAM}: usage error: {e}\n")
        return EXIT_FAILURE
    except DomainError as e:
        log_exception(logger, f"Domain error: {e}", level=logging.DEBUG)
        stderr.write(f"{PROGRAM}: domain error: {e}\n")
        return EXIT_DOMAIN
    except ConvergenceError as e:
        log_exception(logger, f"Convergence failure: {e}", level=logging.DEBUG)
        stderr.write(f"{PROGRAM}: convergence failure: {e}\n")
        return EXIT_CONVERGENCE
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)
    except Exception as e:
        log_exception(logger, f"Unexpected error: {e}")
        stderr.write(f"{PROGRAM}: error: {e}\n")
        return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)
