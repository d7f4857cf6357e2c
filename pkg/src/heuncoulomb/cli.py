"""Command-line interface.

Exit codes: 0 success, 1 bad physical or command-line input, 2 numerical
failure, 3 validation-suite failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .core import DomainError, NumericalError, PhysicalParams, QuantumNumbers, validate_pair
from .h3 import (
    build_reduced_case1,
    build_six_point,
    exponents_six_point,
    h3_bound_states,
    h3_cutoff_sensitivity,
    h3_window,
)
from .heun import ROUTES, heun_params, heun_series, polynomial_residual, spectrum_via_heun
from .spectra import LevelRecord, enumerate_levels

TOL_ENV = "HEUNCOULOMB_TOL"
DEFAULT_TOL = 1e-12
LEVEL_COLUMNS = (
    "two_j",
    "parity",
    "n",
    "E_closed",
    "E_kummer",
    "E_heun_direct",
    "E_heun_case1",
    "E_heun_case2",
    "max_residual",
)
COMMANDS = ("levels", "heun-params", "heun-check", "h3-exponents", "h3-spectrum", "validate")


class UsageError(DomainError):
    pass


@dataclass
class RunConfig:
    command: str
    mass: float = 1.0
    coupling: float = 0.0
    j_max: float = 0.5
    n_max: int = 2
    two_j: int = 1
    energy: float | None = None
    tolerance: float = DEFAULT_TOL
    output_format: str = "table"
    output_path: str | None = None
    shooting: bool = False
    jobs: int = 1
    z_in: float = 1e-4
    z_out: float | None = None
    n_scan: int = 80
    sensitivity: bool = False
    extra: dict = field(default_factory=dict)

    def physical(self) -> PhysicalParams:
        return PhysicalParams(self.mass, self.coupling)

    def inputs(self) -> dict:
        keys = {
            "levels": ("mass", "coupling", "j_max", "n_max", "shooting"),
            "heun-params": ("mass", "coupling", "two_j", "energy"),
            "heun-check": ("mass", "coupling", "two_j", "n_max"),
            "h3-exponents": ("mass", "coupling", "two_j", "energy"),
            "h3-spectrum": ("mass", "coupling", "two_j", "z_in", "z_out", "n_scan", "sensitivity"),
            "validate": (),
        }[self.command]
        return {k: getattr(self, k) for k in keys}


@dataclass
class Report:
    rows: list[dict]
    columns: tuple[str, ...]
    diagnostics: list[str] = field(default_factory=list)
    key: str = "rows"
    exit_code: int = 0


# -- serialization ---------------------------------------------------------------


def level_row(rec: LevelRecord) -> dict:
    return {
        "two_j": rec.qn.two_j,
        "parity": rec.qn.parity_delta,
        "n": rec.qn.n_radial,
        "E_closed": rec.energy_closed,
        "E_kummer": rec.energy_kummer,
        "E_heun_direct": rec.energy_heun_direct,
        "E_heun_case1": rec.energy_heun_case1,
        "E_heun_case2": rec.energy_heun_case2,
        "E_shooting": rec.energy_shooting,
        "max_residual": rec.max_cross_residual,
        "notes": list(rec.notes),
    }


def level_from_row(row: dict) -> LevelRecord:
    return LevelRecord(
        QuantumNumbers(row["two_j"], row["parity"], row["n"]),
        row["E_closed"],
        row["E_kummer"],
        row["E_heun_direct"],
        row["E_heun_case1"],
        row["E_heun_case2"],
        row.get("E_shooting"),
        row["max_residual"],
        tuple(row.get("notes", ())),
    )


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _text(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    if isinstance(v, (list, tuple)):
        return "; ".join(_text(x) for x in v)
    return str(v)


def render(report: Report, cfg: RunConfig) -> str:
    if cfg.output_format == "json":
        doc = {
            "meta": {
                "command": cfg.command,
                "inputs": cfg.inputs(),
                "tolerances": {"root": cfg.tolerance},
                "version": __version__,
            },
            report.key: _jsonable(report.rows),
            "diagnostics": report.diagnostics,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        for row in report.rows:
            w.writerow([_text(row.get(c)) for c in report.columns])
        return buf.getvalue()
    table = [list(report.columns)] + [[_short(row.get(c)) for c in report.columns] for row in report.rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(report.columns))]
    lines = ["  ".join(cell.rjust(wd) for cell, wd in zip(r, widths)) for r in table]
    lines += [f"# {d}" for d in report.diagnostics]
    return "\n".join(lines) + "\n"


def _short(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}j"
    return _text(v)


# -- commands ----------------------------------------------------------------------


def cmd_levels(cfg: RunConfig) -> Report:
    ph = cfg.physical()
    skipped: list[str] = []
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            recs = enumerate_levels(ph, cfg.j_max, cfg.n_max, shooting=cfg.shooting, executor=pool, skipped=skipped)
    else:
        recs = enumerate_levels(ph, cfg.j_max, cfg.n_max, shooting=cfg.shooting, skipped=skipped)
    if not recs and skipped:
        # nothing valid: report the first validation failure itself
        validate_pair(QuantumNumbers(1), ph)
    columns = LEVEL_COLUMNS + (("E_shooting",) if cfg.shooting else ())
    notes = sorted({n for r in recs for n in r.notes})
    return Report([level_row(r) for r in recs], columns, skipped + notes, key="levels")


def _qn(cfg: RunConfig) -> QuantumNumbers:
    return QuantumNumbers(cfg.two_j)


def _need_energy(cfg: RunConfig) -> float:
    if cfg.energy is None:
        raise UsageError(f"{cfg.command} needs --energy")
    return cfg.energy


def cmd_heun_params(cfg: RunConfig) -> Report:
    qn, ph, E = _qn(cfg), cfg.physical(), _need_energy(cfg)
    rows = []
    for route in ROUTES:
        hp = heun_params(route, qn, ph, E)
        rows.append(
            {"route": route, "alpha": hp.alpha, "beta": hp.beta, "gamma": hp.gamma, "delta": hp.delta,
             "eta": hp.eta, "R": hp.R}
        )
    return Report(rows, ("route", "alpha", "beta", "gamma", "delta", "eta", "R"))


def cmd_heun_check(cfg: RunConfig) -> Report:
    qn, ph = _qn(cfg), cfg.physical()
    rows = []
    for n in range(cfg.n_max + 1):
        for route in ROUTES:
            E = spectrum_via_heun(route, qn, ph, n)
            if E == ph.mass:  # free limit, no parameters
                rows.append({"n": n, "route": route, "E": E, "polynomial_residual": 0.0, "termination_ratio": None})
                continue
            hp = heun_params(route, qn, ph, E)
            ratio = heun_series(hp, n + 8).termination_ratio(n)
            rows.append(
                {"n": n, "route": route, "E": E, "polynomial_residual": polynomial_residual(hp, n),
                 "termination_ratio": ratio}
            )
    return Report(rows, ("n", "route", "E", "polynomial_residual", "termination_ratio"))


def cmd_h3_exponents(cfg: RunConfig) -> Report:
    qn, ph, E = _qn(cfg), cfg.physical(), _need_energy(cfg)
    rows = []
    six = exponents_six_point(build_six_point(qn, ph, E))
    red = build_reduced_case1(qn, ph, E).exponents
    for name, ex in (("six-point f", six), ("reduced G", red)):
        res = ex.residuals()
        for label, (s1, s2) in ex.pairs().items():
            rows.append(
                {"equation": name, "point": label, "exponent_1": s1, "exponent_2": s2,
                 "indicial_residual": res[label], "bound_branch": ex.bound_branch.get(label)}
            )
    diag = [] if six.bound_possible else ["(E+e)^2 >= m^2: no decaying branch at z=1"]
    return Report(rows, ("equation", "point", "exponent_1", "exponent_2", "indicial_residual", "bound_branch"), diag)


def cmd_h3_spectrum(cfg: RunConfig) -> Report:
    qn, ph = _qn(cfg), cfg.physical()
    validate_pair(qn, ph)
    lo, hi = h3_window(ph)
    energies = h3_bound_states(qn, ph, z_in=cfg.z_in, z_out=cfg.z_out, n_scan=cfg.n_scan, tol_E=cfg.tolerance * ph.mass)
    diag = [] if energies else [f"no H3 bound state in the window ({lo}, {hi})"]
    rows = []
    for i, E in enumerate(energies):
        row = {"index": i, "E": E, "binding": ph.mass - E}
        if cfg.sensitivity:
            width = 1e-3 * ph.mass
            sens = h3_cutoff_sensitivity(qn, ph, (max(E - width, lo + 1e-9), min(E + width, hi - 1e-9)), z_in=cfg.z_in)
            row["shift_inner"], row["shift_outer"] = sens["shift_inner"], sens["shift_outer"]
        rows.append(row)
    cols = ("index", "E", "binding") + (("shift_inner", "shift_outer") if cfg.sensitivity else ())
    return Report(rows, cols, diag)


def cmd_validate(cfg: RunConfig) -> Report:
    from .validation import run_suite

    results = run_suite()
    rows = [
        {"check": r.name, "passed": r.passed, "value": r.value, "threshold": r.threshold, "detail": r.detail}
        for r in results
    ]
    failed = sum(not r.passed for r in results)
    diag = [f"{len(results) - failed} passed, {failed} failed"]
    return Report(rows, ("check", "passed", "value", "threshold", "detail"), diag, exit_code=3 if failed else 0)


HANDLERS = {
    "levels": cmd_levels,
    "heun-params": cmd_heun_params,
    "heun-check": cmd_heun_check,
    "h3-exponents": cmd_h3_exponents,
    "h3-spectrum": cmd_h3_spectrum,
    "validate": cmd_validate,
}


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute ``cfg``; returns (exit code, serialized report or error message)."""
    try:
        report = HANDLERS[cfg.command](cfg)
    except DomainError as exc:
        return 1, f"error: {exc}\n"
    except NumericalError as exc:
        return 2, f"numerical failure: {exc}\n"
    return report.exit_code, render(report, cfg)


# -- argument parsing ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def default_tolerance() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return tol


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heuncoulomb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, energy=False, two_j=True):
        p.add_argument("--mass", type=float, default=1.0)
        p.add_argument("--coupling", type=float, required=True, help="e = Z alpha")
        if two_j:
            p.add_argument("--two-j", type=int, default=1, help="twice the total angular momentum (odd)")
        if energy:
            p.add_argument("--energy", type=float, required=True)
        p.add_argument("--tol", type=float, default=None, help=f"root tolerance (env {TOL_ENV})")
        p.add_argument("--format", choices=("json", "csv", "table"), default="table")
        p.add_argument("--output", default=None, help="write to this file instead of stdout")

    p = sub.add_parser("levels", help="spectrum by every analytic route")
    common(p, two_j=False)
    p.add_argument("--j-max", type=float, default=0.5)
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--shooting", action="store_true", help="add a numerical shooting column")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("heun-params", help="confluent Heun parameters per route at one energy")
    common(p, energy=True)

    p = sub.add_parser("heun-check", help="polynomial residuals at the quantized energies")
    common(p)
    p.add_argument("--n-max", type=int, default=4)

    p = sub.add_parser("h3-exponents", help="Frobenius exponents of the H3 equations")
    common(p, energy=True)

    p = sub.add_parser("h3-spectrum", help="H3 bound states by shooting")
    common(p)
    p.add_argument("--z-in", type=float, default=1e-4)
    p.add_argument("--z-out", type=float, default=None)
    p.add_argument("--n-scan", type=int, default=80)
    p.add_argument("--sensitivity", action="store_true", help="report cutoff sensitivity per level")

    p = sub.add_parser("validate", help="run the invariant suite")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p.add_argument("--output", default=None)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    tol = ns.tol if getattr(ns, "tol", None) is not None else default_tolerance()
    cfg = RunConfig(command=ns.command, tolerance=tol, output_format=ns.format, output_path=ns.output)
    for name in ("mass", "coupling", "j_max", "n_max", "two_j", "energy", "shooting", "jobs", "z_in", "z_out",
                 "n_scan", "sensitivity"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if cfg.command != "validate":
        cfg.physical()
        if cfg.command != "levels":
            _qn(cfg)
    if cfg.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return cfg


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    code, text = run(cfg)
    if code in (1, 2):
        sys.stderr.write(text)
        return code
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code
