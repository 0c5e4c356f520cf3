"""Command-line driver: parameter sweeps, scaling fits, and figure data.

Sweeps evaluate the cartesian product of the configured axes in the fixed
order (scenario, N, T, gamma2, cutoff, spacing), one row per grid point.
Rows are written in grid order regardless of worker completion order, and all
floats are printed with 17 significant digits, so rerunning a configuration
reproduces the output byte for byte.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import configparser
import itertools
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .bath import BathSpec, ProbeChain, Scenario
from .errors import ConfigError, DomainError, NessThermoError
from .gaussian import log_negativity, mutual_information, position_block
from .metrology import Measurement, cfi_gaussian_measurement, min_relative_error, qfi
from .oracle import DiscreteBath, evolve_covariance
from .solver import (
    CorrelationKind,
    NessProblem,
    QuadratureConfig,
    correlation_profile,
    steady_state_family,
)

CSV_COLUMNS = (
    "scenario", "N", "T", "gamma2", "Omega_cutoff", "spacing",
    "qfi", "cfi_x", "cfi_p", "min_rel_error",
    "log_negativity_halfcut", "mutual_info_1_rest", "quad_err_est", "error_code",
)
PROFILE_COLUMNS = (
    "scenario", "N", "T", "gamma2", "Omega_cutoff", "spacing",
    "kind", "mode_ref", "mode_other", "value",
)
ALL_QUANTITIES = ("qfi", "cfi_x", "cfi_p", "negativity", "mutual_information")
FIGURE_IDS = ("fig1", "fig2", "fig3", "figA_corr_T", "figA_corr_r",
              "figB_intermediate_T")
# gamma^2 sweep values for the error-vs-temperature figure; chosen defaults,
# the source material does not list the coupling grid.
FIG1_GAMMA2 = (0.25, 1.0, 4.0)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ALL_FAILED = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Axes and defaults of one sweep; every axis is a nonempty tuple."""

    scenarios: tuple = ("b",)
    n_probes: tuple = (10,)
    temperatures: tuple = (0.01,)
    gamma2: tuple = (1.0,)
    cutoff: tuple = (100.0,)
    spacing: tuple = (0.1,)
    omega0: float = 1.0
    mass: float = 1.0
    renormalization: bool = True
    quantities: tuple = ALL_QUANTITIES
    out_path: str | None = None
    out_format: str = "csv"
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        axes = (self.scenarios, self.n_probes, self.temperatures, self.gamma2,
                self.cutoff, self.spacing)
        if any(len(a) == 0 for a in axes):
            raise ConfigError("every sweep axis needs at least one value")
        for name in ("temperatures", "gamma2", "cutoff", "spacing"):
            if any(v <= 0 for v in getattr(self, name)):
                raise ConfigError(f"{name} values must be positive")
        if any(n < 1 for n in self.n_probes):
            raise ConfigError("n_probes values must be positive integers")
        if self.omega0 <= 0 or self.mass <= 0:
            raise ConfigError("omega0 and mass must be positive")
        for s in self.scenarios:
            Scenario.parse(s)
        unknown = set(self.quantities) - set(ALL_QUANTITIES)
        if unknown:
            raise ConfigError(f"unknown quantities: {sorted(unknown)}")
        if self.out_format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")


def _parse_values(text, cast):
    return tuple(cast(tok) for tok in text.replace(",", " ").split())


def load_config(path) -> ExperimentConfig:
    """Parse the flat INI experiment file; raises ConfigError with location."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    kwargs = {}
    try:
        if parser.has_section("probe"):
            sec = parser["probe"]
            kwargs["omega0"] = sec.getfloat("omega0", 1.0)
            kwargs["mass"] = sec.getfloat("mass", 1.0)
            if "spacing" in sec:
                kwargs["spacing"] = _parse_values(sec["spacing"], float)
        if parser.has_section("bath"):
            sec = parser["bath"]
            if "gamma2" in sec:
                kwargs["gamma2"] = _parse_values(sec["gamma2"], float)
            if "cutoff" in sec:
                kwargs["cutoff"] = _parse_values(sec["cutoff"], float)
            if "scenario" in sec:
                kwargs["scenarios"] = _parse_values(sec["scenario"], str)
            if "renormalization" in sec:
                kwargs["renormalization"] = sec.getboolean("renormalization")
        if parser.has_section("sweep"):
            sec = parser["sweep"]
            if "temperature" in sec:
                kwargs["temperatures"] = _parse_values(sec["temperature"], float)
            if "n_probes" in sec:
                kwargs["n_probes"] = _parse_values(sec["n_probes"], int)
            for key, target in (("gamma2", "gamma2"), ("spacing", "spacing"),
                                ("omega_cutoff", "cutoff"), ("scenario", "scenarios")):
                if key in sec:
                    cast = str if key == "scenario" else float
                    kwargs[target] = _parse_values(sec[key], cast)
        if parser.has_section("output"):
            sec = parser["output"]
            kwargs["out_path"] = sec.get("path", None)
            kwargs["out_format"] = sec.get("format", "csv")
            if "quantities" in sec:
                kwargs["quantities"] = _parse_values(sec["quantities"], str)
        if parser.has_section("quadrature"):
            sec = parser["quadrature"]
            kwargs["quadrature"] = QuadratureConfig(
                rel_tol=sec.getfloat("rel_tol", 1e-9),
                abs_tol=sec.getfloat("abs_tol", 1e-12),
                omega_max_mult=sec.getfloat("omega_max_mult", 20.0),
                max_subdivisions=sec.getint("max_subdivisions", 100_000),
            )
    except ValueError as exc:
        raise ConfigError(f"config value error in {path}: {exc}") from exc
    return ExperimentConfig(**kwargs)


# ---------------------------------------------------------------------------
# sweep machinery


@dataclass
class SweepRecord:
    scenario: str
    n: int
    temperature: float
    gamma2: float
    cutoff: float
    spacing: float
    qfi: float = math.nan
    cfi_x: float = math.nan
    cfi_p: float = math.nan
    min_rel_error: float = math.nan
    log_negativity_halfcut: float = math.nan
    mutual_info_1_rest: float = math.nan
    quad_err_est: float = math.nan
    error_code: str = ""
    wall_time_s: float = math.nan

    def row(self):
        return (self.scenario, self.n, self.temperature, self.gamma2, self.cutoff,
                self.spacing, self.qfi, self.cfi_x, self.cfi_p, self.min_rel_error,
                self.log_negativity_halfcut, self.mutual_info_1_rest,
                self.quad_err_est, self.error_code)


def build_problem(scenario, n, temperature, gamma2, cutoff, spacing,
                  omega0=1.0, mass=1.0, renormalization=True,
                  quadrature=None) -> NessProblem:
    probes = ProbeChain.chain(int(n), omega0=omega0, mass=mass, spacing=spacing)
    bath = BathSpec.for_chain(probes, gamma2=gamma2, cutoff=cutoff,
                              scenario=Scenario.parse(scenario))
    return NessProblem(bath, probes, temperature,
                       quadrature or QuadratureConfig(), renormalization)


def _evaluate_group(config: ExperimentConfig, scenario, n, gamma2, cutoff,
                    spacing, temps):
    """All temperatures of one chain geometry in a single shared-panel solve."""
    start = time.perf_counter()
    records = []
    try:
        problem = build_problem(scenario, n, temps[0], gamma2, cutoff, spacing,
                                config.omega0, config.mass,
                                config.renormalization, config.quadrature)
        solutions = steady_state_family(problem, temps)
    except NessThermoError as exc:
        elapsed = time.perf_counter() - start
        for temp in temps:
            records.append(SweepRecord(scenario, n, temp, gamma2, cutoff, spacing,
                                       error_code=type(exc).__name__,
                                       wall_time_s=elapsed / len(temps)))
        return records
    elapsed = time.perf_counter() - start
    wants = set(config.quantities)
    for temp, sol in zip(temps, solutions):
        rec = SweepRecord(scenario, n, temp, gamma2, cutoff, spacing,
                          quad_err_est=sol.error_estimate,
                          wall_time_s=elapsed / len(temps))
        try:
            if "qfi" in wants:
                rec.qfi = qfi(sol.covariance, sol.temperature_derivative)
                rec.min_rel_error = min_relative_error(temp, rec.qfi)
            if "cfi_x" in wants:
                rec.cfi_x = cfi_gaussian_measurement(
                    sol.covariance, sol.temperature_derivative, Measurement.X)
            if "cfi_p" in wants:
                rec.cfi_p = cfi_gaussian_measurement(
                    sol.covariance, sol.temperature_derivative, Measurement.P)
            if "negativity" in wants:
                rec.log_negativity_halfcut = (
                    log_negativity(sol.covariance, range(n // 2)) if n > 1 else 0.0)
            if "mutual_information" in wants:
                rec.mutual_info_1_rest = (
                    mutual_information(sol.covariance, [0]) if n > 1 else 0.0)
        except NessThermoError as exc:
            rec.error_code = type(exc).__name__
        records.append(rec)
    return records


def run_sweep(config: ExperimentConfig, jobs: int = 1):
    """Evaluate the grid; returns records in deterministic grid order."""
    points = list(itertools.product(config.scenarios, config.n_probes,
                                    config.temperatures, config.gamma2,
                                    config.cutoff, config.spacing))
    # group rows sharing a geometry so each group is one multi-temperature solve
    group_keys = []
    groups = {}
    for idx, (scenario, n, temp, g2, cut, spc) in enumerate(points):
        key = (scenario, n, g2, cut, spc)
        if key not in groups:
            groups[key] = []
            group_keys.append(key)
        groups[key].append((idx, temp))

    def solve_group(key):
        scenario, n, g2, cut, spc = key
        temps = [t for _, t in groups[key]]
        return _evaluate_group(config, scenario, n, g2, cut, spc, temps)

    results: dict[int, SweepRecord] = {}
    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            for key, recs in zip(group_keys, pool.map(solve_group, group_keys)):
                for (idx, _), rec in zip(groups[key], recs):
                    results[idx] = rec
    else:
        for key in group_keys:
            for (idx, _), rec in zip(groups[key], solve_group(key)):
                results[idx] = rec
    return [results[i] for i in range(len(points))]


def format_float(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(records, columns, rows, stream):
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(format_float(v) for v in row) + "\n")


def write_sweep_csv(records, stream):
    write_csv(records, CSV_COLUMNS, (r.row() for r in records), stream)


def write_sweep_json(records, stream):
    payload = {
        "columns": list(CSV_COLUMNS),
        "records": [
            dict(zip(CSV_COLUMNS, rec.row()), wall_time_s=rec.wall_time_s)
            for rec in records
        ],
    }
    json.dump(payload, stream, indent=1, default=float)
    stream.write("\n")


# ---------------------------------------------------------------------------
# scaling fits


def fit_power_law(points):
    """OLS fit of log(value) against log(N); returns (exponent, intercept, R^2)."""
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 3:
        raise DomainError("need at least three points for a power-law fit")
    if any(v <= 0 or n <= 0 for n, v in pts):
        raise DomainError("power-law fit requires positive abscissae and values")
    x = np.log([n for n, _ in pts])
    y = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_squared


def windowed_slope(points, window: int):
    """Sliding-window log-log slopes; exposes slope decay along the curve."""
    if window < 3:
        raise DomainError("window must be at least 3")
    pts = sorted((float(n), float(v)) for n, v in points)
    if len(pts) < window:
        raise DomainError("fewer points than the window size")
    out = []
    for start in range(len(pts) - window + 1):
        chunk = pts[start:start + window]
        slope, _, _ = fit_power_law(chunk)
        out.append((chunk[window // 2][0], slope))
    return out


# ---------------------------------------------------------------------------
# figure data (consumed by the plotting component)


def _fig_temperatures(fast):
    return tuple(np.geomspace(1e-3, 3.0, 6 if fast else 12))


def _figure_config(fast, **overrides):
    base = dict(quantities=ALL_QUANTITIES)
    base.update(overrides)
    return ExperimentConfig(**base)


def _records_with_sqrtn(records):
    rows = []
    for rec in records:
        rows.append(rec.row() + (rec.min_rel_error * math.sqrt(rec.n),))
    return rows


def write_figure_csvs(out_dir, fast=False, jobs=1, quiet=False):
    """Emit the golden CSV set behind each supported figure id."""
    import pathlib

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    temps = _fig_temperatures(fast)
    n_big = 4 if fast else 10

    def emit(name, config):
        records = run_sweep(config, jobs=jobs)
        with open(out / f"{name}.csv", "w") as fh:
            write_sweep_csv(records, fh)
        if not quiet:
            print(f"wrote {out / f'{name}.csv'} ({len(records)} rows)")
        return records

    emit("fig1", _figure_config(
        fast, scenarios=("a", "b"), n_probes=(n_big,), temperatures=temps,
        gamma2=FIG1_GAMMA2))

    fig2_cfg = _figure_config(
        fast, scenarios=("a", "b"),
        n_probes=(1, 3, 5) if fast else (1, 5, 10, 15),
        temperatures=temps)
    records = run_sweep(fig2_cfg, jobs=jobs)
    with open(out / "fig2.csv", "w") as fh:
        write_csv(records, CSV_COLUMNS + ("min_rel_error_sqrtn",),
                  _records_with_sqrtn(records), fh)
    if not quiet:
        print(f"wrote {out / 'fig2.csv'} ({len(records)} rows)")

    n_axis = tuple(range(1, 9 if fast else 31))
    emit("fig3", _figure_config(
        fast, scenarios=("a", "b"), n_probes=n_axis, temperatures=(0.01,)))

    emit("figB_intermediate_T", _figure_config(
        fast, scenarios=("a", "b"),
        n_probes=tuple(range(1, 7 if fast else 21)),
        temperatures=(0.1, 1.0)))

    _write_correlation_figures(out, fast, quiet)
    return [out / f"{fid}.csv" for fid in FIGURE_IDS]


def _profile_rows(problem, scenario, kinds=("xx",)):
    rows = []
    for kind in kinds:
        profile = correlation_profile(
            problem, CorrelationKind.XX if kind == "xx" else CorrelationKind.PP)
        for mode, value in profile:
            rows.append((scenario, problem.probes.n, problem.temperature,
                         problem.bath.gamma2, problem.bath.cutoff,
                         problem.probes.spacing, kind.upper(), 1, mode + 1, value))
    return rows


def _write_correlation_figures(out, fast, quiet):
    n = 4 if fast else 10
    temps = tuple(np.geomspace(1e-3, 10.0, 5 if fast else 12))
    rows = []
    for scenario in ("a", "b"):
        problem = build_problem(scenario, n, temps[0], 1.0, 100.0, 0.1)
        for temp, sol in zip(temps, steady_state_family(problem, temps,
                                                        with_derivative=False)):
            xx = position_block(sol.covariance)
            rows.append((scenario, n, temp, 1.0, 100.0, 0.1, "XX", 1, 1, xx[0, 0]))
            if scenario == "b":
                for other in range(1, n):
                    rows.append((scenario, n, temp, 1.0, 100.0, 0.1, "XX", 1,
                                 other + 1, xx[0, other]))
    with open(out / "figA_corr_T.csv", "w") as fh:
        write_csv(None, PROFILE_COLUMNS, rows, fh)
    if not quiet:
        print(f"wrote {out / 'figA_corr_T.csv'} ({len(rows)} rows)")

    spacings = np.geomspace(0.05, 1.0, 5) if fast else np.geomspace(0.02, 2.0, 10)
    rows = []
    for spacing in spacings:
        problem = build_problem("b", n, 0.01, 1.0, 100.0, float(spacing))
        rows.extend(_profile_rows(problem, "b", kinds=("xx", "pp")))
    with open(out / "figA_corr_r.csv", "w") as fh:
        write_csv(None, PROFILE_COLUMNS, rows, fh)
    if not quiet:
        print(f"wrote {out / 'figA_corr_r.csv'} ({len(rows)} rows)")


# ---------------------------------------------------------------------------
# subcommands


def _open_out(path):
    return open(path, "w") if path else sys.stdout


def _cmd_ness(args):
    problem = build_problem(args.scenario, args.n, args.temperature, args.gamma2,
                            args.cutoff, args.spacing, args.omega0, args.mass,
                            not args.no_renormalization)
    from .gaussian import symplectic_eigenvalues
    from .solver import solve_steady_state

    sol = solve_steady_state(problem)
    payload = {
        "n_modes": problem.probes.n,
        "temperature": problem.temperature,
        "scenario": problem.bath.scenario.value,
        "covariance": sol.covariance.data.tolist(),
        "temperature_derivative": sol.temperature_derivative.tolist(),
        "symplectic_eigenvalues": symplectic_eigenvalues(sol.covariance).tolist(),
        "quad_err_est": sol.error_estimate,
    }
    with _open_out(args.out) as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    return EXIT_OK


def _cmd_sweep(args):
    config = load_config(args.config)
    if args.scenario:
        config = replace(config, scenarios=(args.scenario,))
    if args.no_renormalization:
        config = replace(config, renormalization=False)
    if args.out:
        config = replace(config, out_path=args.out)
    if args.format:
        config = replace(config, out_format=args.format)
    records = run_sweep(config, jobs=args.jobs)
    with _open_out(config.out_path) as fh:
        if config.out_format == "json":
            write_sweep_json(records, fh)
        else:
            write_sweep_csv(records, fh)
    failed = sum(1 for r in records if r.error_code)
    if not args.quiet:
        print(f"{len(records)} grid points, {failed} failed", file=sys.stderr)
    return EXIT_ALL_FAILED if failed == len(records) else EXIT_OK


def _parse_filters(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"bad filter {item!r}; expected key=value")
        key, value = item.split("=", 1)
        out[key] = value
    return out


def _cmd_fit(args):
    filters = _parse_filters(args.filter)
    points = []
    import csv as csv_mod

    with open(args.input) as fh:
        for row in csv_mod.DictReader(fh):
            keep = True
            for key, want in filters.items():
                have = row.get(key, "")
                try:
                    keep = keep and math.isclose(float(have), float(want))
                except ValueError:
                    keep = keep and have == want
            if keep and row.get(args.y, "") not in ("", "nan"):
                points.append((float(row[args.x]), float(row[args.y])))
    exponent, intercept, r2 = fit_power_law(points)
    print(f"exponent {format_float(exponent)}")
    print(f"intercept {format_float(intercept)}")
    print(f"r_squared {format_float(r2)}")
    if args.window:
        for center, slope in windowed_slope(points, args.window):
            print(f"window_center {format_float(center)} "
                  f"slope {format_float(slope)}")
    return EXIT_OK


def _cmd_profile(args):
    problem = build_problem(args.scenario, args.n, args.temperature, args.gamma2,
                            args.cutoff, args.spacing, args.omega0, args.mass,
                            not args.no_renormalization)
    rows = _profile_rows(problem, args.scenario, kinds=(args.kind,))
    with _open_out(args.out) as fh:
        write_csv(None, PROFILE_COLUMNS, rows, fh)
    return EXIT_OK


def _cmd_oracle(args):
    problem = build_problem(args.scenario, args.n, args.temperature, args.gamma2,
                            args.cutoff, args.spacing, args.omega0, args.mass,
                            not args.no_renormalization)
    from .solver import steady_state_covariance

    discrete = DiscreteBath.from_spectral_density(
        problem.bath, args.modes, args.omega_max_mult * args.cutoff)
    t_final = args.t_final
    window = args.window
    if t_final + window >= discrete.recurrence_time:
        print(f"recurrence time is {discrete.recurrence_time:.3f}; "
              "shrink t_final/window or raise --modes", file=sys.stderr)
        return EXIT_CONFIG
    reference = steady_state_covariance(problem).data
    averaged = evolve_covariance(problem.probes, problem.bath, discrete,
                                 problem.temperature, t_final, window,
                                 renormalization=not args.no_renormalization).data
    scale = np.sqrt(np.outer(np.diag(reference), np.diag(reference)))
    rel = np.abs(averaged - reference) / np.maximum(scale, 1e-300)
    print(f"modes {discrete.n_modes}  recurrence {discrete.recurrence_time:.3f}")
    print(f"max scaled deviation {rel.max():.3e}")
    for label, mat in (("solver", reference), ("oracle", averaged)):
        print(label, " ".join(format_float(v) for v in np.diag(mat)))
    return EXIT_OK


def _cmd_figures(args):
    write_figure_csvs(args.out_dir, fast=args.fast, jobs=args.jobs,
                      quiet=args.quiet)
    return EXIT_OK


def _add_point_arguments(sub, n_default=2):
    sub.add_argument("--n", type=int, default=n_default)
    sub.add_argument("--temperature", type=float, default=0.01)
    sub.add_argument("--gamma2", type=float, default=1.0)
    sub.add_argument("--cutoff", type=float, default=100.0)
    sub.add_argument("--spacing", type=float, default=0.1)
    sub.add_argument("--omega0", type=float, default=1.0)
    sub.add_argument("--mass", type=float, default=1.0)
    sub.add_argument("--scenario", choices=("a", "b"), default="b")
    sub.add_argument("--no-renormalization", action="store_true")
    sub.add_argument("--out", default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nessthermo",
        description="Steady-state thermometry of harmonic probe chains",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    ness = subs.add_parser("ness", help="solve one steady state and dump it")
    _add_point_arguments(ness)
    ness.set_defaults(func=_cmd_ness)

    sweep = subs.add_parser("sweep", help="run a configured parameter sweep")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--format", choices=("csv", "json"), default=None)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--scenario", choices=("a", "b"), default=None)
    sweep.add_argument("--no-renormalization", action="store_true")
    sweep.add_argument("--quiet", action="store_true")
    sweep.set_defaults(func=_cmd_sweep)

    fit = subs.add_parser("fit", help="power-law fit of a CSV column")
    fit.add_argument("--input", required=True)
    fit.add_argument("--x", default="N")
    fit.add_argument("--y", default="qfi")
    fit.add_argument("--filter", action="append", metavar="KEY=VALUE")
    fit.add_argument("--window", type=int, default=None)
    fit.set_defaults(func=_cmd_fit)

    profile = subs.add_parser("profile", help="inter-probe correlation profile")
    _add_point_arguments(profile, n_default=10)
    profile.add_argument("--kind", choices=("xx", "pp"), default="xx")
    profile.set_defaults(func=_cmd_profile)

    oracle = subs.add_parser("oracle", help="discrete-bath cross-check")
    _add_point_arguments(oracle)
    oracle.add_argument("--modes", type=int, default=4000)
    oracle.add_argument("--omega-max-mult", type=float, default=10.0)
    oracle.add_argument("--t-final", type=float, default=9.0)
    oracle.add_argument("--window", type=float, default=3.0)
    oracle.set_defaults(func=_cmd_oracle)

    figures = subs.add_parser("figures", help="emit the figure-ready CSV set")
    figures.add_argument("--out-dir", required=True)
    figures.add_argument("--fast", action="store_true")
    figures.add_argument("--jobs", type=int, default=1)
    figures.add_argument("--quiet", action="store_true")
    figures.set_defaults(func=_cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NessThermoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ALL_FAILED


if __name__ == "__main__":
    sys.exit(main())
