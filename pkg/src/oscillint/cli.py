"""Command line front end: JSON configuration in, verdict and reports out.

Subcommands
    analyze   run the non-oscillation check, then the oscillation check,
              then cross-validate against a simulated ensemble
    oracle    simulation only
    riccati   solve the scalar quadratic problem matched to the system
    reduce    print the first-order system equivalent to an equation input
    wong      variational oscillation check for undamped equations
    compare   evaluate the comparison certificate between two scalar problems
    sweep     dump the shift-parameter feasibility landscape

Exit codes: 10 oscillatory, 20 non-oscillatory, 30 inconclusive, 0 ran
without a verdict (riccati/reduce/compare/sweep), 1 error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .criteria import (
    INCONCLUSIVE,
    NON_OSCILLATORY,
    OSCILLATORY,
    SIGN_SLACK,
    DEFAULT_LAMBDA_POINTS,
    DEFAULT_SCAN_POINTS,
    IntervalWitness,
    Verdict,
    check_nonoscillation,
    check_oscillation,
    check_undamped_equation,
    default_lambda_grid,
    lambda_feasibility,
)
from .expr import Expr, ExprError, compile_scalar, parse_text, print_expr
from .numerics import Grid, IntegrationError, Tolerances
from .oracle import (
    NONOSCILLATORY_OBSERVED,
    OSCILLATORY_OBSERVED,
    EmpiricalVerdict,
    default_ensemble,
    empirical_classification,
    export_trace,
    simulate_ensemble,
)
from .riccati import (
    CertificateReport,
    ComparisonInstance,
    ValidationReport,
    comparison_certificate,
    comparison_validate,
    solve_riccati,
)
from .transform import (
    DEFAULT_GRID_NODES,
    RiccatiProblem,
    SecondOrderSpec,
    SystemSpec,
    TransformError,
    alpha_lambda,
    reduce_equation,
    riccati_of_system,
)

SUBCOMMANDS = ("analyze", "oracle", "riccati", "reduce", "wong", "compare", "sweep")

EXIT_RAN = 0
EXIT_ERROR = 1
EXIT_OSCILLATORY = 10
EXIT_NON_OSCILLATORY = 20
EXIT_INCONCLUSIVE = 30

_OUTCOME_EXIT = {
    OSCILLATORY: EXIT_OSCILLATORY,
    NON_OSCILLATORY: EXIT_NON_OSCILLATORY,
    INCONCLUSIVE: EXIT_INCONCLUSIVE,
}
_OBSERVED_EXIT = {
    OSCILLATORY_OBSERVED: EXIT_OSCILLATORY,
    NONOSCILLATORY_OBSERVED: EXIT_NON_OSCILLATORY,
}


class ConfigError(ValueError):
    """Bad configuration; the message names the offending field path."""


# ---------------------------------------------------------------------------
# configuration loading


_SYSTEM_FIELDS = ("p", "q", "r", "s", "f", "g")
_EQUATION_FIELDS = ("a", "b", "c", "d")
_EQUATION_DEFAULTS = {"a": "1", "b": "0", "c": "0", "d": "0"}


def _ensure_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object")
    return value


def _reject_unknown(section: dict, allowed, path: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{path}: unknown field '{key}'")


def _number(value, path: str, integral: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number")
    if integral:
        if float(value) != int(value):
            raise ConfigError(f"{path}: expected an integer")
        return int(value)
    return float(value)


def _expression(value, path: str) -> Expr:
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected an expression string")
    try:
        return parse_text(value)
    except ExprError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _number_list(value, path: str) -> tuple:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a non-empty array of numbers")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


@dataclass(frozen=True, eq=False)
class ProblemConfig:
    """Validated run inputs with every default materialized.

    `effective` is the JSON-ready echo of the whole configuration; feeding
    it back through load_config reproduces this object and hence the report.
    """

    system: SystemSpec | None
    equation: SecondOrderSpec | None
    t0: float
    horizon: float
    grid_nodes: int
    tolerances: Tolerances
    lambda_values: tuple | None
    lambda_points: int
    scan_values: tuple | None
    scan_points: int
    periodic: float | None
    oracle_seed: int
    oracle_size: int
    final_window_fraction: float
    riccati_y0: float
    riccati_lam: float
    compare: ComparisonInstance | None
    compare_squared: bool
    effective: dict = field(repr=False)

    def working_system(self) -> SystemSpec:
        if self.system is not None:
            return self.system
        return reduce_equation(self.equation)

    def span(self) -> tuple:
        return (self.t0, self.horizon)


def _parse_compare(section: dict, path: str) -> ComparisonInstance:
    _reject_unknown(section, ("problem1", "problem2", "span", "y2_start",
                              "gamma", "eta_offset"), path)
    for key in ("problem1", "problem2", "span", "y2_start"):
        if key not in section:
            raise ConfigError(f"{path}.{key}: required")
    span = section["span"]
    if not isinstance(span, list) or len(span) != 2:
        raise ConfigError(f"{path}.span: expected [lo, hi]")
    lo = _number(span[0], f"{path}.span[0]")
    hi = _number(span[1], f"{path}.span[1]")

    def scalar_problem(block, block_path):
        block = _ensure_mapping(block, block_path)
        _reject_unknown(block, ("f", "g", "h"), block_path)
        parts = []
        for key in ("f", "g", "h"):
            if key not in block:
                raise ConfigError(f"{block_path}.{key}: required")
            parts.append(compile_scalar(_expression(block[key],
                                                    f"{block_path}.{key}")))
        return RiccatiProblem(parts[0], parts[1], parts[2], (lo, hi))

    prob1 = scalar_problem(section["problem1"], f"{path}.problem1")
    prob2 = scalar_problem(section["problem2"], f"{path}.problem2")
    y2_start = _number(section["y2_start"], f"{path}.y2_start")
    gamma = None
    if section.get("gamma") is not None:
        gamma = _number(section["gamma"], f"{path}.gamma")
    eta_offset = _number(section.get("eta_offset", 1.0), f"{path}.eta_offset")
    try:
        return ComparisonInstance(prob1, prob2, y2_start, (lo, hi),
                                  gamma=gamma, eta_offset=eta_offset)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def config_from_dict(raw: dict) -> ProblemConfig:
    raw = _ensure_mapping(raw, "config")
    _reject_unknown(raw, ("system", "equation", "t0", "horizon", "grid_nodes",
                          "tolerances", "lambda", "scan", "periodic", "oracle",
                          "riccati", "compare"), "config")

    has_system = "system" in raw
    has_equation = "equation" in raw
    if has_system == has_equation:
        raise ConfigError("config: exactly one of 'system' and 'equation' "
                          "must be present")

    t0 = _number(raw.get("t0", 0.0), "t0")
    if "horizon" not in raw:
        raise ConfigError("horizon: required")
    horizon = _number(raw["horizon"], "horizon")
    if not horizon > t0:
        raise ConfigError("horizon: must exceed t0")

    system = None
    equation = None
    if has_system:
        section = _ensure_mapping(raw["system"], "system")
        _reject_unknown(section, _SYSTEM_FIELDS, "system")
        texts = {k: section.get(k, "0") for k in _SYSTEM_FIELDS}
        parsed = {k: _expression(v, f"system.{k}") for k, v in texts.items()}
        system = SystemSpec(parsed["p"], parsed["q"], parsed["r"], parsed["s"],
                            parsed["f"], parsed["g"], t0)
        problem_echo = ("system", texts)
    else:
        section = _ensure_mapping(raw["equation"], "equation")
        _reject_unknown(section, _EQUATION_FIELDS, "equation")
        texts = {k: section.get(k, _EQUATION_DEFAULTS[k])
                 for k in _EQUATION_FIELDS}
        parsed = {k: _expression(v, f"equation.{k}") for k, v in texts.items()}
        equation = SecondOrderSpec(parsed["a"], parsed["b"], parsed["c"],
                                   parsed["d"], t0)
        problem_echo = ("equation", texts)

    grid_nodes = _number(raw.get("grid_nodes", DEFAULT_GRID_NODES),
                         "grid_nodes", integral=True)
    if grid_nodes < 64:
        raise ConfigError("grid_nodes: must be at least 64")

    tol_section = _ensure_mapping(raw.get("tolerances", {}), "tolerances")
    _reject_unknown(tol_section, ("rel_tol", "abs_tol", "escape_magnitude",
                                  "root_tol"), "tolerances")
    tol_kwargs = {k: _number(v, f"tolerances.{k}")
                  for k, v in tol_section.items()}
    try:
        tolerances = Tolerances(**tol_kwargs)
    except ValueError as exc:
        raise ConfigError(f"tolerances: {exc}") from None

    lam_section = _ensure_mapping(raw.get("lambda", {}), "lambda")
    _reject_unknown(lam_section, ("values", "points"), "lambda")
    lambda_values = None
    if lam_section.get("values") is not None:
        lambda_values = _number_list(lam_section["values"], "lambda.values")
    lambda_points = _number(lam_section.get("points", DEFAULT_LAMBDA_POINTS),
                            "lambda.points", integral=True)
    if lambda_points < 2:
        raise ConfigError("lambda.points: must be at least 2")

    scan_section = _ensure_mapping(raw.get("scan", {}), "scan")
    _reject_unknown(scan_section, ("values", "points"), "scan")
    scan_values = None
    if scan_section.get("values") is not None:
        scan_values = _number_list(scan_section["values"], "scan.values")
    scan_points = _number(scan_section.get("points", DEFAULT_SCAN_POINTS),
                          "scan.points", integral=True)
    if scan_points < 1:
        raise ConfigError("scan.points: must be at least 1")

    periodic = None
    if raw.get("periodic") is not None:
        periodic = _number(raw["periodic"], "periodic")
        if not periodic > 0:
            raise ConfigError("periodic: must be positive")

    oracle_section = _ensure_mapping(raw.get("oracle", {}), "oracle")
    _reject_unknown(oracle_section, ("seed", "size", "final_window_fraction"),
                    "oracle")
    oracle_seed = _number(oracle_section.get("seed", 1729), "oracle.seed",
                          integral=True)
    oracle_size = _number(oracle_section.get("size", 16), "oracle.size",
                          integral=True)
    if oracle_size < 2:
        raise ConfigError("oracle.size: must be at least 2")
    window_fraction = _number(oracle_section.get("final_window_fraction", 0.5),
                              "oracle.final_window_fraction")
    if not 0.0 < window_fraction <= 1.0:
        raise ConfigError("oracle.final_window_fraction: must lie in (0, 1]")

    riccati_section = _ensure_mapping(raw.get("riccati", {}), "riccati")
    _reject_unknown(riccati_section, ("y0", "lam"), "riccati")
    riccati_y0 = _number(riccati_section.get("y0", 0.0), "riccati.y0")
    riccati_lam = _number(riccati_section.get("lam", 0.0), "riccati.lam")

    compare = None
    compare_echo = None
    if raw.get("compare") is not None:
        compare_echo = raw["compare"]
        compare = _parse_compare(_ensure_mapping(compare_echo, "compare"),
                                 "compare")

    effective = {
        problem_echo[0]: problem_echo[1],
        "t0": t0,
        "horizon": horizon,
        "grid_nodes": grid_nodes,
        "tolerances": {
            "rel_tol": tolerances.rel_tol,
            "abs_tol": tolerances.abs_tol,
            "escape_magnitude": tolerances.escape_magnitude,
            "root_tol": tolerances.root_tol,
        },
        "lambda": {"values": list(lambda_values) if lambda_values else None,
                   "points": lambda_points},
        "scan": {"values": list(scan_values) if scan_values else None,
                 "points": scan_points},
        "periodic": periodic,
        "oracle": {"seed": oracle_seed, "size": oracle_size,
                   "final_window_fraction": window_fraction},
        "riccati": {"y0": riccati_y0, "lam": riccati_lam},
    }
    if compare_echo is not None:
        effective["compare"] = compare_echo

    return ProblemConfig(
        system=system, equation=equation, t0=t0, horizon=horizon,
        grid_nodes=grid_nodes, tolerances=tolerances,
        lambda_values=lambda_values, lambda_points=lambda_points,
        scan_values=scan_values, scan_points=scan_points, periodic=periodic,
        oracle_seed=oracle_seed, oracle_size=oracle_size,
        final_window_fraction=window_fraction, riccati_y0=riccati_y0,
        riccati_lam=riccati_lam, compare=compare, compare_squared=False,
        effective=effective,
    )


def load_config(path) -> ProblemConfig:
    """Read, parse, and validate a JSON configuration file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from None
    return config_from_dict(raw)


# ---------------------------------------------------------------------------
# reports


def to_jsonable(obj):
    """Flatten result objects into JSON-ready primitives.

    Non-finite floats become the strings "inf"/"-inf"/"nan" since JSON has
    no spelling for them.
    """
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        # cast: np.float64 subclasses float but repr()s differently
        if math.isfinite(obj):
            return float(obj)
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return to_jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Verdict):
        return {"outcome": obj.outcome, "horizon": to_jsonable(obj.horizon),
                "notes": obj.notes, "evidence": to_jsonable(obj.evidence)}
    if isinstance(obj, IntervalWitness):
        return {"s1": obj.s1, "t1": obj.t1, "s2": obj.s2, "t2": obj.t2,
                "lam": obj.lam, "sign_margins": to_jsonable(obj.sign_margins),
                "osc_margins": to_jsonable(obj.osc_margins)}
    if isinstance(obj, EmpiricalVerdict):
        return {"outcome": obj.outcome,
                "window": to_jsonable(obj.window),
                "zero_counts": to_jsonable(obj.zero_counts),
                "last_zero_per_member": to_jsonable(obj.last_zero_per_member),
                "trivial_members": to_jsonable(obj.trivial_members)}
    if isinstance(obj, CertificateReport):
        return {"holds": obj.holds,
                "min_value": to_jsonable(obj.min_value),
                "final_value": to_jsonable(float(obj.phi_trace[-1])),
                "slack": obj.slack,
                "escape_time": to_jsonable(obj.escape_time),
                "squared_variant": obj.squared_variant,
                "grid_nodes": len(obj.grid)}
    if isinstance(obj, ValidationReport):
        return {"passed": obj.passed, "y1_exists": obj.y1_exists,
                "min_difference": to_jsonable(obj.min_difference),
                "eta1_residual_min": to_jsonable(obj.eta1_residual_min),
                "eta2_residual_min": to_jsonable(obj.eta2_residual_min),
                "span_checked": to_jsonable(obj.span_checked),
                "y1_end_time": to_jsonable(obj.y1.end_time),
                "y2_end_time": to_jsonable(obj.y2.end_time)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _scalar_text(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, dict):
        return "{}"
    if isinstance(value, list):
        return "[]"
    return str(value)


def _dump_lines(obj, indent: int) -> list:
    pad = "  " * indent
    out = []
    if isinstance(obj, dict):
        for key, value in obj.items():
            if isinstance(value, (dict, list)) and value:
                out.append(f"{pad}{key}:")
                out.extend(_dump_lines(value, indent + 1))
            else:
                out.append(f"{pad}{key}: {_scalar_text(value)}".rstrip())
    else:
        for value in obj:
            if isinstance(value, (dict, list)) and value:
                out.append(f"{pad}-")
                out.extend(_dump_lines(value, indent + 1))
            else:
                out.append(f"{pad}- {_scalar_text(value)}")
    return out


@dataclass(eq=False)
class Report:
    """Everything one run produced; text and JSON renderings carry the
    same facts because both are generated from to_dict()."""

    subcommand: str
    verdict: Verdict | None = None
    empirical: EmpiricalVerdict | None = None
    certificate: CertificateReport | None = None
    validation: ValidationReport | None = None
    details: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {"subcommand": self.subcommand}
        if self.verdict is not None:
            doc["verdict"] = to_jsonable(self.verdict)
        if self.empirical is not None:
            doc["empirical"] = to_jsonable(self.empirical)
        if self.certificate is not None:
            doc["certificate"] = to_jsonable(self.certificate)
        if self.validation is not None:
            doc["validation"] = to_jsonable(self.validation)
        if self.details:
            doc["details"] = to_jsonable(self.details)
        doc["provenance"] = to_jsonable(self.provenance)
        return doc

    def render_text(self) -> str:
        lines = [f"oscillint {__version__} - {self.subcommand}"]
        lines.extend(_dump_lines(self.to_dict(), 0))
        return "\n".join(lines) + "\n"

    def render_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def exit_code(self) -> int:
        if self.verdict is not None:
            return _OUTCOME_EXIT[self.verdict.outcome]
        if self.empirical is not None:
            return _OBSERVED_EXIT.get(self.empirical.outcome,
                                      EXIT_INCONCLUSIVE)
        return EXIT_RAN


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def write_report(report: Report, out_path) -> tuple:
    """Write the text report and its JSON sibling atomically."""
    out_path = Path(out_path)
    json_path = out_path.with_suffix(".json")
    if json_path == out_path:
        json_path = out_path.with_name(out_path.name + ".json")
    _atomic_write(out_path, report.render_text())
    _atomic_write(json_path, report.render_json())
    return out_path, json_path


# ---------------------------------------------------------------------------
# subcommands


def _provenance(config: ProblemConfig) -> dict:
    return {"tool_version": __version__, "config": config.effective}


def _simulate(config: ProblemConfig, sys_spec: SystemSpec, dump_traces):
    ens = default_ensemble(config.span(), seed=config.oracle_seed,
                           size=config.oracle_size)
    trajectories = simulate_ensemble(sys_spec, ens, config.tolerances)
    verdict = empirical_classification(trajectories,
                                       config.final_window_fraction)
    names = []
    if dump_traces is not None:
        directory = Path(dump_traces)
        directory.mkdir(parents=True, exist_ok=True)
        for idx, traj in enumerate(trajectories):
            name = f"member_{idx:02d}.csv"
            export_trace(traj, directory / name)
            names.append(name)
    return verdict, names


def _validate_problem(config: ProblemConfig) -> None:
    probe = Grid.uniform(config.t0, config.horizon, 513)
    if config.equation is not None:
        config.equation.validate_on(probe)
    if config.system is not None:
        config.system.validate_on(probe)


def _run_analyze(config: ProblemConfig, dump_traces) -> Report:
    sys_spec = config.working_system()
    horizon = config.span()
    non = check_nonoscillation(sys_spec, horizon, config.grid_nodes,
                               config.tolerances)
    details = {}
    if non.outcome == NON_OSCILLATORY:
        verdict = non
    else:
        osc = check_oscillation(sys_spec, horizon, scan=config.scan_values,
                                lambda_grid=config.lambda_values,
                                grid_nodes=config.grid_nodes,
                                periodic=config.periodic,
                                tol=config.tolerances)
        if osc.outcome == OSCILLATORY:
            verdict = osc
            details["nonoscillation_notes"] = non.notes
        else:
            verdict = Verdict(
                INCONCLUSIVE, horizon,
                notes=f"neither direction certified; non-oscillation: "
                      f"{non.notes}; oscillation: {osc.notes}")

    empirical, names = _simulate(config, sys_spec, dump_traces)
    if names:
        details["trace_files"] = names
    agrees = None
    if verdict.outcome == OSCILLATORY:
        agrees = empirical.outcome != NONOSCILLATORY_OBSERVED
    elif verdict.outcome == NON_OSCILLATORY:
        agrees = empirical.outcome != OSCILLATORY_OBSERVED
    if agrees is not None:
        details["oracle_agrees"] = agrees
    return Report("analyze", verdict=verdict, empirical=empirical,
                  details=details, provenance=_provenance(config))


def _run_oracle(config: ProblemConfig, dump_traces) -> Report:
    empirical, names = _simulate(config, config.working_system(), dump_traces)
    details = {"trace_files": names} if names else {}
    return Report("oracle", empirical=empirical, details=details,
                  provenance=_provenance(config))


def _run_riccati(config: ProblemConfig) -> Report:
    sys_spec = config.working_system()
    if sys_spec.is_forced():
        raise ConfigError(
            "riccati: the scalar correspondence needs an unforced system "
            "(f = 0, g = 0); use 'compare' for forced scalar problems")
    prob = riccati_of_system(sys_spec, span=config.span(),
                             grid_nodes=config.grid_nodes)
    sol = solve_riccati(prob, config.riccati_y0, config.tolerances)
    details = {
        "y0": config.riccati_y0,
        "end_time": sol.end_time,
        "escape_time": sol.escape_time,
        "blew_up": sol.escaped(),
        "final_value": float(sol.trajectory.states[-1, 0]),
        "steps": len(sol.trajectory.grid),
    }
    return Report("riccati", details=details, provenance=_provenance(config))


def _run_reduce(config: ProblemConfig) -> Report:
    if config.equation is None:
        raise ConfigError("reduce: an 'equation' input is required")
    sys_spec = reduce_equation(config.equation)
    details = {"system": {name: print_expr(coef) for name, coef
                          in sys_spec.coefficients().items()}}
    return Report("reduce", details=details, provenance=_provenance(config))


def _run_wong(config: ProblemConfig) -> Report:
    if config.equation is None:
        raise ConfigError("wong: an 'equation' input is required")
    verdict = check_undamped_equation(config.equation, config.span(),
                                      scan=config.scan_values,
                                      grid_nodes=config.grid_nodes)
    return Report("wong", verdict=verdict, provenance=_provenance(config))


def _run_compare(config: ProblemConfig, squared_variant: bool) -> Report:
    if config.compare is None:
        raise ConfigError("compare: a 'compare' section is required")
    cert = comparison_certificate(config.compare,
                                  squared_variant=squared_variant,
                                  grid_nodes=config.grid_nodes,
                                  tol=config.tolerances)
    val = comparison_validate(config.compare, tol=config.tolerances)
    details = {"agreement": cert.holds == val.passed}
    return Report("compare", certificate=cert, validation=val,
                  details=details, provenance=_provenance(config))


def _run_sweep(config: ProblemConfig) -> Report:
    sys_spec = config.working_system()
    grid = Grid.uniform(config.t0, config.horizon, config.grid_nodes)
    base = alpha_lambda(sys_spec, 0.0, grid)
    interval = lambda_feasibility(sys_spec, grid, base)
    from .expr import sample
    r_vals = sample(sys_spec.r, grid.nodes)
    g_vals = sample(sys_spec.g, grid.nodes)
    lams = (list(config.lambda_values) if config.lambda_values is not None
            else default_lambda_grid(sys_spec, grid, base,
                                     config.lambda_points))
    rows = []
    for lam in lams:
        alpha = base.growth * lam + base.alpha
        margin_alpha = float(np.min(alpha))
        margin_coupling = float(np.min(r_vals * alpha + g_vals))
        rows.append({"lam": lam, "alpha_margin": margin_alpha,
                     "coupling_margin": margin_coupling,
                     "feasible": bool(min(margin_alpha, margin_coupling)
                                      >= -SIGN_SLACK and lam >= 0.0)})
    details = {"feasible_interval": interval, "rows": rows}
    return Report("sweep", details=details, provenance=_provenance(config))


def run(subcommand: str, config: ProblemConfig, dump_traces=None,
        squared_variant: bool = False) -> Report:
    """Dispatch one subcommand on a validated configuration."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand '{subcommand}'")
    _validate_problem(config)
    if subcommand == "analyze":
        return _run_analyze(config, dump_traces)
    if subcommand == "oracle":
        return _run_oracle(config, dump_traces)
    if subcommand == "riccati":
        return _run_riccati(config)
    if subcommand == "reduce":
        return _run_reduce(config)
    if subcommand == "wong":
        return _run_wong(config)
    if subcommand == "compare":
        return _run_compare(config, squared_variant)
    return _run_sweep(config)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscillint",
        description="Oscillation and non-oscillation evidence for forced "
                    "2x2 linear first-order systems.")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, metavar="FILE",
                        help="JSON problem configuration")
    parser.add_argument("--horizon", type=float, metavar="T",
                        help="override the configured horizon")
    parser.add_argument("--periodic", type=float, metavar="P",
                        help="treat coefficients as P-periodic")
    parser.add_argument("--dump-traces", metavar="DIR",
                        help="write one CSV per ensemble member")
    parser.add_argument("--out", metavar="FILE",
                        help="write the text report here plus a .json sibling")
    parser.add_argument("--squared-variant", action="store_true",
                        help="square the quadratic coefficient gap in the "
                             "comparison certificate")
    parser.add_argument("--version", action="version",
                        version=f"oscillint {__version__}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config: invalid JSON at line {exc.lineno} column "
                f"{exc.colno}: {exc.msg}") from None
        if args.horizon is not None:
            raw = dict(raw) if isinstance(raw, dict) else raw
            raw["horizon"] = args.horizon
        if args.periodic is not None:
            raw["periodic"] = args.periodic
        config = config_from_dict(raw)
        report = run(args.subcommand, config, dump_traces=args.dump_traces,
                     squared_variant=args.squared_variant)
    except OSError as exc:
        print(f"oscillint: error: cannot read {args.config}: {exc}",
              file=sys.stderr)
        return EXIT_ERROR
    except (ConfigError, ExprError, TransformError, IntegrationError,
            ValueError) as exc:
        print(f"oscillint: error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    output = report.render_text()
    sys.stdout.write(output)
    if args.out is not None:
        write_report(report, args.out)
    return report.exit_code()


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
