"""Command-line front end: config ingestion, run orchestration, emission.

One JSON config drives a run; flags only select the mode, the config path
and the output directory.  All numeric report output is written with fixed
17-significant-digit formatting so identical configs produce byte-identical
artifacts.

Exit codes: 0 success, 1 input error, 2 certification verdict violated
(check mode), 3 verification tolerance exceeded (verify mode).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _json
from .errors import ConfigError, ThermoevoError
from .evolution import (
    BACKWARD_EULER,
    TRAPEZOIDAL,
    EvolutionProblem,
    causality_test,
    solution_bound_check,
    solve,
)
from .forcing import assemble_forcing, time_grid
from .models import (
    ModelFamily,
    ModelSpec,
    assemble_material_law,
    canonical_spec,
    pattern_table,
)
from .oracle import compare, spectral_solve
from .rational import RationalMatrixFunction
from .spatial import Grid1D, build_operators
from .wellposed import certify_wellposedness

__all__ = ["RunConfig", "run", "main"]

MODES = ("check", "simulate", "verify", "patterns")

DEFAULT_TOLERANCES = {
    "solver_vs_oracle": 1e-2,
    "causality_leakage": 1e-6,
    "bound_slack": 0.05,
}

_TOP_KEYS = {"model", "grid", "time", "forcing", "output", "tolerances"}
_MODEL_KEYS = {"family", "coefficients"}
_GRID_KEYS = {"L", "n_cells"}
_TIME_KEYS = {"t_max", "dt", "rho", "scheme"}
_FORCING_KEYS = {"kind", "center", "width", "delay", "block", "spatial_profile"}

_SECTIONS_BY_MODE = {
    "check": {"model"},
    "patterns": set(),
    "simulate": {"model", "grid", "time", "forcing"},
    "verify": {"model", "grid", "time", "forcing"},
}


def _check_keys(payload: dict, allowed: set, context: str) -> None:
    if not isinstance(payload, dict):
        raise ConfigError(f"section '{context}' must be an object")
    unknown = set(payload) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in '{context}'")


def _finite(value, context: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{context}' must be a number") from None
    if not np.isfinite(x):
        raise ConfigError(f"'{context}' must be finite")
    return x


def _parse_coefficient(name, value):
    if isinstance(value, dict):
        _check_keys(value, {"num", "den"}, f"model.coefficients.{name}")
        return RationalMatrixFunction(
            tuple(np.asarray(m, dtype=float) if np.asarray(m).ndim == 2 else
                  np.asarray([[m]], dtype=float) for m in value["num"]),
            np.asarray(value["den"], dtype=float),
        )
    if isinstance(value, list):
        arr = np.asarray(value, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ConfigError(f"coefficient '{name}' has non-finite entries")
        return arr
    return _finite(value, f"model.coefficients.{name}")


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated run configuration."""

    mode: str
    payload: dict
    spec: ModelSpec = None
    grid: Grid1D = None
    time: dict = None
    forcing: dict = None
    output: Path = None
    tolerances: dict = None
    all_families: bool = False

    @classmethod
    def from_dict(cls, payload: dict, mode: str, out_dir=None,
                  all_families: bool = False) -> "RunConfig":
        if mode not in MODES:
            raise ConfigError(f"unknown mode '{mode}'")
        _check_keys(payload, _TOP_KEYS, "config")
        needed = _SECTIONS_BY_MODE[mode]
        if mode == "patterns" and not all_families:
            needed = {"model"}
        missing = needed - set(payload)
        if missing:
            raise ConfigError(f"mode '{mode}' requires sections {sorted(missing)}")

        spec = None
        if "model" in payload:
            _check_keys(payload["model"], _MODEL_KEYS, "model")
            if _MODEL_KEYS - set(payload["model"]):
                raise ConfigError("'model' needs both 'family' and 'coefficients'")
            try:
                family = ModelFamily(payload["model"]["family"])
            except ValueError:
                raise ConfigError(
                    f"unknown family '{payload['model']['family']}'"
                ) from None
            coeffs = {
                name: _parse_coefficient(name, value)
                for name, value in payload["model"]["coefficients"].items()
            }
            spec = ModelSpec(family, coeffs)

        grid = None
        if "grid" in payload:
            _check_keys(payload["grid"], _GRID_KEYS, "grid")
            if _GRID_KEYS - set(payload["grid"]):
                raise ConfigError("'grid' needs 'L' and 'n_cells'")
            grid = Grid1D(_finite(payload["grid"]["L"], "grid.L"),
                          int(payload["grid"]["n_cells"]))

        time_section = None
        if "time" in payload:
            _check_keys(payload["time"], _TIME_KEYS, "time")
            if _TIME_KEYS - set(payload["time"]):
                raise ConfigError("'time' needs 't_max', 'dt', 'rho', 'scheme'")
            scheme = payload["time"]["scheme"]
            if scheme not in (BACKWARD_EULER, TRAPEZOIDAL):
                raise ConfigError(f"unknown scheme '{scheme}'")
            time_section = {
                "t_max": _finite(payload["time"]["t_max"], "time.t_max"),
                "dt": _finite(payload["time"]["dt"], "time.dt"),
                "rho": _finite(payload["time"]["rho"], "time.rho"),
                "scheme": scheme,
            }

        forcing = None
        if "forcing" in payload:
            _check_keys(payload["forcing"], _FORCING_KEYS, "forcing")
            forcing = dict(payload["forcing"])
            for key in ("center", "width", "delay"):
                if key in forcing:
                    forcing[key] = _finite(forcing[key], f"forcing.{key}")
            for key in ("kind", "block", "spatial_profile"):
                if key not in forcing:
                    raise ConfigError(f"'forcing' needs '{key}'")

        tolerances = dict(DEFAULT_TOLERANCES)
        if "tolerances" in payload:
            _check_keys(payload["tolerances"], set(DEFAULT_TOLERANCES), "tolerances")
            for key, value in payload["tolerances"].items():
                tolerances[key] = _finite(value, f"tolerances.{key}")

        output = out_dir or payload.get("output")
        return cls(
            mode=mode,
            payload=payload,
            spec=spec,
            grid=grid,
            time=time_section,
            forcing=forcing,
            output=Path(output) if output else None,
            tolerances=tolerances,
            all_families=all_families,
        )


def _emit(path: Path, text: str, written: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    written.append(path)


def _build_problem(config: RunConfig):
    law = assemble_material_law(config.spec)
    op = build_operators(config.grid)
    t = time_grid(config.time["t_max"], config.time["dt"])
    forcing = assemble_forcing(
        op, t, config.time["rho"],
        config.forcing["kind"], config.forcing["block"],
        config.forcing["spatial_profile"],
        center=config.forcing.get("center"),
        width=config.forcing.get("width"),
        delay=config.forcing.get("delay"),
    )
    return law, EvolutionProblem(law, op, forcing, config.time["scheme"])


def run(config: RunConfig, stream=None) -> int:
    """Execute one run; returns the process exit status."""
    stream = stream or sys.stdout
    written = []

    if config.mode == "patterns":
        if config.all_families:
            tables = []
            for family in ModelFamily:
                if family is ModelFamily.CUSTOM:
                    continue
                tables.append(pattern_table(assemble_material_law(canonical_spec(family))))
            text = "\n".join(tables)
        else:
            text = pattern_table(assemble_material_law(config.spec))
        stream.write(text)
        if config.output:
            _emit(config.output / "patterns.txt", text, written)
        return 0

    if config.mode == "check":
        report = certify_wellposedness(assemble_material_law(config.spec))
        text = report.to_json()
        stream.write(text)
        if config.output:
            _emit(config.output / "report.json", text, written)
        return 0 if report.verdict == "satisfied" else 2

    # simulate / verify
    if config.output is None:
        raise ConfigError(f"mode '{config.mode}' needs an output directory "
                          "(config 'output' or --out)")
    law, problem = _build_problem(config)
    report = certify_wellposedness(law)
    trajectory = solve(problem)
    config.output.mkdir(parents=True, exist_ok=True)
    written.extend(trajectory.export_csv(config.output))

    manifest = {
        "config": config.payload,
        "verdict": report.verdict,
        "classification": report.classification,
        "c_estimate": report.c_estimate,
        "rho_min": report.rho_min,
        "rho_used": problem.rho,
        "scheme": problem.scheme,
        "n_steps": problem.n_steps,
    }
    _emit(config.output / "manifest.json", _json.dumps(manifest), written)

    if config.mode == "simulate":
        return 0

    return _verify(config, law, problem, report, trajectory, written, stream)


def _verify(config, law, problem, report, trajectory, written, stream) -> int:
    tol = config.tolerances
    failures = []

    reference = spectral_solve(problem)
    comparison = compare(trajectory, reference)
    if comparison.overall > tol["solver_vs_oracle"]:
        failures.append(
            f"solver_vs_oracle {comparison.overall:.3e} > {tol['solver_vs_oracle']:.3e}"
        )

    causality = {"status": "skipped", "leakage": None, "reason": ""}
    if config.forcing["kind"] == "delayed_step":
        result = causality_test(problem, config.forcing["delay"])
        if result.skipped:
            causality = {"status": "skipped", "leakage": None, "reason": result.reason}
        else:
            causality = {"status": "ok", "leakage": result.leakage, "reason": ""}
            if result.leakage > tol["causality_leakage"]:
                failures.append(
                    f"causality_leakage {result.leakage:.3e} > {tol['causality_leakage']:.3e}"
                )
    else:
        causality["reason"] = "forcing kind has no exact pre-support"

    bound = {"status": "skipped", "reason": ""}
    if report.verdict == "satisfied" and problem.rho >= report.rho_min:
        check = solution_bound_check(problem, report, trajectory)
        bound = {
            "status": "ok" if check.window_ok else "window_too_short",
            "lhs": check.lhs,
            "rhs": check.rhs,
            "c_used": check.c_used,
            "tail_ratio": check.tail_ratio,
        }
        if check.window_ok and check.lhs > check.rhs * (1.0 + tol["bound_slack"]):
            failures.append(
                f"a_priori_bound lhs {check.lhs:.6e} > rhs {check.rhs:.6e} "
                f"(slack {tol['bound_slack']})"
            )
    else:
        bound["reason"] = "verdict not satisfied or rho below rho_min"

    payload = {
        "comparison": {
            "per_field": comparison.per_field,
            "overall": comparison.overall,
        },
        "causality": causality,
        "bound_check": bound,
        "tolerances": tol,
        "failures": failures,
    }
    _emit(config.output / "verify.json", _json.dumps(payload), written)
    for line in failures:
        stream.write(f"FAIL {line}\n")
    if not failures:
        stream.write("verify: all checks within tolerance\n")
    return 3 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="thermoevo",
        description="Certify and simulate thermoelastic models in evolutionary form.",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--all", action="store_true",
                        help="patterns mode: emit tables for every named family")
    parser.add_argument("--out", type=Path, help="output directory (overrides config)")
    args = parser.parse_args(argv)

    try:
        if args.config is None:
            if args.mode == "patterns" and args.all:
                payload = {}
            else:
                raise ConfigError("--config is required for this mode")
        else:
            try:
                payload = json.loads(args.config.read_text(encoding="utf-8"))
            except FileNotFoundError:
                raise ConfigError(f"config file not found: {args.config}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from None
        config = RunConfig.from_dict(payload, args.mode, out_dir=args.out,
                                     all_families=args.all)
        return run(config)
    except ThermoevoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
