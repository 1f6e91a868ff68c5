"""Command-line interface.

Subcommands cover single-point branch reports, critical drives, phase
diagrams, fixed-ratio cuts, the orientation-contrast map, fluctuation
readouts, relaxation-based validation and hysteresis sweeps.

Configuration is a flat key=value file with # comments; every key is also
available as a --key flag, with flags taking precedence over the file and
the file over built-in defaults.  All rate-like inputs are normalized by
kappa_a on ingestion, so configurations may be written in physical units.
Outputs are CSV (12 significant digits) or JSON lines; identical inputs
produce byte-identical outputs for any --jobs value.

Exit codes: 0 success, 1 invalid configuration or usage, 2 numerical
failure at runtime.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import MagnonicError, UnstableRegion
from .fluctuations import branch_fluctuations, diffusion_matrix
from .model import KerrSign, SystemParams
from .nonreciprocity import _rho_from_classification
from .oracle import hysteresis_sweep, validate_grid
from .stability import PhaseLabel, build_drift_matrix, classify_point
from .steadystate import (
    BranchLabel,
    critical_ratio,
    first_critical_drive,
    second_critical_drive,
)
from .sweep import (
    SENTINEL_CODE,
    Axis,
    SweepSpec,
    contrast_map,
    cut_datasets,
    phase_diagram,
)

JOBS_ENV = "MAGNONIC_JOBS"


class ConfigError(Exception):
    pass


# key -> (default, type); insertion order is the dump order
CONFIG_SPEC: dict[str, tuple] = {
    "kappa_a": (1.0, float),
    "delta_a": (3.0, float),
    "delta_m_over_delta_a": (1.3, float),
    "gamma_m": (1.0, float),
    "g_m": (2.4, float),
    "kerr_sign": ("+", str),
    "kerr_abs": (1.0, float),
    "omega": (2.2, float),
    "nbar_a": (0.0, float),
    "nbar_m": (0.0, float),
    "omega_min": (1.8, float),
    "omega_max": (2.4, float),
    "omega_count": (400, int),
    "ratio_min": (0.6, float),
    "ratio_max": (1.4, float),
    "ratio_count": (400, int),
    "cut_count": (2000, int),
    "hysteresis_count": (41, int),
    "oracle_count": (20, int),
    "oracle_seed": (20240, int),
    "dt": (1e-3, float),
    "t_end": (20000.0, float),
    "noise": (1e-6, float),
    "eps_den": (1e-9, float),
    "tol_stab": (1e-9, float),
    "tol_phase": (1e-6, float),
    "tol_fp": (1e-8, float),
    "eps_contrast": (1e-9, float),
}

# normalized by kappa_a on ingestion
_RATE_KEYS = ("delta_a", "gamma_m", "g_m", "kerr_abs", "omega", "omega_min", "omega_max")
_TIME_KEYS = ("dt", "t_end")

_FLAG_ALIASES = {
    "delta_m_over_delta_a": ["--ratio"],
    "kerr_sign": ["--kerr"],
}


def _parse_value(key: str, raw: str):
    kind = CONFIG_SPEC[key][1]
    raw = raw.strip()
    try:
        if kind is float:
            return float(raw)
        if kind is int:
            return int(raw)
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for key {key!r}") from None
    return raw


def load_config_file(path: str) -> dict:
    """Flat key=value file; # starts a comment; unknown keys are errors."""
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in CONFIG_SPEC:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, raw)
    return values


def _normalize(cfg: dict) -> dict:
    scale = cfg["kappa_a"]
    if not scale > 0:
        raise ConfigError("kappa_a must be positive")
    if scale != 1.0:
        for key in _RATE_KEYS:
            cfg[key] = cfg[key] / scale
        for key in _TIME_KEYS:
            cfg[key] = cfg[key] * scale
        cfg["kappa_a"] = 1.0
    return cfg


def build_config(args: argparse.Namespace) -> dict:
    cfg = {key: spec[0] for key, spec in CONFIG_SPEC.items()}
    if args.config is not None:
        cfg.update(load_config_file(args.config))
    for key in CONFIG_SPEC:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    for key in ("omega_count", "ratio_count", "cut_count", "hysteresis_count", "oracle_count"):
        if cfg[key] < 2:
            raise ConfigError(f"{key} must be at least 2")
    return _normalize(cfg)


def params_from_config(cfg: dict) -> SystemParams:
    try:
        sign = KerrSign.from_symbol(cfg["kerr_sign"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        return SystemParams(
            delta_a=cfg["delta_a"],
            delta_m=cfg["delta_m_over_delta_a"] * cfg["delta_a"],
            gamma_m=cfg["gamma_m"],
            g_m=cfg["g_m"],
            kerr_sign=sign,
            kerr_magnitude=cfg["kerr_abs"],
            omega_drive=cfg["omega"],
            kappa_a=cfg["kappa_a"],
            nbar_a=cfg["nbar_a"],
            nbar_m=cfg["nbar_m"],
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def resolve_jobs(args: argparse.Namespace) -> int:
    if args.jobs is not None:
        jobs = args.jobs
    elif os.environ.get(JOBS_ENV):
        try:
            jobs = int(os.environ[JOBS_ENV])
        except ValueError:
            raise ConfigError(f"{JOBS_ENV} must be an integer") from None
    else:
        jobs = os.cpu_count() or 1
    if jobs < 1:
        raise ConfigError("jobs must be at least 1")
    return jobs


def _fmt_csv(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _fmt_json(value):
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def _emit(stream, fmt: str, columns: list[str], rows) -> None:
    if fmt == "csv":
        stream.write(",".join(columns) + "\n")
        for row in rows:
            stream.write(",".join(_fmt_csv(row[c]) for c in columns) + "\n")
    else:
        for row in rows:
            stream.write(
                json.dumps({c: _fmt_json(row[c]) for c in columns}, allow_nan=False)
                + "\n"
            )


def _phase_name(code: int) -> str:
    if code == SENTINEL_CODE:
        return "degenerate"
    return PhaseLabel.from_code(int(code)).name.lower()


def _dump_config(cfg: dict, stream) -> None:
    stream.write("# effective configuration (normalized: kappa_a = 1)\n")
    for key in CONFIG_SPEC:
        value = cfg[key]
        if isinstance(value, float):
            stream.write(f"{key} = {value!r}\n")
        else:
            stream.write(f"{key} = {value}\n")


def cmd_branches(cfg, args, stream) -> int:
    params = params_from_config(cfg)
    cls = classify_point(
        params,
        eps_den=cfg["eps_den"],
        tol_stab=cfg["tol_stab"],
        tol_phase=cfg["tol_phase"],
        all_branches=True,
    )
    order = {BranchLabel.ZERO: 0, BranchLabel.PLUS: 1, BranchLabel.MINUS: 2}
    assessments = sorted(
        [cls.zero, cls.condensed, cls.diagnostic],
        key=lambda a: order[a.solution.label],
    )
    columns = [
        "branch",
        "considered",
        "admissible",
        "magnon_occ",
        "photon_occ",
        "rho",
        "m_re",
        "m_im",
        "a_re",
        "a_im",
        "verdict",
        "max_re_lambda",
        "formal",
    ]

    def rows():
        for a in assessments:
            sol = a.solution
            rho = (
                params.kerr_magnitude * sol.magnon_occ / params.gamma_m
                if sol.admissible
                else math.nan
            )
            yield {
                "branch": sol.label.value,
                "considered": sol.considered,
                "admissible": sol.admissible,
                "magnon_occ": sol.magnon_occ,
                "photon_occ": sol.photon_occ,
                "rho": rho,
                "m_re": sol.m_amplitude.real,
                "m_im": sol.m_amplitude.imag,
                "a_re": sol.a_amplitude.real,
                "a_im": sol.a_amplitude.imag,
                "verdict": a.verdict.value if a.verdict is not None else None,
                "max_re_lambda": a.max_real,
                "formal": a.formal,
            }

    _emit(stream, args.format, columns, rows())
    return 0


def cmd_thresholds(cfg, args, stream) -> int:
    params = params_from_config(cfg)
    columns = ["detuning_ratio", "critical_ratio", "omega_crit_1", "omega_crit_2"]
    row = {
        "detuning_ratio": params.detuning_ratio,
        "critical_ratio": critical_ratio(params),
        "omega_crit_1": first_critical_drive(params),
        "omega_crit_2": second_critical_drive(params),
    }
    _emit(stream, args.format, columns, [row])
    return 0


def _sweep_spec_2d(cfg) -> SweepSpec:
    return SweepSpec(
        base=params_from_config(cfg),
        omega_axis=Axis(cfg["omega_min"], cfg["omega_max"], cfg["omega_count"]),
        ratio_axis=Axis(cfg["ratio_min"], cfg["ratio_max"], cfg["ratio_count"]),
    )


def cmd_phase_diagram(cfg, args, stream) -> int:
    spec = _sweep_spec_2d(cfg)
    sign = KerrSign.from_symbol(cfg["kerr_sign"])
    result = phase_diagram(
        spec,
        sign,
        eps_den=cfg["eps_den"],
        tol_stab=cfg["tol_stab"],
        tol_phase=cfg["tol_phase"],
        jobs=resolve_jobs(args),
    )
    columns = ["omega", "ratio", "phase", "marginal"]

    def rows():
        for i, ratio in enumerate(result.ratios):
            for j, omega in enumerate(result.omegas):
                yield {
                    "omega": omega,
                    "ratio": ratio,
                    "phase": _phase_name(result.codes[i, j]),
                    "marginal": bool(result.marginal[i, j]),
                }

    _emit(stream, args.format, columns, rows())
    return 0


def cmd_cut(cfg, args, stream) -> int:
    spec = SweepSpec(
        base=params_from_config(cfg),
        omega_axis=Axis(cfg["omega_min"], cfg["omega_max"], cfg["cut_count"]),
        fixed_ratio=cfg["delta_m_over_delta_a"],
    )
    want_order = args.quantity in ("order", "both")
    want_fluct = args.quantity in ("fluctuations", "both")
    result = cut_datasets(
        spec,
        want_order=want_order,
        want_fluct=want_fluct,
        eps_den=cfg["eps_den"],
        tol_stab=cfg["tol_stab"],
        tol_phase=cfg["tol_phase"],
        jobs=resolve_jobs(args),
    )
    columns = ["omega"]
    if want_order:
        columns += ["rho_pos", "rho_neg"]
    if want_fluct:
        columns += ["log_fluct_pos", "log_fluct_neg"]
    columns += ["phase_pos", "phase_neg", "marginal_pos", "marginal_neg"]
    if want_fluct:
        columns += ["near_marginal_pos", "near_marginal_neg"]

    def rows():
        for j, omega in enumerate(result.omegas):
            row = {
                "omega": omega,
                "phase_pos": _phase_name(result.phase_pos[j]),
                "phase_neg": _phase_name(result.phase_neg[j]),
                "marginal_pos": bool(result.marginal_pos[j]),
                "marginal_neg": bool(result.marginal_neg[j]),
            }
            if want_order:
                row["rho_pos"] = result.rho_pos[j]
                row["rho_neg"] = result.rho_neg[j]
            if want_fluct:
                row["log_fluct_pos"] = result.log_fluct_pos[j]
                row["log_fluct_neg"] = result.log_fluct_neg[j]
                row["near_marginal_pos"] = bool(result.near_marginal_pos[j])
                row["near_marginal_neg"] = bool(result.near_marginal_neg[j])
            yield row

    _emit(stream, args.format, columns, rows())
    return 0


def cmd_contrast(cfg, args, stream) -> int:
    spec = _sweep_spec_2d(cfg)
    result = contrast_map(
        spec,
        eps_den=cfg["eps_den"],
        tol_stab=cfg["tol_stab"],
        tol_phase=cfg["tol_phase"],
        eps_contrast=cfg["eps_contrast"],
        jobs=resolve_jobs(args),
    )
    columns = ["omega", "ratio", "contrast", "rho_pos", "rho_neg", "phase_pos", "phase_neg"]

    def rows():
        for i, ratio in enumerate(result.ratios):
            for j, omega in enumerate(result.omegas):
                yield {
                    "omega": omega,
                    "ratio": ratio,
                    "contrast": result.contrast[i, j],
                    "rho_pos": result.rho_pos[i, j],
                    "rho_neg": result.rho_neg[i, j],
                    "phase_pos": _phase_name(result.phase_pos[i, j]),
                    "phase_neg": _phase_name(result.phase_neg[i, j]),
                }

    _emit(stream, args.format, columns, rows())
    return 0


def cmd_fluctuations(cfg, args, stream) -> int:
    params = params_from_config(cfg)
    cls = classify_point(
        params,
        eps_den=cfg["eps_den"],
        tol_stab=cfg["tol_stab"],
        tol_phase=cfg["tol_phase"],
    )
    if cls.label is PhaseLabel.UNSTABLE:
        raise UnstableRegion("no stable branch at this point")
    if cls.label is PhaseLabel.NORMAL:
        branch = cls.zero
        amplitude = 0j
    else:
        branch = cls.condensed
        amplitude = branch.solution.m_amplitude
    drift = build_drift_matrix(params, amplitude)
    value, cov = branch_fluctuations(params, drift, tol_stab=cfg["tol_stab"])
    diff = diffusion_matrix(params)
    residual = float(
        np.abs(
            drift.entries @ cov.entries + cov.entries @ drift.entries.T + diff.entries
        ).max()
    )
    columns = [
        "omega",
        "ratio",
        "kerr",
        "phase",
        "branch",
        "n_fluct",
        "log_fluct",
        "near_marginal",
        "residual",
    ] + [f"v{i + 1}{j + 1}" for i in range(4) for j in range(4)]
    row = {
        "omega": params.omega_drive,
        "ratio": params.detuning_ratio,
        "kerr": params.kerr_sign.symbol,
        "phase": cls.label.name.lower(),
        "branch": branch.solution.label.value,
        "n_fluct": value,
        "log_fluct": math.log10(value + 1.0),
        "near_marginal": cov.near_marginal,
        "residual": residual,
    }
    for i in range(4):
        for j in range(4):
            row[f"v{i + 1}{j + 1}"] = cov.entries[i, j]
    _emit(stream, args.format, columns, [row])
    return 0


def cmd_oracle(cfg, args, stream) -> int:
    params = params_from_config(cfg)
    omegas = np.linspace(cfg["omega_min"], cfg["omega_max"], cfg["oracle_count"])
    ratios = np.linspace(cfg["ratio_min"], cfg["ratio_max"], cfg["oracle_count"])
    report = validate_grid(
        params,
        omegas,
        ratios,
        seed=cfg["oracle_seed"],
        eps_den=cfg["eps_den"],
        tol_stab=cfg["tol_stab"],
        tol_phase=cfg["tol_phase"],
    )
    columns = [
        "omega",
        "ratio",
        "kerr",
        "phase",
        "zero_formula",
        "zero_oracle",
        "condensed_admissible",
        "condensed_formula",
        "condensed_oracle",
        "rho_formula",
        "rho_oracle",
        "rho_dev",
        "covariance_dev",
        "agree",
    ]

    def rows():
        for c in report.checks:
            yield {
                "omega": c.omega,
                "ratio": c.detuning_ratio,
                "kerr": c.kerr_sign.symbol,
                "phase": c.phase.name.lower(),
                "zero_formula": c.zero_stable_formula,
                "zero_oracle": c.zero_stable_oracle,
                "condensed_admissible": c.condensed_admissible,
                "condensed_formula": c.condensed_stable_formula,
                "condensed_oracle": c.condensed_stable_oracle,
                "rho_formula": c.rho_formula,
                "rho_oracle": c.rho_oracle,
                "rho_dev": c.rho_dev,
                "covariance_dev": c.covariance_dev,
                "agree": c.verdicts_agree,
            }

    _emit(stream, args.format, columns, rows())
    print(
        f"oracle: {len(report.checks)} checks, "
        f"max rho dev {report.max_rho_dev:.3e}, "
        f"max covariance dev {report.max_covariance_dev:.3e}, "
        f"{report.disagreements} verdict disagreements",
        file=sys.stderr,
    )
    return 0 if report.ok() else 2


def cmd_hysteresis(cfg, args, stream) -> int:
    params = params_from_config(cfg)
    omegas = np.linspace(cfg["omega_min"], cfg["omega_max"], cfg["hysteresis_count"])
    results = {}
    if args.direction in ("up", "both"):
        results["up"] = hysteresis_sweep(
            params,
            omegas,
            seed=cfg["oracle_seed"],
            noise=cfg["noise"],
            t_end=cfg["t_end"],
            dt=cfg["dt"],
        )
    if args.direction in ("down", "both"):
        results["down"] = hysteresis_sweep(
            params,
            omegas[::-1],
            seed=cfg["oracle_seed"],
            noise=cfg["noise"],
            t_end=cfg["t_end"],
            dt=cfg["dt"],
        )
    columns = ["omega"]
    for tag in ("up", "down"):
        if tag in results:
            columns += [f"rho_{tag}", f"converged_{tag}"]

    def rows():
        for j, omega in enumerate(omegas):
            row = {"omega": omega}
            if "up" in results:
                row["rho_up"] = results["up"].rho[j]
                row["converged_up"] = bool(results["up"].converged[j])
            if "down" in results:
                k = omegas.size - 1 - j
                row["rho_down"] = results["down"].rho[k]
                row["converged_down"] = bool(results["down"].converged[k])
            yield row

    _emit(stream, args.format, columns, rows())
    return 0


_COMMANDS = {
    "branches": cmd_branches,
    "thresholds": cmd_thresholds,
    "phase-diagram": cmd_phase_diagram,
    "cut": cmd_cut,
    "contrast": cmd_contrast,
    "fluctuations": cmd_fluctuations,
    "oracle": cmd_oracle,
    "hysteresis": cmd_hysteresis,
}


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat key=value configuration file")
    shared.add_argument(
        "--dump-config",
        action="store_true",
        help="print the effective configuration and exit",
    )
    shared.add_argument("--out", help="output file (default: stdout)")
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    shared.add_argument(
        "--jobs",
        type=int,
        help=f"worker processes (default: {JOBS_ENV} or machine parallelism)",
    )
    for key, (_, kind) in CONFIG_SPEC.items():
        flags = [f"--{key}"] + _FLAG_ALIASES.get(key, [])
        shared.add_argument(*flags, type=kind, dest=key, default=None)

    parser = argparse.ArgumentParser(
        prog="magnonic",
        description="driven Kerr cavity-magnon steady states, stability and fluctuations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        child = sub.add_parser(name, parents=[shared])
        if name == "cut":
            child.add_argument(
                "--quantity",
                choices=("order", "fluctuations", "both"),
                default="both",
            )
        if name == "hysteresis":
            child.add_argument(
                "--direction", choices=("up", "down", "both"), default="both"
            )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.dump_config:
            if args.out:
                with open(args.out, "w", encoding="utf-8") as stream:
                    _dump_config(cfg, stream)
            else:
                _dump_config(cfg, sys.stdout)
            return 0
        handler = _COMMANDS[args.command]
        if args.out:
            with open(args.out, "w", encoding="utf-8") as stream:
                return handler(cfg, args, stream)
        return handler(cfg, args, sys.stdout)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MagnonicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
