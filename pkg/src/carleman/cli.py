"""expcli — experiment harness for the lifted-truncation studies.

Subcommands:
    run            one cell: truncation error + spectral report as JSON
    sweep          Cartesian product over (N, nonlinearity, T) to CSV
    spectrum       eigenvalues / resonance gap / condition number as JSON
    verify-theory  randomized block-bound certificates, nonzero exit on failure

Config is a single JSON document with "model", "integrator", optional
"sweep" and "spectral" sections; unknown keys anywhere are rejected.
Exit codes: 2 config error, 3 memory budget, 4 divergence (record still
emitted). CSV floats are %.12e and rows follow config order, so identical
config + seed gives a byte-identical file.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO

import numpy as np

from .dynamics import (
    UnstableStepError,
    default_step_size,
    integrate_reference,
    truncation_error,
    DIVERGENCE_GUARD,
)
from .linalg import induced_norm
from .models import (
    ModelConfig,
    build_from_config,
    nonlinearity_coefficient,
    nonlinearity_from_norm,
)
from .spectral import compute_rates, error_bound, spectral_report
from .tensor import resolve_budget_bytes
from .theory import verify_theory_suite

CSV_COLUMNS = [
    "model",
    "n",
    "N",
    "nonlinearity",
    "beta",
    "T",
    "dt",
    "norm",
    "finalError",
    "supError",
    "mu",
    "delta",
    "kappa1",
    "Rr",
    "Rd",
    "bound",
    "status",
]

MAX_SWEEP_CELLS = 10_000

EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_DIVERGED = 4


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class IntegratorSettings:
    N: int
    T: float
    dt: Optional[float] = None
    stride: int = 100
    norm: str = "1"


@dataclass(frozen=True)
class SpectralSettings:
    M: Optional[int] = None
    drop_zero_modes: bool = True
    exclude_conjugate_pairs: bool = True


def _require_keys(section: dict, allowed: set, name: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"'{name}' section must be a JSON object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{name}' section: {sorted(unknown)}")


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - {"model", "integrator", "sweep", "spectral"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    if "model" not in raw:
        raise ConfigError("config needs a 'model' section")
    return raw


def parse_model(raw: dict) -> ModelConfig:
    try:
        return ModelConfig.from_dict(raw["model"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_integrator(raw: dict, required: bool = True) -> Optional[IntegratorSettings]:
    if "integrator" not in raw:
        if required:
            raise ConfigError("config needs an 'integrator' section")
        return None
    section = raw["integrator"]
    _require_keys(section, {"N", "T", "dt", "stride", "norm"}, "integrator")
    if "N" not in section or "T" not in section:
        raise ConfigError("integrator section needs 'N' and 'T'")
    N = section["N"]
    if not isinstance(N, int) or N < 1:
        raise ConfigError("integrator N must be an integer >= 1")
    T = float(section["T"])
    if not T > 0:
        raise ConfigError("integrator T must be positive")
    dt = section.get("dt")
    if dt is not None:
        dt = float(dt)
        if not dt > 0:
            raise ConfigError("integrator dt must be positive")
    stride = section.get("stride", 100)
    if not isinstance(stride, int) or stride < 1:
        raise ConfigError("integrator stride must be an integer >= 1")
    norm = str(section.get("norm", "1"))
    if norm not in ("1", "2", "inf"):
        raise ConfigError("integrator norm must be one of '1', '2', 'inf'")
    return IntegratorSettings(N=N, T=T, dt=dt, stride=stride, norm=norm)


def parse_spectral(raw: dict) -> SpectralSettings:
    if "spectral" not in raw:
        return SpectralSettings()
    section = raw["spectral"]
    _require_keys(
        section, {"M", "dropZeroModes", "excludeConjugatePairs"}, "spectral"
    )
    M = section.get("M")
    if M is not None and (not isinstance(M, int) or M < 2):
        raise ConfigError("spectral M must be an integer >= 2")
    return SpectralSettings(
        M=M,
        drop_zero_modes=bool(section.get("dropZeroModes", True)),
        exclude_conjugate_pairs=bool(section.get("excludeConjugatePairs", True)),
    )


@dataclass(frozen=True)
class SweepSettings:
    n_values: Optional[List[int]]
    nonlinearity_values: Optional[List[float]]
    norm_f2_values: Optional[List[float]]
    t_values: Optional[List[float]]


def parse_sweep(raw: dict) -> SweepSettings:
    if "sweep" not in raw:
        raise ConfigError("sweep subcommand needs a 'sweep' section")
    section = raw["sweep"]
    _require_keys(section, {"N", "nonlinearity", "normF2", "T"}, "sweep")
    if "nonlinearity" in section and "normF2" in section:
        raise ConfigError("sweep takes 'nonlinearity' or 'normF2', not both")

    def _as_list(key, caster):
        if key not in section:
            return None
        values = section[key]
        if not isinstance(values, list):
            raise ConfigError(f"sweep '{key}' must be a list")
        return [caster(v) for v in values]

    def _as_int(v):
        if not isinstance(v, int) or v < 1:
            raise ConfigError("sweep N values must be integers >= 1")
        return v

    return SweepSettings(
        n_values=_as_list("N", _as_int),
        nonlinearity_values=_as_list("nonlinearity", float),
        norm_f2_values=_as_list("normF2", float),
        t_values=_as_list("T", float),
    )


def _required_bytes(n: int, N: int) -> int:
    total = sum(n**j for j in range(1, N + 1))
    return total * 8 * 6


def run_cell(
    model_cfg: ModelConfig,
    integ: IntegratorSettings,
    spectral_cfg: SpectralSettings,
    budget_bytes: int,
) -> dict:
    """Execute one experiment cell and assemble the full record."""
    system, x0 = build_from_config(model_cfg)
    M = spectral_cfg.M if spectral_cfg.M is not None else integ.N + 1
    report = spectral_report(
        system.F1,
        max_order=M,
        drop_zero_modes=spectral_cfg.drop_zero_modes,
        exclude_conjugate_pairs=spectral_cfg.exclude_conjugate_pairs,
    )
    norm_f2_1 = system.coupling.norm1()
    norm_f2_2 = induced_norm(system.coupling, 2) if system.coupling.nnz else 0.0

    dt = integ.dt if integ.dt is not None else default_step_size(system.F1, integ.N)
    status = "ok"
    try:
        result = truncation_error(
            system,
            x0,
            integ.N,
            integ.T,
            dt=dt,
            norm=integ.norm,
            stride=integ.stride,
            budget_bytes=budget_bytes,
        )
        final_error, sup_error, mu = result
    except UnstableStepError:
        status = "diverged"
        final_error = sup_error = DIVERGENCE_GUARD
        try:
            ref = integrate_reference(system, x0, integ.T, dt=dt, stride=integ.stride)
            mu = float(np.abs(ref.states).sum(axis=1).max())
        except UnstableStepError:
            mu = DIVERGENCE_GUARD

    rates = compute_rates(report, norm_f2_1, norm_f2_2, mu)
    record = {
        "model": model_cfg.model,
        "n": system.n,
        "N": integ.N,
        "nonlinearity": nonlinearity_coefficient(model_cfg),
        "beta": model_cfg.beta,
        "T": integ.T,
        "dt": dt,
        "norm": integ.norm,
        "finalError": final_error,
        "supError": sup_error,
        "mu": mu,
        "delta": report.delta,
        "kappa1": report.kappa1,
        "Rr": rates.rr,
        "Rd": rates.rd,
        "status": status,
    }
    if report.delta > 0:
        record["bound"] = error_bound(integ.N, integ.T, rates, regime="resonant")
    return record


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.12e" % float(value)


def _record_to_row(record: dict) -> str:
    cells = []
    for col in CSV_COLUMNS:
        if col == "bound" and "bound" not in record:
            cells.append("")
        else:
            cells.append(_fmt(record[col]))
    return ",".join(cells)


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def _emit_json(payload: dict, out_path: Optional[str]) -> None:
    text = json.dumps(_json_safe(payload), indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    raw = load_config(args.config)
    model_cfg = parse_model(raw)
    integ = parse_integrator(raw)
    spectral_cfg = parse_spectral(raw)
    budget = resolve_budget_bytes(args.budget_bytes)

    system, _ = build_from_config(model_cfg)
    if _required_bytes(system.n, integ.N) > budget:
        print(
            f"error: lifted state for n={system.n}, N={integ.N} exceeds the "
            f"{budget}-byte budget",
            file=sys.stderr,
        )
        return EXIT_BUDGET

    record = run_cell(model_cfg, integ, spectral_cfg, budget)
    _emit_json(record, args.out)
    return EXIT_DIVERGED if record["status"] == "diverged" else 0


def _cell_worker(payload) -> dict:
    model_cfg, integ, spectral_cfg, budget = payload
    return run_cell(model_cfg, integ, spectral_cfg, budget)


def cmd_sweep(args) -> int:
    raw = load_config(args.config)
    model_cfg = parse_model(raw)
    integ = parse_integrator(raw)
    spectral_cfg = parse_spectral(raw)
    sweep = parse_sweep(raw)
    budget = resolve_budget_bytes(args.budget_bytes)

    n_values = sweep.n_values if sweep.n_values is not None else [integ.N]
    if sweep.norm_f2_values is not None:
        nonlin_values = [
            nonlinearity_from_norm(model_cfg, v) for v in sweep.norm_f2_values
        ]
    elif sweep.nonlinearity_values is not None:
        nonlin_values = sweep.nonlinearity_values
    else:
        nonlin_values = [nonlinearity_coefficient(model_cfg)]
    t_values = sweep.t_values if sweep.t_values is not None else [integ.T]

    cells = []
    for N in n_values:
        for coeff in nonlin_values:
            for T in t_values:
                cell_model = model_cfg.replace_nonlinearity(coeff)
                cell_integ = IntegratorSettings(
                    N=N, T=T, dt=integ.dt, stride=integ.stride, norm=integ.norm
                )
                cells.append((cell_model, cell_integ, spectral_cfg, budget))
    if len(cells) > MAX_SWEEP_CELLS:
        raise ConfigError(
            f"sweep has {len(cells)} cells; the limit is {MAX_SWEEP_CELLS}"
        )

    system, _ = build_from_config(model_cfg)
    worst_n = max((c[1].N for c in cells), default=0)
    if cells and _required_bytes(system.n, worst_n) > budget:
        print(
            f"error: largest sweep cell (N={worst_n}) exceeds the "
            f"{budget}-byte budget",
            file=sys.stderr,
        )
        return EXIT_BUDGET

    def _write(stream: TextIO) -> int:
        stream.write(",".join(CSV_COLUMNS) + "\n")
        ok_rows = 0
        if not cells:
            return ok_rows
        if args.workers > 1:
            with concurrent.futures.ProcessPoolExecutor(
                max_workers=args.workers
            ) as pool:
                for record in pool.map(_cell_worker, cells):
                    stream.write(_record_to_row(record) + "\n")
                    ok_rows += record["status"] == "ok"
        else:
            for payload in cells:
                record = _cell_worker(payload)
                stream.write(_record_to_row(record) + "\n")
                ok_rows += record["status"] == "ok"
        return ok_rows

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            ok_rows = _write(fh)
    else:
        ok_rows = _write(sys.stdout)

    if cells and ok_rows == 0:
        return EXIT_DIVERGED
    return 0


def cmd_spectrum(args) -> int:
    raw = load_config(args.config)
    model_cfg = parse_model(raw)
    integ = parse_integrator(raw, required=False)
    spectral_cfg = parse_spectral(raw)
    if spectral_cfg.M is not None:
        M = spectral_cfg.M
    elif integ is not None:
        M = integ.N + 1
    else:
        M = 6

    system, _ = build_from_config(model_cfg)
    report = spectral_report(
        system.F1,
        max_order=M,
        drop_zero_modes=spectral_cfg.drop_zero_modes,
        exclude_conjugate_pairs=spectral_cfg.exclude_conjugate_pairs,
    )
    payload = {
        "model": model_cfg.model,
        "n": system.n,
        "M": report.search_order,
        "dropZeroModes": spectral_cfg.drop_zero_modes,
        "excludeConjugatePairs": spectral_cfg.exclude_conjugate_pairs,
        "eigenvalues": [[z.real, z.imag] for z in report.eigenvalues],
        "zeroModesRemoved": report.zero_modes_removed,
        "delta": report.delta,
        "kappa1": report.kappa1,
        "sigma": report.sigma,
        "witness": None
        if report.witness is None
        else {
            "targetIndex": report.witness.target_index,
            "weights": list(report.witness.weights),
        },
    }
    _emit_json(payload, args.out)
    return 0


def cmd_verify_theory(args) -> int:
    report = verify_theory_suite(
        n=args.n, N=args.N, seed=args.seed, instances=args.instances
    )
    _emit_json(report, args.out)
    return 0 if report["all_passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expcli",
        description="Carleman-lifting experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument(
            "--budget-bytes",
            type=int,
            default=None,
            help="lifted-state memory budget (fallback: CARLEMAN_BUDGET_BYTES, then 2 GiB)",
        )
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    p_run = sub.add_parser("run", help="single experiment cell, JSON to stdout")
    _common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="Cartesian sweep to CSV")
    _common(p_sweep)
    p_sweep.add_argument("--workers", type=int, default=1, help="parallel cells")
    p_sweep.set_defaults(func=cmd_sweep)

    p_spec = sub.add_parser("spectrum", help="spectral report JSON")
    _common(p_spec)
    p_spec.set_defaults(func=cmd_spectrum)

    p_ver = sub.add_parser("verify-theory", help="randomized theory certificates")
    _common(p_ver, config_required=False)
    p_ver.add_argument("--n", type=int, default=2, help="state dimension")
    p_ver.add_argument("--N", type=int, default=3, help="truncation level")
    p_ver.add_argument("--instances", type=int, default=3, help="random systems")
    p_ver.set_defaults(func=cmd_verify_theory)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
