"""Command-line interface: ``gmrdr {rates,kstep,simulate,erasure,allocate}``.

Exit codes: 0 success (or statistical gate passed), 1 gate failure,
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from .allocation import allocate_common_distortion, allocate_min_weighted_distortion
from .erasure import ErasurePattern
from .errors import ParameterError
from .experiments import iid_patterns, run_distortion_experiment, run_erasure_experiment
from .rd_analytics import DistortionTuple, kstep_variance, sum_rate
from .source_model import SourceParams

SEED_ENV = "GMRDR_SEED"
DEFAULTS = {"n": 4096, "trials": 64, "z_gate": 4.0, "seed": 0}
SIG_DIGITS = 10

RATES_HEADER = ["frame", "sigma2_W", "D_target", "D_eff", "rate_bits"]
KSTEP_HEADER = ["t", "k", "sigma2_Wtk"]

EXIT_OK, EXIT_GATE, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    params: SourceParams
    distortions: Optional[DistortionTuple]
    budget_bits: Optional[float]
    weights: Optional[tuple[float, ...]]
    pattern: Optional[str]
    trials: int
    seed: int
    z_gate: float
    output: Optional[str]
    fmt: Optional[str]


def _fmt(x: float) -> str:
    return format(x, f".{SIG_DIGITS}g")


def _round(obj: Any) -> Any:
    """Round every float in a JSON document to SIG_DIGITS significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(_fmt(obj)) if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _json(doc: dict) -> str:
    return json.dumps(_round(doc)) + "\n"


def _csv(rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# configuration


def _float_list(values) -> Optional[list[float]]:
    """Accept a scalar, a list, or repeated/comma-separated CLI strings."""
    if values is None:
        return None
    if isinstance(values, (int, float)):
        return [float(values)]
    out: list[float] = []
    for v in values:
        if isinstance(v, str):
            out.extend(float(part) for part in v.split(",") if part.strip())
        else:
            out.append(float(v))
    return out


def _expand(name: str, values: Optional[list[float]], M: int) -> Optional[tuple[float, ...]]:
    if values is None:
        return None
    if len(values) == 1:
        return (values[0],) * M
    if len(values) != M:
        raise ParameterError(f"--{name} expects 1 or M={M} values, got {len(values)}")
    return tuple(values)


def build_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    """Merge defaults < GMRDR_SEED < --config file < command-line flags."""
    file_cfg: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ParameterError("config file must hold a JSON object")

    def pick(key: str):
        flag = getattr(args, key, None)
        return flag if flag is not None else file_cfg.get(key)

    variances = _float_list(pick("variance"))
    distortions = _float_list(pick("distortion"))
    weights = _float_list(pick("weights"))

    M = pick("M")
    if M is None:
        lengths = [len(v) for v in (variances, distortions, weights) if v and len(v) > 1]
        if not lengths:
            raise ParameterError("frame count --M is required")
        M = lengths[0]
    rho = pick("rho")
    if rho is None:
        raise ParameterError("correlation --rho is required")
    n = pick("n") if pick("n") is not None else DEFAULTS["n"]

    seed = pick("seed")
    if seed is None:
        env = environ.get(SEED_ENV)
        if env is not None:
            try:
                seed = int(env)
            except ValueError as exc:
                raise ParameterError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
        else:
            seed = DEFAULTS["seed"]

    try:
        M, n, seed = int(M), int(n), int(seed)
        rho = float(rho)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"invalid numeric option: {exc}") from exc

    params = SourceParams(
        M=M, n=n, rho=rho, variances=_expand("variance", variances or [1.0], M)
    )
    d_targets = _expand("distortion", distortions, M)
    budget = pick("budget_bits")
    trials = pick("trials") if pick("trials") is not None else DEFAULTS["trials"]
    z_gate = pick("z_gate") if pick("z_gate") is not None else DEFAULTS["z_gate"]
    return RunConfig(
        params=params,
        distortions=DistortionTuple(d_targets) if d_targets is not None else None,
        budget_bits=float(budget) if budget is not None else None,
        weights=_expand("weights", weights, M),
        pattern=pick("pattern"),
        trials=int(trials),
        seed=seed,
        z_gate=float(z_gate),
        output=pick("output"),
        fmt=pick("format"),
    )


def _distortions(config: RunConfig) -> DistortionTuple:
    """Targets from --distortion, or from a common-D allocation of --budget-bits."""
    if (config.distortions is None) == (config.budget_bits is None):
        raise ParameterError("supply exactly one of --distortion or --budget-bits")
    if config.distortions is not None:
        return config.distortions
    return allocate_common_distortion(config.params, config.budget_bits).distortions


def _format(config: RunConfig, default: str, allowed: Sequence[str]) -> str:
    fmt = config.fmt or default
    if fmt not in allowed:
        raise ParameterError(f"format {fmt!r} not supported here; choose from {list(allowed)}")
    return fmt


def parse_pattern(spec: str, M: int, trials: int, seed: int):
    """``"11100"`` bitmask, ``"tail:k"`` or ``"iid:p"`` (one draw per trial)."""
    if spec.startswith("tail:"):
        try:
            k = int(spec[5:])
        except ValueError as exc:
            raise ParameterError(f"bad tail pattern {spec!r}") from exc
        return ErasurePattern.tail(M, k)
    if spec.startswith("iid:"):
        try:
            p = float(spec[4:])
        except ValueError as exc:
            raise ParameterError(f"bad iid pattern {spec!r}") from exc
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"loss probability must lie in [0, 1], got {p}")
        return iid_patterns(M, p, trials, seed)
    pattern = ErasurePattern.from_bitmask(spec)
    if pattern.M != M:
        raise ParameterError(f"bitmask {spec!r} has {pattern.M} frames, model has M={M}")
    return pattern


# --------------------------------------------------------------------------
# commands; each returns (text, exit code)


def cmd_rates(config: RunConfig) -> tuple[str, int]:
    d = _distortions(config)
    report = sum_rate(config.params, d)
    if _format(config, "csv", ("csv", "json")) == "json":
        doc = {"command": "rates", "seed": config.seed, **report.to_dict()}
        return _json(doc), EXIT_OK
    rows: list[list[Any]] = [RATES_HEADER]
    for t in range(config.params.M):
        rows.append([
            t + 1,
            report.innovation_variances[t],
            report.target_distortions[t],
            report.effective_distortions[t],
            report.rates_bits[t],
        ])
    rows.append(["sum_rate_bits", "", "", "", report.sum_rate_bits])
    rows.append(["seed", "", "", "", config.seed])
    return _csv(rows), EXIT_OK


def cmd_kstep(config: RunConfig) -> tuple[str, int]:
    d = _distortions(config)
    table = [
        (t, k, kstep_variance(config.params, d, t, k))
        for t in range(1, config.params.M + 1)
        for k in range(t + 1)
    ]
    if _format(config, "csv", ("csv", "json")) == "json":
        doc = {
            "command": "kstep",
            "seed": config.seed,
            "rows": [dict(zip(KSTEP_HEADER, row)) for row in table],
        }
        return _json(doc), EXIT_OK
    rows: list[list[Any]] = [KSTEP_HEADER, *map(list, table)]
    rows.append(["seed", "", config.seed])
    return _csv(rows), EXIT_OK


def cmd_simulate(config: RunConfig) -> tuple[str, int]:
    _format(config, "json", ("json",))
    d = _distortions(config)
    stats = run_distortion_experiment(
        config.params, d, config.trials, config.seed, config.z_gate
    )
    doc = {"command": "simulate", **stats.to_dict()}
    return _json(doc), EXIT_OK if stats.passed else EXIT_GATE


def cmd_erasure(config: RunConfig) -> tuple[str, int]:
    _format(config, "json", ("json",))
    if not config.pattern:
        raise ParameterError("erasure needs --pattern (bitmask, tail:k or iid:p)")
    d = _distortions(config)
    pattern = parse_pattern(config.pattern, config.params.M, config.trials, config.seed)
    stats = run_erasure_experiment(
        config.params, d, pattern, config.trials, config.seed, config.z_gate
    )
    doc = {
        "command": "erasure",
        "pattern": config.pattern,
        **stats.to_dict(),
        "k_per_frame": list(stats.k_per_frame) if stats.k_per_frame is not None else None,
        "k_per_frame_by_trial": (
            [list(k) for k in stats.k_per_frame_by_trial]
            if stats.k_per_frame_by_trial is not None
            else None
        ),
    }
    return _json(doc), EXIT_OK if stats.passed else EXIT_GATE


def cmd_allocate(config: RunConfig) -> tuple[str, int]:
    _format(config, "json", ("json",))
    if config.budget_bits is None:
        raise ParameterError("allocate needs --budget-bits")
    if config.distortions is not None:
        raise ParameterError("allocate takes --budget-bits, not --distortion")
    if config.weights is None:
        result = allocate_common_distortion(config.params, config.budget_bits)
    else:
        result = allocate_min_weighted_distortion(
            config.params, config.budget_bits, config.weights
        )
    doc = {"command": "allocate", "seed": config.seed, **result.to_dict()}
    return _json(doc), EXIT_OK


COMMANDS = {
    "rates": cmd_rates,
    "kstep": cmd_kstep,
    "simulate": cmd_simulate,
    "erasure": cmd_erasure,
    "allocate": cmd_allocate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option defaults")
    common.add_argument("--M", type=int, dest="M", help="frames per GOP")
    common.add_argument("--n", type=int, help="pixels per frame (default 4096)")
    common.add_argument("--rho", type=float, help="temporal correlation coefficient")
    common.add_argument(
        "--variance", action="append",
        help="frame variance; one value (constant) or one per frame, repeatable or comma-separated",
    )
    common.add_argument(
        "--distortion", action="append",
        help="target distortion; one common value or one per frame",
    )
    common.add_argument("--budget-bits", type=float, dest="budget_bits")
    common.add_argument("--weights", action="append", help="per-frame weights (allocate)")
    common.add_argument("--pattern", help='erasure pattern: "11100", "tail:k" or "iid:p"')
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV} or 0)")
    common.add_argument("--z-gate", type=float, dest="z_gate")
    common.add_argument("--output", help="write to this path instead of stdout")
    common.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(
        prog="gmrdr",
        description="Sum-rate-distortion tools for correlated Gauss-Markov frame sources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "rates": "per-frame innovation variances and rates, plus the sum-rate",
        "kstep": "k-step prediction distortion table for every frame",
        "simulate": "Monte Carlo check of the achievable distortions",
        "erasure": "Monte Carlo check of k-step prediction after losses",
        "allocate": "distortions meeting a sum-rate budget",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = build_config(args)
        text, code = COMMANDS[args.command](config)
    except ParameterError as exc:
        print(f"gmrdr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if config.output:
        with open(config.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
