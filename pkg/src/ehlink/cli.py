"""Command line client driving the service handlers in-process.

Subcommands: allocate, simulate, sweep, trace. Options may come from flags
or from an INI config file (--config) with one section per subcommand;
flags win. Exit codes: 0 success, 1 usage errors, 2 unreadable or invalid
input data (files, configs), 3 resource limits and internal failures. When
settings come from a config file, their validation failures count as input
data problems (exit 2) rather than usage errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys

from pydantic import ValidationError

from . import __version__, io
from .errors import InputDataError, ParameterError, ResourceLimitError
from .experiments import FEASIBILITY_COLUMNS, SWEEP_COLUMNS
from .service import handlers
from .service.schemas import (
    AllocateRequest,
    ArrivalSpecModel,
    FeasibilityTrendRequest,
    Fig5SweepRequest,
    SimulateRequest,
    TraceRequest,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; 2 is reserved for input data here
    def error(self, message):
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    items = [chunk.strip() for chunk in text.split(",")]
    return [float(chunk) for chunk in items if chunk]


def _int_list(text: str) -> list[int]:
    items = [chunk.strip() for chunk in text.split(",")]
    return [int(chunk) for chunk in items if chunk]


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
    common.add_argument("--out", type=str, default=None, help="write results to this path")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default csv)")
    common.add_argument("--jobs", type=int, default=None, help="parallel workers for simulate trials")
    common.add_argument("--config", type=str, default=None, help="INI config file with per-command sections")

    parser = _Parser(prog="ehlink", description="energy-harvesting link tools")
    parser.add_argument("--version", action="version", version=f"ehlink {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_alloc = sub.add_parser("allocate", parents=[common], help="optimal offline power allocation")
    p_alloc.add_argument("--p-in", type=str, default=None, help="comma-separated slot rates")
    p_alloc.add_argument("--p-in-file", type=str, default=None, help="profile file, one rate per line")
    p_alloc.set_defaults(func=cmd_allocate)

    p_sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo scheme trials")
    p_sim.add_argument("--scheme", choices=("sat", "bet"), default=None)
    p_sim.add_argument("--n", type=int, default=None, help="blocklength")
    p_sim.add_argument("--p", type=float, default=None, help="mean harvested power")
    p_sim.add_argument("--m", type=int, default=None, help="codebook size (default 16)")
    p_sim.add_argument("--eps", type=float, default=None, help="best-effort power backoff (default p/10)")
    p_sim.add_argument("--h", type=int, default=None, help="saving prefix length (default ceil(n^0.75) for sat)")
    p_sim.add_argument("--trials", type=int, default=None, help="trial count (default 100)")
    p_sim.add_argument("--noise-variance", type=float, default=None, help="channel noise variance (default 1)")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", parents=[common], help="gap sweep or feasibility trend")
    p_sweep.add_argument("--kind", choices=("fig5", "feasibility"), default=None)
    p_sweep.add_argument("--l-slots", type=int, default=None)
    p_sweep.add_argument("--mean", type=float, default=None)
    p_sweep.add_argument("--std-values", type=_float_list, default=None)
    p_sweep.add_argument("--family", choices=("bernoulli-scaled", "uniform"), default=None)
    p_sweep.add_argument("--scheme", choices=("sat", "bet"), default=None)
    p_sweep.add_argument("--p", type=float, default=None)
    p_sweep.add_argument("--eps", type=float, default=None)
    p_sweep.add_argument("--n-values", type=_int_list, default=None)
    p_sweep.add_argument("--trials", type=int, default=None)
    p_sweep.add_argument("--dry-run", action="store_true", help="validate settings and exit")
    p_sweep.set_defaults(func=cmd_sweep)

    p_trace = sub.add_parser("trace", parents=[common], help="dump one arrival trace")
    p_trace.add_argument("--dist", choices=("constant", "exponential", "bernoulli-scaled", "uniform", "custom-empirical"), default=None)
    p_trace.add_argument("--mean", type=float, default=None)
    p_trace.add_argument("--n", type=int, default=None)
    p_trace.add_argument("--p", type=float, default=None, help="bernoulli-scaled success probability")
    p_trace.add_argument("--half-width", type=float, default=None, help="uniform half width")
    p_trace.add_argument("--values", type=_float_list, default=None, help="custom-empirical pool")
    p_trace.set_defaults(func=cmd_trace)

    return parser


def _load_section(path: str, section: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise InputDataError(f"config {path}: {exc}") from None
    if parser.has_section(section):
        return dict(parser[section])
    return {}


def _get(args, cfg: dict, name: str, cast, default=None):
    """Flag value if given, else config value (cast from string), else default."""
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if name in cfg:
        try:
            return cast(cfg[name])
        except (TypeError, ValueError) as exc:
            raise InputDataError(f"config key {name!r}: {exc}") from None
    return default


def _require(values: dict, used_config: bool):
    missing = sorted(k for k, v in values.items() if v is None)
    if not missing:
        return
    message = "missing required settings: " + ", ".join(missing)
    if used_config:
        raise InputDataError(message)
    raise UsageError(message)


def _domain(exc, used_config: bool):
    """Map a core/pydantic validation failure onto the CLI error taxonomy."""
    if isinstance(exc, ValidationError):
        lines = "; ".join(e["msg"] for e in exc.errors())
        exc = ParameterError(lines)
    if used_config:
        return InputDataError(str(exc))
    return UsageError(str(exc))


def _print_kv(pairs) -> None:
    for key, value in pairs:
        if value is None:
            continue
        if isinstance(value, float):
            print(f"{key}: {value:.6f}")
        else:
            print(f"{key}: {value}")


def cmd_allocate(args) -> int:
    cfg = _load_section(args.config, "allocate") if args.config else {}
    p_in_text = _get(args, cfg, "p_in", str)
    p_in_file = _get(args, cfg, "p_in_file", str)
    if (p_in_text is None) == (p_in_file is None):
        raise UsageError("exactly one of --p-in and --p-in-file is required")
    if p_in_file is not None:
        rates = list(io.read_profile_file(p_in_file))
    else:
        try:
            rates = _float_list(p_in_text)
        except ValueError as exc:
            raise _domain(exc, bool(cfg))
    try:
        req = AllocateRequest(p_in=rates)
        resp = handlers.handle_allocate(req)
    except (ValidationError, ParameterError, InputDataError) as exc:
        raise _domain(exc, bool(cfg) or p_in_file is not None)
    _print_kv(
        [
            ("slots", len(resp.powers)),
            ("breakpoints", " ".join(str(b) for b in resp.breakpoints)),
            ("powers", " ".join(f"{p:.6f}" for p in resp.powers) if len(resp.powers) <= 32 else f"({len(resp.powers)} values; use --out)"),
            ("t_lb", resp.t_lb),
            ("t_opt", resp.t_opt),
            ("t_ub", resp.t_ub),
        ]
    )
    if args.out:
        if (args.format or "csv") == "csv":
            io.write_allocation_csv(args.out, rates, resp.powers)
        else:
            io.write_allocation_summary_json(args.out, resp.t_lb, resp.t_opt, resp.t_ub, resp.breakpoints)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_section(args.config, "simulate") if args.config else {}
    used_config = bool(cfg)
    values = {
        "scheme": _get(args, cfg, "scheme", str),
        "n": _get(args, cfg, "n", int),
        "p": _get(args, cfg, "p", float),
    }
    _require(values, used_config)
    try:
        req = SimulateRequest(
            scheme=values["scheme"],
            n=values["n"],
            p=values["p"],
            m=_get(args, cfg, "m", int, 16),
            eps=_get(args, cfg, "eps", float),
            h=_get(args, cfg, "h", int),
            trials=_get(args, cfg, "trials", int, 100),
            seed=_get(args, cfg, "seed", int, 0),
            noise_variance=_get(args, cfg, "noise_variance", float, 1.0),
        )
        resp = handlers.handle_simulate(req, jobs=_get(args, cfg, "jobs", int, 1))
    except (ValidationError, ParameterError) as exc:
        raise _domain(exc, used_config)
    _print_kv(
        [
            ("scheme", resp.scheme),
            ("n", resp.n),
            ("h", resp.h),
            ("M", resp.m),
            ("P", resp.p),
            ("var", resp.var),
            ("noise_variance", resp.noise_variance),
            ("trials", resp.trials),
            ("decode_error_rate", resp.decode_error_rate),
            ("violation_rate", resp.violation_rate),
            ("second_half_infeasible_rate", resp.second_half_infeasible_rate),
            ("infeasible_symbol_fraction", resp.infeasible_symbol_fraction),
            ("achieved_rate_mean", resp.achieved_rate_mean),
        ]
    )
    if args.out:
        rows = [row.model_dump() for row in resp.outcomes]
        if (args.format or "csv") == "csv":
            io.write_outcomes_csv(args.out, rows)
        else:
            meta = {
                "kind": "outcomes",
                "scheme": resp.scheme,
                "n": resp.n,
                "h": resp.h,
                "m": resp.m,
                "p": resp.p,
                "var": resp.var,
                "noise_variance": resp.noise_variance,
                "trials": resp.trials,
                "seed": req.seed,
                "version": __version__,
            }
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump({"meta": meta, "outcomes": rows}, fh, indent=2)
                fh.write("\n")
    return 0


def _sweep_fig5_request(args, cfg) -> Fig5SweepRequest:
    values = {
        "mean": _get(args, cfg, "mean", float),
        "std_values": _get(args, cfg, "std_values", _float_list),
        "trials": _get(args, cfg, "trials", int),
    }
    _require(values, bool(cfg))
    if not values["std_values"]:
        raise _domain(ParameterError("std_values is empty"), bool(cfg))
    return Fig5SweepRequest(
        l_slots=_get(args, cfg, "l_slots", int, 20),
        mean=values["mean"],
        std_values=values["std_values"],
        trials=values["trials"],
        base_seed=_get(args, cfg, "seed", int, 0),
        family=_get(args, cfg, "family", str, "bernoulli-scaled"),
    )


def _sweep_feasibility_request(args, cfg) -> FeasibilityTrendRequest:
    values = {
        "scheme": _get(args, cfg, "scheme", str),
        "p": _get(args, cfg, "p", float),
        "n_values": _get(args, cfg, "n_values", _int_list),
        "trials": _get(args, cfg, "trials", int),
    }
    _require(values, bool(cfg))
    return FeasibilityTrendRequest(
        scheme=values["scheme"],
        p=values["p"],
        n_values=values["n_values"],
        trials=values["trials"],
        base_seed=_get(args, cfg, "seed", int, 0),
        eps=_get(args, cfg, "eps", float),
    )


def cmd_sweep(args) -> int:
    cfg = _load_section(args.config, "sweep") if args.config else {}
    used_config = bool(cfg)
    kind = _get(args, cfg, "kind", str)
    if kind not in ("fig5", "feasibility"):
        raise _domain(
            ParameterError(f"sweep kind must be fig5 or feasibility, got {kind!r}"), used_config
        )
    try:
        if kind == "fig5":
            req = _sweep_fig5_request(args, cfg)
        else:
            req = _sweep_feasibility_request(args, cfg)
    except (ValidationError, ParameterError) as exc:
        raise _domain(exc, used_config)
    if args.dry_run:
        print(f"ok: {kind} sweep settings are valid")
        return 0
    try:
        if kind == "fig5":
            resp = handlers.handle_fig5(req)
            for pt in resp.points:
                print(
                    f"std={pt.std:g} t_lb={pt.t_lb_mean:.6f} "
                    f"t_opt={pt.t_opt_mean:.6f} t_ub={pt.t_ub_mean:.6f}"
                )
            columns = SWEEP_COLUMNS
        else:
            resp = handlers.handle_feasibility(req)
            for pt in resp.points:
                print(
                    f"scheme={pt.scheme} n={pt.n} trials={pt.trials} "
                    f"violation_rate={pt.violation_rate:.6f}"
                )
            columns = FEASIBILITY_COLUMNS
    except (ValidationError, ParameterError) as exc:
        raise _domain(exc, used_config)
    if args.out:
        rows = [pt.model_dump() for pt in resp.points]
        if (args.format or "csv") == "csv":
            io.write_rows_csv(args.out, columns, rows)
        else:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump({"meta": resp.meta, "points": rows}, fh, indent=2)
                fh.write("\n")
    return 0


def cmd_trace(args) -> int:
    cfg = _load_section(args.config, "trace") if args.config else {}
    used_config = bool(cfg)
    values = {
        "mean": _get(args, cfg, "mean", float),
        "n": _get(args, cfg, "n", int),
    }
    _require(values, used_config)
    try:
        spec = ArrivalSpecModel(
            distribution=_get(args, cfg, "dist", str, "exponential"),
            mean=values["mean"],
            p=_get(args, cfg, "p", float),
            half_width=_get(args, cfg, "half_width", float),
            values=_get(args, cfg, "values", _float_list),
        )
        req = TraceRequest(spec=spec, n=values["n"], seed=_get(args, cfg, "seed", int, 0))
        resp = handlers.handle_trace(req)
    except (ValidationError, ParameterError) as exc:
        raise _domain(exc, used_config)
    if args.out:
        if (args.format or "csv") == "csv":
            io.write_trace_csv(args.out, resp.energies)
        else:
            meta = {
                "kind": "trace",
                "distribution": spec.distribution,
                "mean": spec.mean,
                "n": resp.n,
                "seed": resp.seed,
                "version": __version__,
            }
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump({"meta": meta, "energies": resp.energies}, fh, indent=2)
                fh.write("\n")
        print(f"wrote {resp.n} arrivals to {args.out} (sample mean {resp.mean:.6f})")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["e_i"])
        for e in resp.energies:
            writer.writerow([repr(e)])
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise UsageError("a subcommand is required (allocate, simulate, sweep, trace)")
        if getattr(args, "jobs", None) is not None and args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (InputDataError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ResourceLimitError, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - last-resort mapping
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
