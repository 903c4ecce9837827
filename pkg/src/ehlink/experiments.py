"""Monte Carlo drivers: throughput-gap sweeps and feasibility trends.

Per-trial randomness is derived from a base seed with stream_seed, which
feeds (base_seed, stream, trial) to numpy's SeedSequence; distinct streams
decorrelate trace/noise/codebook/message draws, and reusing the same trial
seeds at every sweep point gives common random numbers, so the gap curves
are compared on identical profile draws.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .allocation import throughput_report
from .arrivals import ArrivalSpec, generate_slot_profile, generate_trace
from .battery import check_causal_feasibility, run_best_effort
from .coding import build_codebook, default_prefix_length
from .errors import InputDataError, ParameterError

STREAM_TRACE = 0
STREAM_NOISE = 1
STREAM_CODEBOOK = 2
STREAM_MESSAGE = 3

SWEEP_COLUMNS = (
    "std",
    "trials",
    "t_lb_mean",
    "t_lb_se",
    "t_opt_mean",
    "t_opt_se",
    "t_ub_mean",
    "t_ub_se",
)
FEASIBILITY_COLUMNS = ("scheme", "n", "trials", "violation_rate")


def stream_seed(base_seed: int, stream: int, index: int = 0) -> tuple[int, int, int]:
    """Entropy tuple for numpy.random.default_rng: (base_seed, stream, index)."""
    return (int(base_seed), int(stream), int(index))


@dataclass(frozen=True)
class SweepSpec:
    """Parameters of a throughput-gap sweep over arrival burstiness."""

    l_slots: int
    mean: float
    std_values: tuple[float, ...]
    trials: int
    base_seed: int = 0
    family: str = "bernoulli-scaled"

    def __post_init__(self) -> None:
        if not isinstance(self.l_slots, (int, np.integer)) or self.l_slots < 1:
            raise ParameterError(f"l_slots must be a positive integer, got {self.l_slots!r}")
        if not (self.mean >= 0) or math.isnan(self.mean):
            raise ParameterError(f"mean must be >= 0, got {self.mean!r}")
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ParameterError(f"trials must be a positive integer, got {self.trials!r}")
        object.__setattr__(self, "std_values", tuple(float(s) for s in self.std_values))
        for s in self.std_values:
            if not (s >= 0) or math.isnan(s):
                raise ParameterError(f"std values must be >= 0, got {s!r}")


@dataclass(frozen=True)
class SweepPoint:
    std: float
    trials: int
    t_lb_mean: float
    t_lb_se: float
    t_opt_mean: float
    t_opt_se: float
    t_ub_mean: float
    t_ub_se: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    meta: dict


@dataclass(frozen=True)
class FeasibilityPoint:
    scheme: str
    n: int
    trials: int
    violation_rate: float


@dataclass(frozen=True)
class FeasibilityResult:
    points: tuple[FeasibilityPoint, ...]
    meta: dict


def arrival_spec_for(mean: float, std: float, family: str = "bernoulli-scaled") -> ArrivalSpec:
    """ArrivalSpec with the requested mean and standard deviation.

    std == 0 degenerates to a constant arrival for any family. The
    bernoulli-scaled family hits any (mean, std) with mean > 0 exactly via
    p = mean^2 / (mean^2 + std^2); the uniform family only reaches
    std <= mean/sqrt(3) and errors beyond that.
    """
    if not (mean >= 0) or math.isnan(mean):
        raise ParameterError(f"mean must be >= 0, got {mean!r}")
    if not (std >= 0) or math.isnan(std):
        raise ParameterError(f"std must be >= 0, got {std!r}")
    if std == 0:
        return ArrivalSpec.constant(mean)
    if family == "bernoulli-scaled":
        if mean == 0:
            raise ParameterError("mean 0 with std > 0 is not realizable")
        p = mean * mean / (mean * mean + std * std)
        return ArrivalSpec.bernoulli_scaled(mean, p)
    if family == "uniform":
        half_width = std * math.sqrt(3.0)
        if half_width > mean:
            raise ParameterError(
                f"uniform arrivals cannot realize std={std} at mean={mean} "
                f"(needs std <= mean/sqrt(3))"
            )
        return ArrivalSpec.uniform(mean, half_width)
    raise ParameterError(f"unknown sweep family {family!r}")


def fig5_trial(l_slots: int, mean: float, std: float, family: str, seed) -> tuple[float, float, float]:
    """Draw one profile and return (t_lb, t_opt, t_ub)."""
    spec = arrival_spec_for(mean, std, family)
    profile = generate_slot_profile(spec, l_slots, seed)
    report = throughput_report(profile)
    return report.t_lb, report.t_opt, report.t_ub


def _point(std: float, samples: np.ndarray) -> SweepPoint:
    trials = samples.shape[0]
    means = samples.mean(axis=0)
    if trials > 1:
        ses = samples.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        ses = np.zeros(3)
    return SweepPoint(
        std=float(std),
        trials=trials,
        t_lb_mean=float(means[0]),
        t_lb_se=float(ses[0]),
        t_opt_mean=float(means[1]),
        t_opt_se=float(ses[1]),
        t_ub_mean=float(means[2]),
        t_ub_se=float(ses[2]),
    )


def run_fig5_sweep(spec: SweepSpec) -> SweepResult:
    """Sweep arrival std at fixed mean, averaging the throughput sandwich.

    Trial t uses profile seed stream_seed(base_seed, STREAM_TRACE, t) at
    every std point (common random numbers).
    """
    points = []
    for std in spec.std_values:
        samples = np.empty((spec.trials, 3))
        for t in range(spec.trials):
            seed = stream_seed(spec.base_seed, STREAM_TRACE, t)
            samples[t] = fig5_trial(spec.l_slots, spec.mean, std, spec.family, seed)
        points.append(_point(std, samples))
    meta = {
        "kind": "fig5",
        "l_slots": int(spec.l_slots),
        "mean": float(spec.mean),
        "std_values": [float(s) for s in spec.std_values],
        "trials": int(spec.trials),
        "base_seed": int(spec.base_seed),
        "family": spec.family,
        "version": __version__,
        "seed_rule": "default_rng((base_seed, stream, trial))",
    }
    return SweepResult(points=tuple(points), meta=meta)


def run_feasibility_trend(
    scheme: str,
    p: float,
    n_values,
    trials: int,
    base_seed: int = 0,
    eps: float | None = None,
    arrival_spec: ArrivalSpec | None = None,
    constant_symbol_energy: float | None = None,
) -> FeasibilityResult:
    """Empirical violation rate of a scheme as blocklength grows.

    For save-and-transmit a violation is a codeword that is infeasible
    against its trace despite the saving prefix. For best-effort it is any
    blocked symbol in the second half of the block, where the scheme should
    have stockpiled enough margin. Codewords are drawn fresh per trial;
    arrivals default to exponential with mean p. constant_symbol_energy is
    a degenerate test hook that replaces the Gaussian data symbols with a
    fixed per-symbol energy.
    """
    if scheme not in ("sat", "bet"):
        raise ParameterError(f"scheme must be 'sat' or 'bet', got {scheme!r}")
    if not (p >= 0) or math.isnan(p):
        raise ParameterError(f"average power must be >= 0, got {p!r}")
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials!r}")
    n_values = [int(n) for n in n_values]
    if not n_values or any(n < 1 for n in n_values):
        raise ParameterError("n_values must be a non-empty list of positive integers")
    if scheme == "bet":
        if eps is None:
            eps = p / 10.0
        if not (0 < eps <= p):
            raise ParameterError(f"eps must be in (0, p], got {eps!r}")
    if constant_symbol_energy is not None and not (constant_symbol_energy >= 0):
        raise ParameterError("constant_symbol_energy must be >= 0")
    spec = arrival_spec if arrival_spec is not None else ArrivalSpec.exponential(p)
    points = []
    for n in n_values:
        violations = 0
        h = default_prefix_length(n) if scheme == "sat" else 0
        variance = p if scheme == "sat" else p - eps
        for t in range(trials):
            x_sq = _trial_symbol_energies(
                n, h, variance, constant_symbol_energy, stream_seed(base_seed, STREAM_CODEBOOK, t)
            )
            trace = generate_trace(spec, n, stream_seed(base_seed, STREAM_TRACE, t))
            if scheme == "sat":
                if not check_causal_feasibility(x_sq, trace).feasible:
                    violations += 1
            else:
                mask = run_best_effort(x_sq, trace)
                if not bool(np.all(mask.sent[n // 2:])):
                    violations += 1
        points.append(FeasibilityPoint(scheme, n, trials, violations / trials))
    meta = {
        "kind": "feasibility",
        "scheme": scheme,
        "p": float(p),
        "eps": None if scheme == "sat" else float(eps),
        "n_values": n_values,
        "trials": int(trials),
        "base_seed": int(base_seed),
        "arrival": spec.distribution,
        "version": __version__,
        "seed_rule": "default_rng((base_seed, stream, trial))",
    }
    return FeasibilityResult(points=tuple(points), meta=meta)


def _trial_symbol_energies(n, h, variance, constant_symbol_energy, seed) -> np.ndarray:
    if constant_symbol_energy is not None:
        x_sq = np.full(n, float(constant_symbol_energy))
        x_sq[:h] = 0.0
        return x_sq
    book = build_codebook(n, 1, variance, prefix_zeros=h, seed=seed)
    codeword = book.symbols[0]
    return codeword * codeword


def emit_csv(result, path) -> None:
    """Write a sweep or feasibility result as CSV (no meta block)."""
    from . import io as _io

    if isinstance(result, SweepResult):
        _io.write_rows_csv(path, SWEEP_COLUMNS, [asdict(pt) for pt in result.points])
    elif isinstance(result, FeasibilityResult):
        _io.write_rows_csv(path, FEASIBILITY_COLUMNS, [asdict(pt) for pt in result.points])
    else:
        raise ParameterError(f"cannot serialize {type(result).__name__}")


def emit_json(result, path) -> None:
    """Write a sweep or feasibility result as JSON with its meta block."""
    if not isinstance(result, (SweepResult, FeasibilityResult)):
        raise ParameterError(f"cannot serialize {type(result).__name__}")
    payload = {"meta": result.meta, "points": [asdict(pt) for pt in result.points]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_csv(path):
    """Parse a CSV written by emit_csv; the header decides the result type.

    CSV carries no meta, so the returned result has an empty meta dict.
    """
    from . import io as _io

    header, rows = _io.read_rows_csv(path)
    if tuple(header) == SWEEP_COLUMNS:
        points = tuple(
            SweepPoint(
                std=float(r["std"]),
                trials=int(r["trials"]),
                t_lb_mean=float(r["t_lb_mean"]),
                t_lb_se=float(r["t_lb_se"]),
                t_opt_mean=float(r["t_opt_mean"]),
                t_opt_se=float(r["t_opt_se"]),
                t_ub_mean=float(r["t_ub_mean"]),
                t_ub_se=float(r["t_ub_se"]),
            )
            for r in rows
        )
        return SweepResult(points=points, meta={})
    if tuple(header) == FEASIBILITY_COLUMNS:
        points = tuple(
            FeasibilityPoint(
                scheme=r["scheme"],
                n=int(r["n"]),
                trials=int(r["trials"]),
                violation_rate=float(r["violation_rate"]),
            )
            for r in rows
        )
        return FeasibilityResult(points=points, meta={})
    raise InputDataError(f"unrecognized CSV header {header!r} in {path}")


def read_json(path):
    """Parse a JSON file written by emit_json."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or "meta" not in payload or "points" not in payload:
        raise InputDataError(f"{path} is not a result file (missing meta/points)")
    kind = payload["meta"].get("kind")
    if kind == "fig5":
        points = tuple(SweepPoint(**pt) for pt in payload["points"])
        return SweepResult(points=points, meta=payload["meta"])
    if kind == "feasibility":
        points = tuple(FeasibilityPoint(**pt) for pt in payload["points"])
        return FeasibilityResult(points=points, meta=payload["meta"])
    raise InputDataError(f"unrecognized result kind {kind!r} in {path}")
