"""Handlers shared by the HTTP routes and the CLI.

Each handler takes a request model and returns a response model; domain
errors from the core modules propagate so the caller (app exception
handlers, CLI exit-code mapping) can translate them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .. import __version__
from ..allocation import allocate_optimal, throughput_report
from ..arrivals import ArrivalSpec, empirical_mean, generate_trace
from ..coding import (
    build_codebook,
    capacity,
    default_prefix_length,
    run_best_effort_transmit,
    run_save_and_transmit,
)
from ..errors import ParameterError
from ..experiments import (
    STREAM_CODEBOOK,
    STREAM_MESSAGE,
    STREAM_NOISE,
    STREAM_TRACE,
    SweepSpec,
    run_feasibility_trend,
    run_fig5_sweep,
    stream_seed,
)
from .schemas import (
    AllocateRequest,
    AllocateResponse,
    AllocationRow,
    CapacityResponse,
    FeasibilityRow,
    FeasibilityTrendRequest,
    FeasibilityTrendResponse,
    Fig5SweepRequest,
    Fig5SweepResponse,
    HealthResponse,
    OutcomeRow,
    SimulateRequest,
    SimulateResponse,
    SweepPointModel,
    TraceRequest,
    TraceResponse,
)


def handle_health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


def handle_capacity(p: float) -> CapacityResponse:
    return CapacityResponse(p=p, capacity_bits=capacity(p))


def handle_allocate(req: AllocateRequest) -> AllocateResponse:
    rates = np.asarray(req.p_in, dtype=np.float64)
    allocation = allocate_optimal(rates)
    report = throughput_report(rates)
    cum_in = np.cumsum(rates)
    cum_tr = np.cumsum(allocation.powers)
    rows = [
        AllocationRow(
            slot=k + 1,
            p_in=float(rates[k]),
            p_tr=float(allocation.powers[k]),
            cum_in=float(cum_in[k]),
            cum_tr=float(cum_tr[k]),
            rate_bits=0.5 * math.log2(1.0 + float(allocation.powers[k])),
        )
        for k in range(rates.size)
    ]
    return AllocateResponse(
        powers=[float(p) for p in allocation.powers],
        breakpoints=list(allocation.breakpoints),
        t_lb=report.t_lb,
        t_opt=report.t_opt,
        t_ub=report.t_ub,
        rows=rows,
    )


def handle_trace(req: TraceRequest) -> TraceResponse:
    trace = generate_trace(req.spec.to_spec(), req.n, req.seed)
    return TraceResponse(
        n=req.n,
        seed=req.seed,
        mean=empirical_mean(trace),
        energies=[float(e) for e in trace.energies],
    )


def _simulate_params(req: SimulateRequest) -> tuple[int, float, float]:
    """Resolve (prefix h, codebook variance, eps) for a simulate request."""
    if req.scheme == "sat":
        h = default_prefix_length(req.n) if req.h is None else req.h
        return h, float(req.p), 0.0
    eps = req.p / 10.0 if req.eps is None else req.eps
    if not (0 < eps <= req.p):
        raise ParameterError(f"eps must be in (0, p], got {eps!r}")
    h = 0 if req.h is None else req.h
    return h, float(req.p - eps), eps


def _simulate_range(payload: dict, t0: int, t1: int) -> list[dict]:
    """Run trials t0..t1-1 and return row dicts plus aggregate ingredients."""
    req = SimulateRequest(**payload)
    h, var, _ = _simulate_params(req)
    book = build_codebook(req.n, req.m, var, prefix_zeros=h, seed=stream_seed(req.seed, STREAM_CODEBOOK, 0))
    spec = req.arrival.to_spec() if req.arrival is not None else ArrivalSpec.exponential(req.p)
    half = req.n // 2
    rows = []
    for t in range(t0, t1):
        msg = int(np.random.default_rng(stream_seed(req.seed, STREAM_MESSAGE, t)).integers(0, req.m))
        trace = generate_trace(spec, req.n, stream_seed(req.seed, STREAM_TRACE, t))
        noise_seed = stream_seed(req.seed, STREAM_NOISE, t)
        if req.scheme == "sat":
            outcome = run_save_and_transmit(book, msg, trace, noise_seed, req.noise_variance)
        else:
            outcome = run_best_effort_transmit(book, msg, trace, noise_seed, req.noise_variance)
        rows.append(
            {
                "trial": t,
                "scheme": req.scheme,
                "n": req.n,
                "h": h,
                "P": req.p,
                "var": var,
                "msg": outcome.message_sent,
                "decoded": outcome.message_decoded,
                "error": outcome.decode_error,
                "infeasible_count": outcome.mask.infeasible_count,
                "first_violation": outcome.feasibility.first_violation_index,
                "feasible": outcome.feasibility.feasible,
                "second_half_ok": bool(np.all(outcome.mask.sent[half:])),
                "achieved_rate": outcome.achieved_rate,
            }
        )
    return rows


def handle_simulate(req: SimulateRequest, jobs: int = 1) -> SimulateResponse:
    """Monte Carlo over trials; jobs > 1 splits the trial range across
    processes with identical results (per-trial seeding)."""
    if not isinstance(jobs, int) or jobs < 1:
        raise ParameterError(f"jobs must be a positive integer, got {jobs!r}")
    h, var, _ = _simulate_params(req)
    if not (0 <= h <= req.n):
        raise ParameterError(f"prefix length must satisfy 0 <= h <= n, got {h}")
    payload = req.model_dump()
    jobs = min(jobs, req.trials)
    if jobs == 1:
        rows = _simulate_range(payload, 0, req.trials)
    else:
        bounds = np.linspace(0, req.trials, jobs + 1, dtype=int)
        ranges = [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_simulate_range, payload, a, b) for a, b in ranges]
            rows = [row for fut in futures for row in fut.result()]
    trials = req.trials
    decode_error_rate = sum(r["error"] for r in rows) / trials
    infeasible_fraction = sum(r["infeasible_count"] for r in rows) / (trials * req.n)
    achieved = sum(r["achieved_rate"] for r in rows) / trials
    violation_rate = None
    second_half_rate = None
    if req.scheme == "sat":
        violation_rate = sum(not r["feasible"] for r in rows) / trials
    else:
        second_half_rate = sum(not r["second_half_ok"] for r in rows) / trials
    outcomes = [
        OutcomeRow(**{k: r[k] for k in (
            "trial", "scheme", "n", "h", "P", "var", "msg", "decoded",
            "error", "infeasible_count", "first_violation",
        )})
        for r in rows
    ]
    return SimulateResponse(
        scheme=req.scheme,
        n=req.n,
        h=h,
        m=req.m,
        p=req.p,
        var=var,
        noise_variance=req.noise_variance,
        trials=trials,
        decode_error_rate=decode_error_rate,
        infeasible_symbol_fraction=infeasible_fraction,
        violation_rate=violation_rate,
        second_half_infeasible_rate=second_half_rate,
        achieved_rate_mean=achieved,
        outcomes=outcomes,
    )


def handle_fig5(req: Fig5SweepRequest) -> Fig5SweepResponse:
    spec = SweepSpec(
        l_slots=req.l_slots,
        mean=req.mean,
        std_values=tuple(req.std_values),
        trials=req.trials,
        base_seed=req.base_seed,
        family=req.family,
    )
    result = run_fig5_sweep(spec)
    return Fig5SweepResponse(
        points=[SweepPointModel(**vars(pt)) for pt in result.points],
        meta=result.meta,
    )


def handle_feasibility(req: FeasibilityTrendRequest) -> FeasibilityTrendResponse:
    result = run_feasibility_trend(
        req.scheme, req.p, req.n_values, req.trials, base_seed=req.base_seed, eps=req.eps
    )
    return FeasibilityTrendResponse(
        points=[FeasibilityRow(**vars(pt)) for pt in result.points],
        meta=result.meta,
    )
