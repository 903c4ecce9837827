"""Offline power allocation over a known slot-scale recharge profile.

With cumulative arrivals e(k) (in rate units, slot duration cancels), the
optimal transmit schedule is the tightest convex minorant of the staircase:
starting from the last breakpoint, the next one is the slot that minimizes
the chord slope, and the power over the span is that slope. Powers come out
non-decreasing, the battery drains exactly at each breakpoint, and the whole
budget is spent by slot L. Throughput is measured in bits per channel use
per slot, 0.5*log2(1+P), so Jensen sandwiches the optimum between the
per-slot mean rate and the rate of the averaged profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .arrivals import SlotProfile
from .errors import InputDataError, ParameterError, ResourceLimitError

SLOPE_TIE_TOLERANCE = 1e-9

# 2^(L-1) candidate breakpoint sets; above L=20 the sweep stops being a
# sane oracle.
MAX_BRUTEFORCE_SLOTS = 20


@dataclass(frozen=True)
class CumulativeCurve:
    """Cumulative arrival staircase e(0..L) with e(0) = 0."""

    points: np.ndarray


@dataclass(frozen=True)
class PowerAllocation:
    """Per-slot transmit powers with the breakpoints of the constant runs.

    breakpoints always include 0 and L; powers are constant on each span
    between consecutive breakpoints.
    """

    powers: np.ndarray
    breakpoints: tuple[int, ...]
    throughput: float


@dataclass(frozen=True)
class ThroughputReport:
    t_lb: float
    t_opt: float
    t_ub: float


@dataclass(frozen=True)
class SmoothingCheck:
    """Comparison of a base allocation against one constant-segment replacement."""

    base_throughput: float
    smoothed_throughput: float
    constant: float
    improved: bool


def _rates(profile) -> np.ndarray:
    if isinstance(profile, SlotProfile):
        return profile.rates
    rates = np.asarray(profile, dtype=np.float64)
    if rates.ndim != 1 or rates.size == 0:
        raise InputDataError("profile must be a non-empty one-dimensional sequence")
    if np.any(~np.isfinite(rates)) or np.any(rates < 0):
        raise InputDataError("profile rates must be finite and >= 0")
    return rates


def cumulative(profile) -> CumulativeCurve:
    """Cumulative staircase of a profile, one point per slot boundary."""
    rates = _rates(profile)
    points = np.concatenate(([0.0], np.cumsum(rates)))
    points.setflags(write=False)
    return CumulativeCurve(points=points)


def throughput(powers) -> float:
    """Mean of 0.5*log2(1+P_i) over the slots, in bits per channel use."""
    p = np.asarray(powers, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise InputDataError("powers must be a non-empty one-dimensional sequence")
    if np.any(~np.isfinite(p)) or np.any(p < 0):
        raise ParameterError("powers must be finite and >= 0")
    return float(np.mean(0.5 * np.log2(1.0 + p)))


def lower_bound(profile) -> float:
    """Throughput of the spend-as-it-comes schedule P_tr = P_in."""
    return throughput(_rates(profile))


def upper_bound(profile) -> float:
    """Rate of the fully averaged profile, 0.5*log2(1 + mean(P_in))."""
    rates = _rates(profile)
    return 0.5 * math.log2(1.0 + float(np.mean(rates)))


def allocate_optimal(profile) -> PowerAllocation:
    """Staircase water-filling by iterated minimum chord slopes.

    From breakpoint n0 the next breakpoint is argmin over k > n0 of
    (e(k) - e(n0)) / (k - n0); slopes within SLOPE_TIE_TOLERANCE of the
    minimum tie and resolve to the largest k, which merges collinear spans.
    """
    rates = _rates(profile)
    l_slots = rates.size
    e = cumulative(rates).points
    powers = np.empty(l_slots, dtype=np.float64)
    breakpoints = [0]
    n0 = 0
    while n0 < l_slots:
        spans = np.arange(n0 + 1, l_slots + 1)
        slopes = (e[n0 + 1:] - e[n0]) / (spans - n0)
        best = float(np.min(slopes))
        tied = np.nonzero(slopes <= best + SLOPE_TIE_TOLERANCE)[0]
        k = int(spans[tied[-1]])
        powers[n0:k] = (e[k] - e[n0]) / (k - n0)
        breakpoints.append(k)
        n0 = k
    powers.setflags(write=False)
    return PowerAllocation(
        powers=powers, breakpoints=tuple(breakpoints), throughput=throughput(powers)
    )


def _causal_feasible(cum_tr: np.ndarray, e: np.ndarray, tolerance: float) -> bool:
    return bool(np.all(cum_tr <= e[1:] + tolerance))


def allocate_bruteforce(profile, tolerance: float = SLOPE_TIE_TOLERANCE) -> PowerAllocation:
    """Exhaustive oracle: try every breakpoint set, keep the best feasible one.

    Candidate allocations hold the segment mean of the profile on each
    segment (any feasible schedule is dominated by one of this form).
    Throughput ties within tolerance resolve to the lexicographically
    smallest breakpoint tuple. Only sensible for small L.
    """
    rates = _rates(profile)
    l_slots = rates.size
    if l_slots > MAX_BRUTEFORCE_SLOTS:
        raise ResourceLimitError(
            f"brute force over {l_slots} slots exceeds the {MAX_BRUTEFORCE_SLOTS}-slot budget"
        )
    e = cumulative(rates).points
    best_tp = -math.inf
    best_bps: tuple[int, ...] | None = None
    best_powers: np.ndarray | None = None
    interior = range(1, l_slots)
    for r in range(l_slots):
        for mids in combinations(interior, r):
            bps = (0, *mids, l_slots)
            edges = np.asarray(bps)
            lengths = np.diff(edges)
            means = np.diff(e[edges]) / lengths
            powers = np.repeat(means, lengths)
            if not _causal_feasible(np.cumsum(powers), e, tolerance):
                continue
            tp = throughput(powers)
            if tp > best_tp + tolerance or (
                abs(tp - best_tp) <= tolerance and (best_bps is None or bps < best_bps)
            ):
                best_tp = tp
                best_bps = bps
                best_powers = powers
    best_powers.setflags(write=False)
    return PowerAllocation(powers=best_powers, breakpoints=best_bps, throughput=best_tp)


def throughput_report(profile) -> ThroughputReport:
    """Bounds sandwich around the optimal throughput for one profile."""
    rates = _rates(profile)
    return ThroughputReport(
        t_lb=lower_bound(rates),
        t_opt=allocate_optimal(rates).throughput,
        t_ub=upper_bound(rates),
    )


def check_smoothing_improvement(
    base_powers,
    start: int,
    end: int,
    profile,
    tolerance: float = SLOPE_TIE_TOLERANCE,
) -> SmoothingCheck:
    """Replace base_powers[start..end] (1-based, inclusive) by its mean and
    compare throughputs.

    Preconditions are enforced: the base must be causal-feasible, the
    segment must actually change under replacement, and the replacement
    must stay causal-feasible. When they hold, strict concavity makes the
    smoothed schedule strictly better; the verdict is returned rather than
    asserted.
    """
    rates = _rates(profile)
    base = np.asarray(base_powers, dtype=np.float64)
    if base.shape != rates.shape:
        raise InputDataError(
            f"base allocation has {base.size} slots but the profile has {rates.size}"
        )
    if np.any(~np.isfinite(base)) or np.any(base < 0):
        raise ParameterError("base powers must be finite and >= 0")
    l_slots = rates.size
    if not (isinstance(start, (int, np.integer)) and isinstance(end, (int, np.integer))):
        raise ParameterError("segment bounds must be integers")
    if not (1 <= start < end <= l_slots):
        raise ParameterError(f"need 1 <= start < end <= {l_slots}, got [{start}, {end}]")
    e = cumulative(rates).points
    if not _causal_feasible(np.cumsum(base), e, tolerance):
        raise ParameterError("base allocation is not causal-feasible")
    segment = base[start - 1:end]
    constant = float(np.mean(segment))
    smoothed = base.copy()
    smoothed[start - 1:end] = constant
    if float(np.max(np.abs(smoothed - base))) <= tolerance:
        raise ParameterError("segment is already constant; replacement changes nothing")
    if not _causal_feasible(np.cumsum(smoothed), e, tolerance):
        raise ParameterError("constant replacement is not causal-feasible")
    base_tp = throughput(base)
    smoothed_tp = throughput(smoothed)
    return SmoothingCheck(
        base_throughput=base_tp,
        smoothed_throughput=smoothed_tp,
        constant=constant,
        improved=smoothed_tp > base_tp,
    )
