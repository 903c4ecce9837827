"""Energy ledger: causality checks and battery simulation.

A transmitted sequence is causal-feasible when every prefix satisfies
sum(X_i^2) <= sum(E_i); the slack is tracked with compensated cumulative
sums so the sign stays trustworthy out to millions of symbols. The best
effort policy spends x^2 on a symbol only when the battery (after that
symbol's harvest is credited) can cover it, and otherwise sends nothing and
keeps the charge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrivals import ArrivalTrace
from .errors import InputDataError, ParameterError

FEASIBILITY_TOLERANCE = 1e-9

# np.cumsum error grows with run length; restarting every _CHUNK entries and
# carrying the running total with a Neumaier accumulator keeps prefix sums
# accurate enough to compare against FEASIBILITY_TOLERANCE at n ~ 1e6.
_CHUNK = 2048


def compensated_cumsum(values: np.ndarray) -> np.ndarray:
    """Prefix sums of a float64 vector with compensated chunk carries."""
    x = np.asarray(values, dtype=np.float64)
    out = np.empty_like(x)
    total = 0.0
    comp = 0.0
    for a in range(0, x.size, _CHUNK):
        b = min(a + _CHUNK, x.size)
        local = np.cumsum(x[a:b])
        out[a:b] = (total + comp) + local
        chunk = float(local[-1])
        t = total + chunk
        if abs(total) >= abs(chunk):
            comp += (total - t) + chunk
        else:
            comp += (chunk - t) + total
        total = t
    return out


@dataclass(frozen=True)
class BatteryState:
    """Stored energy, optionally capped at a finite capacity."""

    stored: float = 0.0
    capacity: float = math.inf

    def __post_init__(self) -> None:
        if not (self.stored >= 0 and not math.isnan(self.stored)):
            raise ParameterError(f"stored energy must be >= 0, got {self.stored!r}")
        if not (self.capacity > 0) or math.isnan(self.capacity):
            raise ParameterError(f"capacity must be > 0, got {self.capacity!r}")
        if self.stored > self.capacity:
            raise ParameterError("stored energy exceeds capacity")


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of a causality check.

    first_violation_index is 1-based (channel-use numbering) and None when
    the sequence is feasible. slack[i] is the cumulative energy margin after
    use i+1.
    """

    feasible: bool
    first_violation_index: int | None
    slack: np.ndarray


@dataclass(frozen=True)
class TransmissionMask:
    """Per-symbol outcome of a best-effort run.

    battery_trajectory[i] is the stored energy after symbol i+1 has been
    handled (harvest credited, spend applied when sent[i] is True).
    """

    sent: np.ndarray
    infeasible_count: int
    battery_trajectory: np.ndarray


def _energy_vector(trace, what: str) -> np.ndarray:
    if isinstance(trace, ArrivalTrace):
        arr = trace.energies
    else:
        arr = trace
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 1:
        raise InputDataError(f"{what} must be one-dimensional")
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise InputDataError(f"{what} must be finite and >= 0")
    return arr


def check_causal_feasibility(symbol_energies, trace, tolerance: float = FEASIBILITY_TOLERANCE) -> FeasibilityReport:
    """Check sum(x_sq[:k]) <= sum(e[:k]) for every prefix k.

    tolerance is an absolute slack floor: a prefix counts as violated only
    when its slack drops below -tolerance.
    """
    if not (tolerance >= 0):
        raise ParameterError(f"tolerance must be >= 0, got {tolerance!r}")
    x_sq = _energy_vector(symbol_energies, "symbol energies")
    e = _energy_vector(trace, "arrival energies")
    if x_sq.size != e.size:
        raise InputDataError(f"length mismatch: {x_sq.size} symbol energies vs {e.size} arrivals")
    if x_sq.size == 0:
        raise InputDataError("empty sequences")
    slack = compensated_cumsum(e - x_sq)
    slack.setflags(write=False)
    bad = np.nonzero(slack < -tolerance)[0]
    if bad.size:
        return FeasibilityReport(False, int(bad[0]) + 1, slack)
    return FeasibilityReport(True, None, slack)


def best_effort_step(state: BatteryState, e_i: float, x_sq: float) -> tuple[BatteryState, bool]:
    """Advance the battery one channel use.

    The arriving energy e_i is credited first; the symbol is sent iff the
    available charge covers x_sq. Overflow beyond capacity is dropped.
    """
    if not (e_i >= 0) or not (x_sq >= 0):
        raise ParameterError("energies must be >= 0")
    available = state.stored + e_i
    sent = available >= x_sq
    stored = available - x_sq if sent else available
    if stored > state.capacity:
        stored = state.capacity
    return BatteryState(stored, state.capacity), bool(sent)


def _run_best_effort_scalar(x_sq: np.ndarray, e: np.ndarray, state: BatteryState) -> TransmissionMask:
    n = x_sq.size
    sent = np.zeros(n, dtype=bool)
    trajectory = np.empty(n, dtype=np.float64)
    for i in range(n):
        state, ok = best_effort_step(state, float(e[i]), float(x_sq[i]))
        sent[i] = ok
        trajectory[i] = state.stored
    return _finish_mask(sent, trajectory)


def _finish_mask(sent: np.ndarray, trajectory: np.ndarray) -> TransmissionMask:
    sent.setflags(write=False)
    trajectory.setflags(write=False)
    count = int(np.count_nonzero(~sent))
    return TransmissionMask(sent=sent, infeasible_count=count, battery_trajectory=trajectory)


def run_best_effort(symbol_energies, trace, initial: BatteryState | None = None) -> TransmissionMask:
    """Simulate the best-effort policy over a whole trace.

    The infinite-capacity path runs vectorized: within a chunk the battery
    is a plain cumulative sum of (e - x_sq) until it first goes negative,
    at which point that symbol is blocked (its spend refunded, its harvest
    kept) and the scan restarts after it. Finite capacity falls back to the
    stepwise loop because overflow clipping breaks the cumsum structure.
    """
    x_sq = _energy_vector(symbol_energies, "symbol energies")
    e = _energy_vector(trace, "arrival energies")
    if x_sq.size != e.size:
        raise InputDataError(f"length mismatch: {x_sq.size} symbol energies vs {e.size} arrivals")
    if x_sq.size == 0:
        raise InputDataError("empty sequences")
    state = initial if initial is not None else BatteryState()
    if math.isfinite(state.capacity):
        return _run_best_effort_scalar(x_sq, e, state)

    n = x_sq.size
    sent = np.ones(n, dtype=bool)
    trajectory = np.empty(n, dtype=np.float64)
    stored = float(state.stored)
    for a in range(0, n, _CHUNK):
        b = min(a + _CHUNK, n)
        delta = e[a:b] - x_sq[a:b]
        start = 0
        while start < b - a:
            level = stored + np.cumsum(delta[start:])
            neg = np.nonzero(level < 0.0)[0]
            if neg.size == 0:
                trajectory[a + start:b] = level
                stored = float(level[-1])
                break
            j = int(neg[0])
            if j > 0:
                trajectory[a + start:a + start + j] = level[:j]
                stored = float(level[j - 1])
            # blocked symbol: harvest only, spend refunded
            stored += float(e[a + start + j])
            trajectory[a + start + j] = stored
            sent[a + start + j] = False
            start += j + 1
    return _finish_mask(sent, trajectory)
