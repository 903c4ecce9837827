"""Stochastic energy-arrival processes at both time scales.

Harvested energy reaches the transmitter as an i.i.d. non-negative sequence.
At the symbol scale a trace holds one arrival per channel use; at the slot
scale a profile holds average recharge rates for a small number of long
slots. Generation is deterministic given (spec, length, seed). Seeds may be
plain ints or tuples of ints; tuples are fed to numpy's SeedSequence, which
is how per-trial streams are derived (see experiments.stream_seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

DISTRIBUTIONS = (
    "constant",
    "exponential",
    "bernoulli-scaled",
    "uniform",
    "custom-empirical",
)


@dataclass(frozen=True)
class ArrivalSpec:
    """Marginal distribution of one energy arrival.

    Parameters
    ----------
    distribution : str
        One of DISTRIBUTIONS.
    mean : float
        Average harvested energy per draw. Must be >= 0.
    p : float, optional
        Success probability for bernoulli-scaled: the draw is mean/p with
        probability p and 0 otherwise, so the mean is exact for any p.
    half_width : float, optional
        Uniform support is [mean - half_width, mean + half_width]; the
        half-width may not exceed the mean (arrivals stay non-negative).
    values : tuple of float, optional
        Pool for custom-empirical; draws resample the pool uniformly with
        replacement.
    """

    distribution: str
    mean: float
    p: float | None = None
    half_width: float | None = None
    values: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.distribution not in DISTRIBUTIONS:
            raise ParameterError(f"unknown distribution {self.distribution!r}")
        if not (isinstance(self.mean, (int, float)) and self.mean >= 0 and math.isfinite(self.mean)):
            raise ParameterError(f"mean must be finite and >= 0, got {self.mean!r}")
        if self.distribution == "bernoulli-scaled":
            if self.p is None or not (0 < self.p <= 1):
                raise ParameterError(f"bernoulli-scaled needs p in (0, 1], got {self.p!r}")
        if self.distribution == "uniform":
            if self.half_width is None or not (0 <= self.half_width <= self.mean):
                raise ParameterError(
                    f"uniform needs 0 <= half_width <= mean, got half_width={self.half_width!r}"
                )
        if self.distribution == "custom-empirical":
            if not self.values:
                raise ParameterError("custom-empirical needs a non-empty value pool")
            if any(not (v >= 0 and math.isfinite(v)) for v in self.values):
                raise ParameterError("custom-empirical values must be finite and >= 0")

    @classmethod
    def constant(cls, mean: float) -> "ArrivalSpec":
        return cls("constant", mean)

    @classmethod
    def exponential(cls, mean: float) -> "ArrivalSpec":
        return cls("exponential", mean)

    @classmethod
    def bernoulli_scaled(cls, mean: float, p: float) -> "ArrivalSpec":
        return cls("bernoulli-scaled", mean, p=p)

    @classmethod
    def uniform(cls, mean: float, half_width: float) -> "ArrivalSpec":
        return cls("uniform", mean, half_width=half_width)

    @classmethod
    def custom_empirical(cls, values) -> "ArrivalSpec":
        pool = tuple(float(v) for v in values)
        if not pool:
            raise ParameterError("custom-empirical needs a non-empty value pool")
        return cls("custom-empirical", float(np.mean(pool)), values=pool)

    @property
    def std(self) -> float:
        """Analytic standard deviation of one draw."""
        if self.distribution == "constant":
            return 0.0
        if self.distribution == "exponential":
            return self.mean
        if self.distribution == "bernoulli-scaled":
            return self.mean * math.sqrt((1.0 - self.p) / self.p)
        if self.distribution == "uniform":
            return self.half_width / math.sqrt(3.0)
        return float(np.std(self.values))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n arrivals with the given generator."""
        if self.distribution == "constant":
            return np.full(n, float(self.mean))
        if self.distribution == "exponential":
            return rng.exponential(self.mean, n)
        if self.distribution == "bernoulli-scaled":
            hits = rng.random(n) < self.p
            return np.where(hits, self.mean / self.p, 0.0)
        if self.distribution == "uniform":
            lo = self.mean - self.half_width
            hi = self.mean + self.half_width
            return rng.uniform(lo, hi, n)
        pool = np.asarray(self.values, dtype=np.float64)
        return pool[rng.integers(0, pool.size, n)]


@dataclass(frozen=True)
class ArrivalTrace:
    """One realized i.i.d. arrival sequence at the symbol scale."""

    energies: np.ndarray
    seed: object
    spec: ArrivalSpec


@dataclass(frozen=True)
class SlotProfile:
    """Known per-slot recharge rates for the offline allocation problem."""

    rates: np.ndarray
    slot_duration: float = 1.0

    def __post_init__(self) -> None:
        rates = np.asarray(self.rates, dtype=np.float64)
        if rates.ndim != 1 or rates.size == 0:
            raise ParameterError("profile needs at least one slot")
        if np.any(~np.isfinite(rates)) or np.any(rates < 0):
            raise ParameterError("slot rates must be finite and >= 0")
        if not (self.slot_duration > 0):
            raise ParameterError(f"slot_duration must be > 0, got {self.slot_duration!r}")
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)


def _check_length(n: int, what: str) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"{what} must be a positive integer, got {n!r}")
    return int(n)


def generate_trace(spec: ArrivalSpec, n: int, seed) -> ArrivalTrace:
    """Sample an ArrivalTrace of length n, deterministic in (spec, n, seed)."""
    n = _check_length(n, "trace length n")
    rng = np.random.default_rng(seed)
    energies = spec.sample(rng, n)
    energies.setflags(write=False)
    return ArrivalTrace(energies=energies, seed=seed, spec=spec)


def generate_slot_profile(spec: ArrivalSpec, l_slots: int, seed) -> SlotProfile:
    """Sample a SlotProfile with l_slots i.i.d. rates from spec."""
    l_slots = _check_length(l_slots, "slot count l_slots")
    rng = np.random.default_rng(seed)
    return SlotProfile(rates=spec.sample(rng, l_slots))


def empirical_mean(trace: ArrivalTrace) -> float:
    """Sample mean of a trace; errors on an empty one."""
    energies = np.asarray(trace.energies, dtype=np.float64)
    if energies.size == 0:
        raise ParameterError("trace is empty")
    return float(np.mean(energies))
