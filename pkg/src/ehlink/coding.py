"""Random Gaussian codebooks and the two energy-constrained schemes.

Save-and-transmit prepends h zero symbols to every codeword so the battery
banks roughly h*P of charge before data starts; a codeword whose energy
still outruns the arrivals is replaced by the all-zero sequence, which the
receiver resolves to message 0 by convention. Best-effort transmits each
symbol only when the battery can pay for it and the receiver decodes
against the original (unmasked) codebook. Decoding is minimum Euclidean
distance throughout, which is ML for AWGN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrivals import ArrivalTrace
from .battery import (
    FeasibilityReport,
    TransmissionMask,
    check_causal_feasibility,
    compensated_cumsum,
    run_best_effort,
)
from .errors import InputDataError, ParameterError, ResourceLimitError

# codebook budget: num_messages * blocklength entries (float64). 2^25 entries
# is 256 MB and comfortably admits M=16 at n=10^6.
MAX_CODEBOOK_ENTRIES = 1 << 25


@dataclass(frozen=True)
class Codebook:
    """num_messages codewords of blocklength symbols each, rows read-only."""

    symbols: np.ndarray
    blocklength: int
    num_messages: int
    rate: float
    symbol_variance: float
    prefix_zeros: int
    seed: object


@dataclass(frozen=True)
class ChannelOutput:
    received: np.ndarray
    noise_variance: float


@dataclass(frozen=True)
class SchemeOutcome:
    """One Monte Carlo trial of a transmission scheme."""

    message_sent: int
    message_decoded: int
    decode_error: bool
    mask: TransmissionMask
    feasibility: FeasibilityReport
    achieved_rate: float


def capacity(p: float) -> float:
    """AWGN capacity 0.5*log2(1+P) in bits per channel use, unit noise."""
    if not (p >= 0) or math.isnan(p):
        raise ParameterError(f"average power must be >= 0, got {p!r}")
    return 0.5 * math.log2(1.0 + p)


def sat_achievable_rate(n: int, h: int, p: float) -> float:
    """Rate of save-and-transmit with an h-symbol saving prefix."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"blocklength must be a positive integer, got {n!r}")
    if not isinstance(h, (int, np.integer)) or not (0 <= h <= n):
        raise ParameterError(f"prefix length must satisfy 0 <= h <= n, got {h!r}")
    return (n - h) / n * capacity(p)


def default_prefix_length(n: int) -> int:
    """Smallest integer h with h^4 >= n^3, i.e. ceil(n^(3/4)) computed exactly.

    Float powers overshoot near perfect fourth powers (16**0.75 rounds above
    8), so the float estimate is corrected with exact integer arithmetic.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"blocklength must be a positive integer, got {n!r}")
    n = int(n)
    target = n ** 3
    h = max(1, math.ceil(n ** 0.75))
    while h > 1 and (h - 1) ** 4 >= target:
        h -= 1
    while h ** 4 < target:
        h += 1
    return h


def build_codebook(
    n: int,
    num_messages: int,
    symbol_variance: float,
    prefix_zeros: int = 0,
    seed=0,
) -> Codebook:
    """Draw an i.i.d. Gaussian codebook, zeroing the first prefix_zeros symbols."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"blocklength must be a positive integer, got {n!r}")
    if not isinstance(num_messages, (int, np.integer)) or num_messages < 1:
        raise ParameterError(f"num_messages must be a positive integer, got {num_messages!r}")
    if not (symbol_variance >= 0) or math.isnan(symbol_variance):
        raise ParameterError(f"symbol_variance must be >= 0, got {symbol_variance!r}")
    if not isinstance(prefix_zeros, (int, np.integer)) or not (0 <= prefix_zeros <= n):
        raise ParameterError(f"prefix_zeros must satisfy 0 <= prefix_zeros <= n, got {prefix_zeros!r}")
    n = int(n)
    num_messages = int(num_messages)
    prefix_zeros = int(prefix_zeros)
    if num_messages * n > MAX_CODEBOOK_ENTRIES:
        raise ResourceLimitError(
            f"codebook of {num_messages} x {n} entries exceeds the budget of {MAX_CODEBOOK_ENTRIES}"
        )
    rng = np.random.default_rng(seed)
    symbols = np.zeros((num_messages, n))
    if prefix_zeros < n:
        symbols[:, prefix_zeros:] = rng.normal(
            0.0, math.sqrt(symbol_variance), (num_messages, n - prefix_zeros)
        )
    symbols.setflags(write=False)
    return Codebook(
        symbols=symbols,
        blocklength=n,
        num_messages=num_messages,
        rate=math.log2(num_messages) / n,
        symbol_variance=float(symbol_variance),
        prefix_zeros=prefix_zeros,
        seed=seed,
    )


def awgn(transmitted, noise_seed, noise_variance: float = 1.0) -> ChannelOutput:
    """Add i.i.d. Gaussian noise; noise_variance=0 is the noiseless test hook."""
    if not (noise_variance >= 0) or math.isnan(noise_variance):
        raise ParameterError(f"noise_variance must be >= 0, got {noise_variance!r}")
    x = np.asarray(transmitted, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise InputDataError("transmitted sequence must be one-dimensional and non-empty")
    if np.any(~np.isfinite(x)):
        raise InputDataError("transmitted sequence must be finite")
    rng = np.random.default_rng(noise_seed)
    received = x + rng.normal(0.0, math.sqrt(noise_variance), x.size)
    received.setflags(write=False)
    return ChannelOutput(received=received, noise_variance=float(noise_variance))


def decode_min_distance(output: ChannelOutput, book: Codebook) -> int:
    """Index of the codeword nearest the received vector; ties pick the lowest."""
    y = np.asarray(output.received, dtype=np.float64)
    if y.size != book.blocklength:
        raise InputDataError(
            f"received length {y.size} does not match blocklength {book.blocklength}"
        )
    diffs = book.symbols - y
    distances = np.einsum("ij,ij->i", diffs, diffs)
    return int(np.argmin(distances))


def _check_message(book: Codebook, message: int) -> int:
    if not isinstance(message, (int, np.integer)) or not (0 <= message < book.num_messages):
        raise ParameterError(f"message must be in [0, {book.num_messages}), got {message!r}")
    return int(message)


def _check_trace(book: Codebook, trace: ArrivalTrace) -> np.ndarray:
    e = trace.energies if isinstance(trace, ArrivalTrace) else np.asarray(trace, dtype=np.float64)
    if e.size != book.blocklength:
        raise InputDataError(
            f"trace length {e.size} does not match blocklength {book.blocklength}"
        )
    return np.asarray(e, dtype=np.float64)


def run_save_and_transmit(
    book: Codebook,
    message: int,
    trace: ArrivalTrace,
    noise_seed,
    noise_variance: float = 1.0,
) -> SchemeOutcome:
    """One save-and-transmit trial.

    The codeword is sent as-is when it is causal-feasible against the trace.
    Otherwise the all-zero sequence goes out and the receiver outputs
    message 0 by convention, so the trial is an error unless message 0 was
    sent; the channel need not be evaluated in that branch.
    """
    message = _check_message(book, message)
    e = _check_trace(book, trace)
    codeword = book.symbols[message]
    x_sq = codeword * codeword
    report = check_causal_feasibility(x_sq, e)
    n = book.blocklength
    if not report.feasible:
        sent = np.zeros(n, dtype=bool)
        sent.setflags(write=False)
        trajectory = compensated_cumsum(e)
        trajectory.setflags(write=False)
        mask = TransmissionMask(sent=sent, infeasible_count=n, battery_trajectory=trajectory)
        decoded = 0
        error = message != 0
        return SchemeOutcome(message, decoded, error, mask, report, 0.0 if error else book.rate)
    sent = np.ones(n, dtype=bool)
    sent.setflags(write=False)
    mask = TransmissionMask(sent=sent, infeasible_count=0, battery_trajectory=report.slack)
    output = awgn(codeword, noise_seed, noise_variance)
    decoded = decode_min_distance(output, book)
    error = decoded != message
    return SchemeOutcome(message, decoded, error, mask, report, 0.0 if error else book.rate)


def run_best_effort_transmit(
    book: Codebook,
    message: int,
    trace: ArrivalTrace,
    noise_seed,
    noise_variance: float = 1.0,
) -> SchemeOutcome:
    """One best-effort trial: blocked symbols go out as zero, the receiver
    decodes against the unmasked codebook."""
    message = _check_message(book, message)
    e = _check_trace(book, trace)
    codeword = book.symbols[message]
    x_sq = codeword * codeword
    mask = run_best_effort(x_sq, e)
    report = check_causal_feasibility(x_sq, e)
    transmitted = np.where(mask.sent, codeword, 0.0)
    output = awgn(transmitted, noise_seed, noise_variance)
    decoded = decode_min_distance(output, book)
    error = decoded != message
    return SchemeOutcome(message, decoded, error, mask, report, 0.0 if error else book.rate)
