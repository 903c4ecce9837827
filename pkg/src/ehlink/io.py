"""File formats: CSV/JSON emitters and parsers for core objects.

Floats are rendered with repr(), the shortest digit string that round-trips
exactly, so emitted files are byte-stable across runs and parse back to the
same values. Booleans are written as true/false.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .arrivals import ArrivalTrace
from .battery import TransmissionMask
from .errors import InputDataError

TRACE_HEADER = ("e_i",)
BATTERY_HEADER = ("i", "e_i", "x_sq", "sent", "s_after")
OUTCOMES_HEADER = (
    "trial",
    "scheme",
    "n",
    "h",
    "P",
    "var",
    "msg",
    "decoded",
    "error",
    "infeasible_count",
    "first_violation",
)
ALLOCATION_HEADER = ("slot", "p_in", "p_tr", "cum_in", "cum_tr", "rate_bits")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows_csv(path, header, rows) -> None:
    """Write dict rows under a fixed header; missing keys become empty cells."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row.get(col)) for col in header])


def read_rows_csv(path):
    """Read a CSV into (header, list of dict rows); cells stay strings."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputDataError(f"{path} is empty") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputDataError(
                    f"{path} line {lineno}: expected {len(header)} cells, got {len(row)}"
                )
            rows.append(dict(zip(header, row)))
    return header, rows


def write_trace_csv(path, trace) -> None:
    """One arrival per row under the e_i header."""
    energies = trace.energies if isinstance(trace, ArrivalTrace) else np.asarray(trace)
    write_rows_csv(path, TRACE_HEADER, [{"e_i": float(e)} for e in energies])


def read_trace_csv(path) -> np.ndarray:
    header, rows = read_rows_csv(path)
    if tuple(header) != TRACE_HEADER:
        raise InputDataError(f"{path}: expected header e_i, got {header!r}")
    try:
        values = [float(r["e_i"]) for r in rows]
    except ValueError as exc:
        raise InputDataError(f"{path}: {exc}") from None
    return np.asarray(values, dtype=np.float64)


def write_battery_csv(path, energies, symbol_energies, mask: TransmissionMask) -> None:
    """Per-symbol ledger: arrival, requested energy, sent flag, stored after."""
    e = np.asarray(energies, dtype=np.float64)
    x_sq = np.asarray(symbol_energies, dtype=np.float64)
    rows = [
        {
            "i": i + 1,
            "e_i": float(e[i]),
            "x_sq": float(x_sq[i]),
            "sent": bool(mask.sent[i]),
            "s_after": float(mask.battery_trajectory[i]),
        }
        for i in range(e.size)
    ]
    write_rows_csv(path, BATTERY_HEADER, rows)


def write_outcomes_csv(path, rows) -> None:
    """Per-trial scheme outcomes; rows are dicts keyed by the column names."""
    write_rows_csv(path, OUTCOMES_HEADER, rows)


def write_allocation_csv(path, profile_rates, powers) -> None:
    """Slot table comparing the arrival profile against the chosen powers."""
    p_in = np.asarray(profile_rates, dtype=np.float64)
    p_tr = np.asarray(powers, dtype=np.float64)
    cum_in = np.cumsum(p_in)
    cum_tr = np.cumsum(p_tr)
    rows = [
        {
            "slot": k + 1,
            "p_in": float(p_in[k]),
            "p_tr": float(p_tr[k]),
            "cum_in": float(cum_in[k]),
            "cum_tr": float(cum_tr[k]),
            "rate_bits": 0.5 * math.log2(1.0 + float(p_tr[k])),
        }
        for k in range(p_in.size)
    ]
    write_rows_csv(path, ALLOCATION_HEADER, rows)


def write_allocation_summary_json(path, t_lb, t_opt, t_ub, breakpoints) -> None:
    payload = {
        "t_lb": float(t_lb),
        "t_opt": float(t_opt),
        "t_ub": float(t_ub),
        "breakpoints": [int(b) for b in breakpoints],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_profile_file(path) -> np.ndarray:
    """Parse a slot profile: one rate per line, blank lines and # comments ok."""
    rates = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                value = float(text)
            except ValueError:
                raise InputDataError(f"{path} line {lineno}: not a number: {text!r}") from None
            if not (value >= 0 and math.isfinite(value)):
                raise InputDataError(f"{path} line {lineno}: rate must be finite and >= 0")
            rates.append(value)
    if not rates:
        raise InputDataError(f"{path}: no slot rates found")
    return np.asarray(rates, dtype=np.float64)
