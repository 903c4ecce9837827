import numpy as np
import pytest

from ehlink import io
from ehlink.arrivals import ArrivalSpec, generate_trace
from ehlink.battery import run_best_effort
from ehlink.errors import InputDataError


def test_profile_file_parsing(tmp_path):
    path = tmp_path / "profile.txt"
    path.write_text("# recharge rates\n3.0\n\n1.0   # dip\n2.0\n")
    assert io.read_profile_file(path).tolist() == [3.0, 1.0, 2.0]


def test_profile_file_bad_line_reports_position(tmp_path):
    path = tmp_path / "profile.txt"
    path.write_text("3.0\nbogus\n2.0\n")
    with pytest.raises(InputDataError, match="line 2"):
        io.read_profile_file(path)


def test_profile_file_rejects_negative_and_empty(tmp_path):
    bad = tmp_path / "neg.txt"
    bad.write_text("1.0\n-2.0\n")
    with pytest.raises(InputDataError, match="line 2"):
        io.read_profile_file(bad)
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n")
    with pytest.raises(InputDataError):
        io.read_profile_file(empty)


def test_profile_file_missing_is_oserror(tmp_path):
    with pytest.raises(OSError):
        io.read_profile_file(tmp_path / "missing.txt")


def test_trace_csv_round_trip(tmp_path):
    trace = generate_trace(ArrivalSpec.exponential(10.0), 50, seed=1)
    path = tmp_path / "trace.csv"
    io.write_trace_csv(path, trace)
    values = io.read_trace_csv(path)
    assert np.array_equal(values, trace.energies)


def test_trace_csv_is_byte_stable(tmp_path):
    trace = generate_trace(ArrivalSpec.exponential(10.0), 20, seed=2)
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    io.write_trace_csv(a, trace)
    io.write_trace_csv(b, trace)
    assert a.read_bytes() == b.read_bytes()


def test_trace_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("energy\n1.0\n")
    with pytest.raises(InputDataError):
        io.read_trace_csv(path)


def test_battery_csv_contents(tmp_path):
    e = [4.0, 0.0]
    x_sq = [4.0, 4.0]
    mask = run_best_effort(x_sq, e)
    path = tmp_path / "battery.csv"
    io.write_battery_csv(path, e, x_sq, mask)
    lines = path.read_text().splitlines()
    assert lines[0] == "i,e_i,x_sq,sent,s_after"
    assert lines[1] == "1,4.0,4.0,true,0.0"
    assert lines[2] == "2,0.0,4.0,false,0.0"


def test_outcomes_csv_blank_cell_for_missing_violation(tmp_path):
    rows = [
        {
            "trial": 0,
            "scheme": "sat",
            "n": 16,
            "h": 8,
            "P": 10.0,
            "var": 10.0,
            "msg": 3,
            "decoded": 3,
            "error": False,
            "infeasible_count": 0,
            "first_violation": None,
        }
    ]
    path = tmp_path / "outcomes.csv"
    io.write_outcomes_csv(path, rows)
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,scheme,n,h,P,var,msg,decoded,error,infeasible_count,first_violation"
    assert lines[1] == "0,sat,16,8,10.0,10.0,3,3,false,0,"


def test_allocation_csv_and_summary(tmp_path):
    from ehlink.allocation import allocate_optimal, throughput_report

    rates = [3.0, 1.0, 2.0]
    allocation = allocate_optimal(rates)
    path = tmp_path / "allocation.csv"
    io.write_allocation_csv(path, rates, allocation.powers)
    lines = path.read_text().splitlines()
    assert lines[0] == "slot,p_in,p_tr,cum_in,cum_tr,rate_bits"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[:5] == ["1", "3.0", "2.0", "3.0", "2.0"]
    assert float(first[5]) == pytest.approx(0.5 * np.log2(3.0))

    report = throughput_report(rates)
    summary = tmp_path / "summary.json"
    io.write_allocation_summary_json(
        summary, report.t_lb, report.t_opt, report.t_ub, allocation.breakpoints
    )
    import json

    payload = json.loads(summary.read_text())
    assert set(payload) == {"t_lb", "t_opt", "t_ub", "breakpoints"}
    assert payload["breakpoints"] == [0, 3]
    assert payload["t_opt"] == pytest.approx(0.5 * np.log2(3.0))


def test_read_rows_csv_cell_count_mismatch(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3\n")
    with pytest.raises(InputDataError, match="line 3"):
        io.read_rows_csv(path)
