"""Output files: exact round-trips, strict parsing, atomic writes."""
import json
import math
import os

import pytest

from spikelattice.engine import ExtinctionRecord
from spikelattice.outputs import (
    CSV_HEADER,
    OutputError,
    json_text,
    logfit_payload,
    read_json,
    read_samples_csv,
    samples_csv_text,
    summary_payload,
    trace_csv_text,
    write_atomic,
)
from spikelattice.stats import LogFit


def rec(time, spikes=3, leaks=2, seed=123, by="extinction"):
    return ExtinctionRecord(
        extinction_time=time, spike_events=spikes, leak_events=leaks, seed=seed, terminated_by=by
    )


AWKWARD = [0.1 + 0.2, math.pi * 1e-7, 1.0 / 3.0, 2.0**-40, 123456.78901234567]


class TestSamplesCsv:
    def test_round_trip_is_exact(self, tmp_path):
        records = [
            rec(t, spikes=i, leaks=i + 1, seed=derive(i), by=by)
            for i, (t, by) in enumerate(
                zip(AWKWARD, ["extinction", "max_events", "max_time", "extinction", "extinction"])
            )
        ]
        path = str(tmp_path / "samples.csv")
        write_atomic(path, samples_csv_text(records))
        back = read_samples_csv(path)
        assert back == records  # bit-for-bit, including the float field

    def test_header_first_line(self):
        text = samples_csv_text([rec(1.5)])
        assert text.splitlines()[0] == ",".join(CSV_HEADER)
        assert text.endswith("\n")

    def test_rejects_wrong_header(self, tmp_path):
        path = str(tmp_path / "bad.csv")
        write_atomic(path, "a,b,c\n1,2,3\n")
        with pytest.raises(OutputError, match="header"):
            read_samples_csv(path)

    def test_rejects_short_row(self, tmp_path):
        path = str(tmp_path / "bad.csv")
        write_atomic(path, ",".join(CSV_HEADER) + "\n0,1,2.0,3\n")
        with pytest.raises(OutputError, match="fields"):
            read_samples_csv(path)

    def test_rejects_unknown_termination(self, tmp_path):
        path = str(tmp_path / "bad.csv")
        write_atomic(path, ",".join(CSV_HEADER) + "\n0,1,2.0,3,4,crashed\n")
        with pytest.raises(OutputError, match="termination"):
            read_samples_csv(path)

    def test_rejects_out_of_order_replications(self, tmp_path):
        path = str(tmp_path / "bad.csv")
        body = "1,1,2.0,3,4,extinction\n0,1,2.0,3,4,extinction\n"
        write_atomic(path, ",".join(CSV_HEADER) + "\n" + body)
        with pytest.raises(OutputError, match="out of order"):
            read_samples_csv(path)

    def test_rejects_unparsable_number(self, tmp_path):
        path = str(tmp_path / "bad.csv")
        write_atomic(path, ",".join(CSV_HEADER) + "\n0,1,abc,3,4,extinction\n")
        with pytest.raises(OutputError):
            read_samples_csv(path)

    def test_empty_record_list(self, tmp_path):
        path = str(tmp_path / "empty.csv")
        write_atomic(path, samples_csv_text([]))
        assert read_samples_csv(path) == []


def derive(i):
    return 10_000 + i


class TestTraceCsv:
    def test_layout(self):
        text = trace_csv_text([(0.25, 4, "spike"), (0.5, 0, "leak")])
        assert text == "time,neuron,kind\n0.25,4,spike\n0.5,0,leak\n"


class TestWriteAtomic:
    def test_creates_parent_and_leaves_no_temp(self, tmp_path):
        path = str(tmp_path / "deep" / "nested" / "out.txt")
        write_atomic(path, "hello\n")
        with open(path) as fh:
            assert fh.read() == "hello\n"
        assert os.listdir(os.path.dirname(path)) == ["out.txt"]

    def test_overwrites_in_place(self, tmp_path):
        path = str(tmp_path / "out.txt")
        write_atomic(path, "one")
        write_atomic(path, "two")
        with open(path) as fh:
            assert fh.read() == "two"
        assert sorted(os.listdir(tmp_path)) == ["out.txt"]


class TestSummaryPayload:
    def test_no_samples_keeps_only_cap_count(self):
        assert summary_payload([], 7, 50) == {"n_capped": 7}

    def test_single_sample_omits_variances(self):
        payload = summary_payload([2.0], 0, 4)
        assert payload["mean"] == 2.0
        assert "variance" not in payload and "renormalized_variance" not in payload
        assert payload["ks_distance"] > 0
        assert len(payload["histogram"]["edges"]) == 5
        assert payload["n_capped"] == 0

    def test_full_payload_key_order_and_content(self):
        payload = summary_payload([1.0, 2.0, 3.0], 1, 3)
        assert list(payload) == [
            "mean",
            "variance",
            "renormalized_variance",
            "ks_distance",
            "histogram",
            "n_capped",
        ]
        assert payload["mean"] == 2.0
        assert payload["variance"] == 1.0
        assert payload["renormalized_variance"] == 0.25
        # densities integrate to one over [0, max]
        e = payload["histogram"]["edges"]
        d = payload["histogram"]["densities"]
        area = sum((hi - lo) * y for lo, hi, y in zip(e, e[1:], d))
        assert area == pytest.approx(1.0, abs=1e-12)

    def test_pure_function_of_inputs(self):
        xs = [0.3, 1.7, 2.9, 0.4]
        a = json_text(summary_payload(xs, 2, 10))
        b = json_text(summary_payload(list(xs), 2, 10))
        assert a == b


class TestJson:
    def test_round_trip(self, tmp_path):
        payload = {"a": 1, "b": [1.5, None], "c": {"d": "x"}}
        path = str(tmp_path / "x.json")
        write_atomic(path, json_text(payload))
        assert read_json(path) == payload

    def test_logfit_payload_shape(self):
        fit = LogFit(C=0.32, intercept=0.1, r_squared=0.99, C_no_intercept=0.33)
        payload = logfit_payload(fit, [])
        assert payload == {
            "C": 0.32,
            "intercept": 0.1,
            "r_squared": 0.99,
            "C_no_intercept": 0.33,
            "points": [],
        }
        json.dumps(payload)  # serializable as-is
