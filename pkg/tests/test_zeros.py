import csv
import json
import math
from pathlib import Path

import fixs
import jsf
import numpy as np
import pytest
import utils_test_gapcert as utils

from gapcert import exceptions, zeros
from gapcert.utils import validate_document
from gapcert.zeros import GapVariant, TableFormat, ZeroTable


@pytest.mark.parametrize(
    "variant, expected_result",
    [
        ("paper_log_gamma", GapVariant.PAPER_LOG_GAMMA),
        ("log_gamma_over_2pi", GapVariant.LOG_GAMMA_OVER_2PI),
        ("log_gamma", None),
        ("invalid", None),
    ],
)
def test_convert_str_to_gap_variant(variant, expected_result):
    assert zeros.convert_str_to_gap_variant(variant) == expected_result


@pytest.mark.parametrize(
    "fmt, expected_result",
    [("plain", TableFormat.PLAIN), ("offset", TableFormat.OFFSET), ("csv", None)],
)
def test_convert_str_to_table_format(fmt, expected_result):
    assert zeros.convert_str_to_table_format(fmt) == expected_result


class TestLoad:
    @pytest.fixture(autouse=True)
    def setup_method(self, tmp_path: Path):
        self.tmp_path = tmp_path

    def test_plain_table(self):
        path = utils.write_lines(self.tmp_path / "z.txt", ["14.134725", "21.022040", "25.010858"])
        table = zeros.load(path)
        assert table.count == 3
        assert table.range == (14.134725, 25.010858)
        assert table.path == str(path)

    def test_comments_and_blank_lines(self):
        lines = ["# header", "", "14.134725  # first", "   ", "21.022040"]
        table = zeros.load(utils.write_lines(self.tmp_path / "z.txt", lines), "plain")
        assert table.ordinates.tolist() == [14.134725, 21.022040]

    def test_not_increasing(self):
        path = utils.write_lines(self.tmp_path / "z.txt", ["21.0", "14.1"])
        with pytest.raises(exceptions.MonotonicityError) as err:
            zeros.load(path)
        assert err.value.index == 1
        assert err.value.previous == 21.0

    def test_repeated_ordinate(self):
        path = utils.write_lines(self.tmp_path / "z.txt", ["14.1", "21.0", "21.0"])
        with pytest.raises(exceptions.MonotonicityError) as err:
            zeros.load(path)
        assert err.value.index == 2

    def test_non_positive_ordinate(self):
        path = utils.write_lines(self.tmp_path / "z.txt", ["-1.0", "14.1"])
        with pytest.raises(exceptions.MonotonicityError) as err:
            zeros.load(path)
        assert err.value.index == 0
        assert err.value.previous is None

    @pytest.mark.parametrize("bad", ["abc", "nan", "inf", "1.0 2.0"])
    def test_parse_error_reports_line(self, bad):
        path = utils.write_lines(self.tmp_path / "z.txt", ["14.1", bad])
        with pytest.raises(exceptions.ParseError) as err:
            zeros.load(path)
        assert err.value.line_number == 2
        assert err.value.line == bad
        assert f"{path}:2" in str(err.value)

    def test_offset_table_matches_plain(self):
        base = 1000.0
        offsets = ["0.5", "1.25", "3.0"]
        offset_path = utils.write_lines(self.tmp_path / "o.txt", [str(base)] + offsets)
        plain_path = utils.write_lines(self.tmp_path / "p.txt", ["1000.5", "1001.25", "1003.0"])
        offset_table = zeros.load(offset_path, "offset")
        plain_table = zeros.load(plain_path, TableFormat.PLAIN)
        np.testing.assert_array_equal(offset_table.ordinates, plain_table.ordinates)

    def test_unknown_format(self):
        path = utils.write_lines(self.tmp_path / "z.txt", ["14.1"])
        with pytest.raises(exceptions.ParamsError):
            zeros.load(path, "csv")

    def test_save_round_trip(self):
        increments = jsf.JSF(fixs.ORDINATES_SCHEMA).generate()["increments"]
        table = ZeroTable(14.0 + np.cumsum(increments))
        path = self.tmp_path / "saved" / "zeros.txt"
        zeros.save(table, path)
        loaded = zeros.load(path)
        assert loaded.ordinates.tobytes() == table.ordinates.tobytes()


def test_zero_table_is_read_only():
    table = ZeroTable([1.0, 2.0])
    with pytest.raises(ValueError):
        table.ordinates[0] = 3.0


class TestNormalizedGaps:
    @pytest.fixture(autouse=True)
    def setup_method(self):
        self.table = zeros.load(utils.FIRST_ZEROS)

    def test_fixture_size(self):
        assert self.table.count == 100

    def test_first_gap_paper_variant(self):
        records = zeros.normalized_gaps(self.table, GapVariant.PAPER_LOG_GAMMA)
        assert records[0].delta == pytest.approx(2.9034, abs=1e-3)
        assert records[0].delta == pytest.approx(utils.first_zero_gap(math.log), rel=1e-12)
        assert records[0].variant is GapVariant.PAPER_LOG_GAMMA

    def test_first_gap_default_variant(self):
        records = zeros.normalized_gaps(self.table)
        expected = utils.first_zero_gap(lambda g: math.log(g / (2.0 * math.pi)))
        assert records[0].delta == pytest.approx(0.8889, abs=1e-3)
        assert records[0].delta == pytest.approx(expected, rel=1e-12)
        assert records[0].variant is GapVariant.LOG_GAMMA_OVER_2PI

    def test_mean_spacing_near_one(self):
        summary = zeros.gap_stats(zeros.normalized_gaps(self.table))
        assert 0.8 <= summary.mean_delta <= 1.2

    def test_records_are_positive_and_consistent(self):
        for record in zeros.normalized_gaps(self.table, GapVariant.PAPER_LOG_GAMMA):
            assert record.delta > 0.0
            recomputed = (record.gamma_next - record.gamma) * math.log(record.gamma) / (2 * math.pi)
            assert record.delta == pytest.approx(recomputed, rel=1e-12)

    def test_subtable_equivariance(self):
        records = zeros.normalized_gaps(self.table)
        sub_records = zeros.normalized_gaps(self.table.subtable(10, 40))
        assert len(sub_records) == 29
        for sub, full in zip(sub_records, records[10:39]):
            assert (sub.gamma, sub.gamma_next) == (full.gamma, full.gamma_next)
            assert sub.delta == pytest.approx(full.delta, rel=1e-15)

    def test_needs_two_ordinates(self):
        with pytest.raises(exceptions.ParamsError):
            zeros.normalized_gaps(self.table.subtable(0, 1))

    def test_rejects_heights_below_two_pi(self):
        with pytest.raises(exceptions.ParamsError):
            zeros.normalized_gaps(ZeroTable([1.0, 2.0]))


class TestGapStats:
    def test_single_record(self):
        record = zeros.GapRecord(14.0, 21.0, 2.9, GapVariant.PAPER_LOG_GAMMA)
        summary = zeros.gap_stats([record])
        assert summary.max_delta == summary.min_delta == summary.mean_delta == 2.9
        assert summary.gamma_at_max == 14.0
        assert summary.variant is GapVariant.PAPER_LOG_GAMMA

    def test_threshold_counts(self):
        records = [
            zeros.GapRecord(float(i), float(i + 1), delta, GapVariant.PAPER_LOG_GAMMA)
            for i, delta in enumerate([0.5, 3.1, 2.9, 3.5, 1.0], start=10)
        ]
        summary = zeros.gap_stats(records, thresholds=[3.033, 1.0], bins=4)
        assert summary.exceedances == {3.033: 2, 1.0: 3}
        assert sum(summary.histogram_counts) == 5
        assert len(summary.histogram_edges) == 5
        assert summary.max_delta == 3.5
        assert summary.gamma_at_max == 13.0

    def test_empty_records(self):
        summary = zeros.gap_stats([], thresholds=[1.0])
        assert summary.count == 0
        assert summary.max_delta is None
        assert summary.exceedances == {1.0: 0}

    def test_logs_table(self, caplog):
        caplog.set_level("INFO")
        table = zeros.load(utils.FIRST_ZEROS)
        zeros.gap_stats(zeros.normalized_gaps(table), thresholds=[2.0])
        assert "max delta" in caplog.text


class TestWriters:
    @pytest.fixture(autouse=True)
    def setup_method(self, tmp_path: Path):
        self.tmp_path = tmp_path
        table = zeros.load(utils.FIRST_ZEROS)
        self.records = zeros.normalized_gaps(table)
        self.summary = zeros.gap_stats(self.records, thresholds=[1.5, 3.033])

    def test_gaps_csv(self):
        path = self.tmp_path / "out" / "gaps.csv"
        zeros.write_gaps_csv(self.records, path)
        with open(path, encoding="utf-8") as stream:
            rows = list(csv.reader(stream))
        assert rows[0] == ["gamma", "gamma_next", "delta"]
        assert len(rows) == len(self.records) + 1
        assert float(rows[1][2]) == self.records[0].delta
        assert rows[1][0] == format(self.records[0].gamma, ".17g")

    def test_summary_json(self):
        path = self.tmp_path / "summary.json"
        text = zeros.write_summary_json(self.summary, path)
        document = json.loads(path.read_text(encoding="utf-8"))
        assert path.read_text(encoding="utf-8") == text
        validate_document(document, "zeros_summary")
        assert document["count"] == 99
        assert document["max_delta"] == self.summary.max_delta
        assert [e["threshold"] for e in document["exceedances"]] == [1.5, 3.033]
