"""Schema validation and parsing tests for the CSV reader."""

import numpy as np
import pytest

from coalplots import FIG1_COLUMNS, FIG2_COLUMNS, SchemaError, load_columns


def write_csv(path, text):
    path.write_text(text)
    return path


class TestSchemaErrors:

    def test_missing_column_is_named(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "ell,L\r\n1.0,2.0\r\n")
        with pytest.raises(SchemaError, match="tau_pow"):
            load_columns(path, FIG1_COLUMNS)

    def test_all_missing_columns_are_named(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "ell,other\r\n1.0,2.0\r\n")
        with pytest.raises(SchemaError) as info:
            load_columns(path, FIG1_COLUMNS)
        assert "L" in str(info.value)
        assert "tau_pow" in str(info.value)

    def test_empty_file_rejected(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "")
        with pytest.raises(SchemaError, match="empty file"):
            load_columns(path, FIG1_COLUMNS)

    def test_header_only_rejected(self, tmp_path):
        path = write_csv(tmp_path / "a.csv", "ell,L,tau_pow\r\n")
        with pytest.raises(SchemaError, match="no data rows"):
            load_columns(path, FIG1_COLUMNS)

    def test_non_numeric_cell_names_column_and_row(self, tmp_path):
        path = write_csv(tmp_path / "a.csv",
                         "ell,L,tau_pow\r\n1.0,2.0,3.0\r\n1.0,oops,3.0\r\n")
        with pytest.raises(SchemaError) as info:
            load_columns(path, FIG1_COLUMNS)
        message = str(info.value)
        assert "'L'" in message
        assert "row 3" in message
        assert "oops" in message

    def test_short_row_names_column(self, tmp_path):
        path = write_csv(tmp_path / "a.csv",
                         "ell,L,tau_pow\r\n1.0,2.0\r\n")
        with pytest.raises(SchemaError, match="tau_pow"):
            load_columns(path, FIG1_COLUMNS)

    def test_missing_file_raises_os_error(self, tmp_path):
        with pytest.raises(OSError):
            load_columns(tmp_path / "nope.csv", FIG1_COLUMNS)


class TestParsing:

    def test_values_round_trip(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "ell,L,tau_pow\r\n0.25,7.5,1.0\r\n1e-3,2.5,4.0\r\n")
        data = load_columns(path, FIG1_COLUMNS)
        assert np.array_equal(data["ell"], [0.25, 1e-3])
        assert np.array_equal(data["L"], [7.5, 2.5])
        assert np.array_equal(data["tau_pow"], [1.0, 4.0])

    def test_extra_columns_ignored(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "replicate,ell,L,tau_pow,seed\r\n0,1.0,2.0,3.0,99\r\n")
        data = load_columns(path, FIG1_COLUMNS)
        assert data["ell"][0] == 1.0
        assert set(data) == set(FIG1_COLUMNS)

    def test_case_insensitive_header_match(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "j,X,Y,REF_CURVE\r\n0,5,4,0.0\r\n1,3,2,1.5\r\n")
        data = load_columns(path, FIG2_COLUMNS)
        assert np.array_equal(data["x"], [5.0, 3.0])
        assert np.array_equal(data["y"], [4.0, 2.0])
        assert np.array_equal(data["ref_curve"], [0.0, 1.5])

    def test_exact_case_wins_over_folded(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "ell,l,L,tau_pow\r\n1.0,-1.0,2.0,3.0\r\n")
        data = load_columns(path, FIG1_COLUMNS)
        assert data["L"][0] == 2.0

    def test_whitespace_in_header_tolerated(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "ell, L ,tau_pow\r\n1.0,2.0,3.0\r\n")
        data = load_columns(path, FIG1_COLUMNS)
        assert data["L"][0] == 2.0

    def test_blank_lines_skipped(self, tmp_path):
        path = write_csv(
            tmp_path / "a.csv",
            "ell,L,tau_pow\r\n\r\n1.0,2.0,3.0\r\n\r\n")
        data = load_columns(path, FIG1_COLUMNS)
        assert len(data["ell"]) == 1
