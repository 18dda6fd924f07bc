import numpy as np
import pytest

from src.dataset.count_table import Dataset, load_count_table, write_count_table
from src.errors import DimensionMismatch, MalformedTable
from tests.oracles import TABLE1


def write(tmp_path, text):
    path = tmp_path / "counts.csv"
    path.write_text(text)
    return str(path)


class TestBundledTable:
    def test_shape_and_sums(self):
        d = load_count_table(str(TABLE1))
        assert (d.n, d.r) == (50, 3)
        assert d.column_sums.tolist() == [235, 325, 333]
        assert d.column_max.tolist() == [22, 15, 30]
        assert d.columns == ("x1", "x2", "x3")

    def test_totals(self):
        d = load_count_table(str(TABLE1))
        assert int(d.totals.sum()) == 235 + 325 + 333


class TestMalformed:
    def test_bad_header(self, tmp_path):
        with pytest.raises(MalformedTable) as info:
            load_count_table(write(tmp_path, "a,b\n1,2\n"))
        assert info.value.line == 1

    def test_non_integer_reports_file_line(self, tmp_path):
        with pytest.raises(MalformedTable) as info:
            load_count_table(write(tmp_path, "x1,x2\n1,2\n3,4\n5,2.5\n"))
        assert info.value.line == 4
        assert "line 4" in str(info.value)

    def test_negative_count(self, tmp_path):
        with pytest.raises(MalformedTable) as info:
            load_count_table(write(tmp_path, "x1\n3\n-1\n"))
        assert info.value.line == 3

    def test_line_numbers_count_blank_lines(self, tmp_path):
        with pytest.raises(MalformedTable) as info:
            load_count_table(write(tmp_path, "x1,x2\n1,2\n\n3,4\n5,x\n"))
        assert info.value.line == 5

    def test_blank_lines_are_skipped(self, tmp_path):
        d = load_count_table(write(tmp_path, "x1,x2\n1,2\n\n3,4\n"))
        assert d.counts.tolist() == [[1, 2], [3, 4]]

    def test_missing_field(self, tmp_path):
        with pytest.raises(MalformedTable) as info:
            load_count_table(write(tmp_path, "x1,x2\n1,2\n3\n"))
        assert info.value.line == 3

    def test_extra_field(self, tmp_path):
        with pytest.raises(MalformedTable):
            load_count_table(write(tmp_path, "x1,x2\n1,2\n3,4,5\n"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(MalformedTable):
            load_count_table(write(tmp_path, ""))

    def test_header_only(self, tmp_path):
        with pytest.raises(MalformedTable):
            load_count_table(write(tmp_path, "x1,x2\n"))


class TestDataset:
    def test_ragged_rows(self):
        with pytest.raises(DimensionMismatch):
            Dataset.from_rows([[1, 2], [3]])

    def test_vector_becomes_column(self):
        d = Dataset(np.array([1, 2, 3]))
        assert (d.n, d.r) == (3, 1)

    def test_rejects_fractional(self):
        with pytest.raises(MalformedTable):
            Dataset(np.array([[1.5, 2.0]]))

    def test_counts_are_read_only(self):
        d = Dataset.from_rows([[1, 2]])
        with pytest.raises(ValueError):
            d.counts[0, 0] = 5

    def test_write_then_load(self, tmp_path):
        counts = np.array([[0, 4], [7, 1], [2, 2]])
        path = str(tmp_path / "nested" / "out.csv")
        write_count_table(path, counts)
        assert open(path).readline().strip() == "x1,x2"
        d = load_count_table(path)
        assert d.counts.tolist() == counts.tolist()
        assert d.to_frame().shape == (3, 2)
