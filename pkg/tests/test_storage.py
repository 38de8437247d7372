import numpy as np
import pytest

from heatrecon.errors import IoError
from heatrecon.storage.utils import read_csv, write_csv, write_json, write_report


def test_floats_survive_a_round_trip(tmp_path):
    data = np.array([[0.1, 1.0 / 3.0], [np.pi, -2.5e-300]])
    path = tmp_path / "table.csv"
    write_csv(path, ("a", "b"), data)
    assert path.read_text(encoding="utf_8").splitlines()[0] == "a,b"
    np.testing.assert_array_equal(read_csv(path, ("a", "b")), data)


def test_empty_table(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv(path, ("x", "t"), np.zeros((0, 2)))
    assert read_csv(path, ("x", "t")).shape == (0, 2)


def test_header_is_checked(tmp_path):
    path = tmp_path / "table.csv"
    write_csv(path, ("a", "b"), np.ones((2, 2)))
    with pytest.raises(IoError, match="expected columns"):
        read_csv(path, ("x", "t"))


def test_malformed_table(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text("a,b\n1.0,oops\n", encoding="utf_8")
    with pytest.raises(IoError, match="malformed"):
        read_csv(path, ("a", "b"))


def test_missing_file(tmp_path):
    with pytest.raises(IoError, match="cannot read"):
        read_csv(tmp_path / "missing.csv", ("a",))


def test_no_temporary_file_is_left(tmp_path):
    write_json(tmp_path / "out" / "manifest.json", {"b": 1, "a": [1, 2]})
    assert [p.name for p in (tmp_path / "out").iterdir()] == ["manifest.json"]


def test_unwritable_destination(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf_8")
    with pytest.raises(IoError, match="cannot write"):
        write_csv(blocker / "table.csv", ("a",), np.ones((1, 1)))


def test_report_lines(tmp_path):
    path = tmp_path / "report.txt"
    write_report(path, {"formulation": "mf", "misfit": 0.1, "iterations": 3})
    assert path.read_text(encoding="utf_8") == "formulation: mf\nmisfit: 0.10000000000000001\niterations: 3\n"
