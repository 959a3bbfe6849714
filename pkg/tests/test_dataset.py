import numpy as np
import pytest

from rank_cenet.data.dataset import Dataset, load_csv, save_csv
from rank_cenet.errors import DataParseError, InvalidConfigError, InvalidInputError


def write(tmp_path, text: str, name: str = "data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_reads_scientific_notation(tmp_path):
    path = write(tmp_path, "a,b,y\n1,2e-1,3\n-4.5,5E2,6\n7,8,9\n")
    data = load_csv(path, "y")
    assert data.feature_names == ("a", "b")
    np.testing.assert_array_equal(data.x, [[1.0, 0.2], [-4.5, 500.0], [7.0, 8.0]])
    np.testing.assert_array_equal(data.y, [3.0, 6.0, 9.0])


def test_load_csv_selects_features(tmp_path):
    path = write(tmp_path, "a,b,y\n1,2,3\n4,5,6\n")
    assert load_csv(path, "y", features=["b"]).feature_names == ("b",)
    with pytest.raises(InvalidConfigError):
        load_csv(path, "y", features=["c"])


def test_empty_file_is_a_parse_error(tmp_path):
    with pytest.raises(DataParseError) as info:
        load_csv(write(tmp_path, ""), "y")
    assert info.value.line == 1


def test_na_cell_reports_its_line(tmp_path):
    path = write(tmp_path, "a,y\n1,2\n3,4\nNA,6\n")
    with pytest.raises(DataParseError) as info:
        load_csv(path, "y")
    assert info.value.line == 4
    assert "line 4" in str(info.value)


def test_empty_cell_reports_its_line(tmp_path):
    path = write(tmp_path, "a,y\n1,2\n,4\n5,6\n")
    with pytest.raises(DataParseError) as info:
        load_csv(path, "y")
    assert info.value.line == 3


def test_non_numeric_cell(tmp_path):
    path = write(tmp_path, "a,y\n1,2\n3,abc\n")
    with pytest.raises(DataParseError) as info:
        load_csv(path, "y")
    assert info.value.line == 3


def test_missing_response_is_a_config_error(tmp_path):
    with pytest.raises(InvalidConfigError):
        load_csv(write(tmp_path, "a,b\n1,2\n3,4\n"), "y")


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(InvalidConfigError):
        load_csv(tmp_path / "nope.csv", "y")


def test_single_row_is_rejected(tmp_path):
    with pytest.raises(DataParseError):
        load_csv(write(tmp_path, "a,y\n1,2\n"), "y")


def test_save_then_load_is_exact(tmp_path, small_data):
    path = save_csv(small_data, tmp_path / "out" / "data.csv")
    loaded = load_csv(path, "y")
    np.testing.assert_array_equal(loaded.x, small_data.x)
    np.testing.assert_array_equal(loaded.y, small_data.y)


def test_long_literals_parse_exactly(tmp_path):
    cells = ["0.1", "0.30000000000000004", "-1.2345678901234567e-05", "2.718281828459045"]
    body = "".join(f"{c},{i}\n" for i, c in enumerate(cells))
    data = load_csv(write(tmp_path, "a,y\n" + body), "y")
    assert data.x[:, 0].tolist() == [float(c) for c in cells]


def test_dataset_validation():
    with pytest.raises(InvalidInputError):
        Dataset(np.ones((3, 2)), np.ones(4))
    with pytest.raises(InvalidInputError):
        Dataset(np.ones((1, 2)), np.ones(1))
    with pytest.raises(InvalidInputError):
        Dataset(np.array([[1.0], [np.nan]]), np.ones(2))


def test_standardized_zeroes_constant_columns(rng):
    x = rng.standard_normal((20, 3))
    x[:, 1] = 7.0
    data = Dataset(x, rng.standard_normal(20)).standardized()
    np.testing.assert_array_equal(data.x[:, 1], 0.0)
    np.testing.assert_allclose(data.x[:, [0, 2]].mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(np.mean(data.x[:, [0, 2]] ** 2, axis=0), 1.0, atol=1e-12)
