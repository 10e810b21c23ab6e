from quantum_basis.config import load_table_config, split_list, DEFAULT_CONFIG_PATH
from quantum_basis import constants


def test_project_table_is_loaded():
    table = load_table_config(DEFAULT_CONFIG_PATH)
    assert table["DENSE_LIMIT"] == 4096
    assert table["SSIM_SIGMA"] == 1.5
    assert table["CSV_FLOAT_FORMAT"] == "%.17g"
    assert constants.DENSE_LIMIT == 4096
    assert constants.TARGET_SNR_DB == 15.0


def test_missing_table_gives_empty_config(tmp_path):
    assert load_table_config(str(tmp_path / "nope.csv")) == {}


def test_table_without_key_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("Name,Value\nx,1\n")
    assert load_table_config(str(path)) == {}


def test_value_coercion(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("Key,Value,Unit,Description\n"
                    "# comment line\n"
                    "A,3,-,\nB,2.5,-,\nC,yes,-,\nD,hello,-,\n")
    assert load_table_config(str(path)) == {"A": 3, "B": 2.5, "C": True, "D": "hello"}


def test_split_list():
    assert split_list("1;2.5;x") == [1, 2.5, "x"]
    assert split_list(4) == [4]
    assert split_list(None) == []
    assert split_list([1, 2]) == [1, 2]
