import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geohydro.errors import ConfigError
from geohydro.grid import nodes
from geohydro.io import format_complex, format_real, format_rows, group_rows, read_rows, write_rows

finite = st.floats(allow_nan=False, allow_infinity=False)


def test_complex_format():
    assert format_complex(1) == "1+0i"
    assert format_complex(-0.5 - 2j) == "-0.5-2i"
    assert format_real(0.1) == "0.10000000000000001"


@given(re=st.lists(finite, min_size=16, max_size=16), im=st.lists(finite, min_size=16, max_size=16))
def test_round_trip_is_exact(tmp_path_factory, re, im):
    path = tmp_path_factory.mktemp("io") / "f.csv"
    rows = np.array([re, im]) + 1j * np.array([im, re])
    write_rows(path, [0.0, 0.25], rows)
    times, back = read_rows(path)
    assert np.array_equal(back, rows)
    assert list(times) == [0.0, 0.25]


def test_layout(tmp_path):
    path = tmp_path / "f.csv"
    write_rows(path, [0.5], np.ones((1, 16)))
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    header, row = raw.decode().splitlines()
    assert header.split(",")[:3] == ["t", "0", format_real(nodes(16)[1])]
    assert row == "0.5" + ",1" * 16


def test_real_file_reads_real(tmp_path):
    path = tmp_path / "f.csv"
    write_rows(path, [0.0], np.zeros((1, 16)))
    assert read_rows(path)[1].dtype == float


@pytest.mark.parametrize(
    "text, match",
    [
        ("", "header"),
        ("x,1\n", "header"),
        ("t" + ",0" * 10 + "\n", "power of two"),
        ("t" + ",0" * 16 + "\n0" + ",1" * 15 + "\n", "expected 17 cells"),
        ("t" + ",0" * 16 + "\n0" + ",abc" * 16 + "\n", ":2:"),
    ],
)
def test_malformed(tmp_path, text, match):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ConfigError, match=match):
        read_rows(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_rows(tmp_path / "absent.csv")


def test_group_rows():
    rows = np.arange(4 * 16.0).reshape(4, 16)
    groups = group_rows(np.array([0.0, 0.0, 1.0, 1.0]), rows, 2)
    assert [t for t, _ in groups] == [0.0, 1.0]
    assert np.array_equal(groups[1][1][0], rows[2])
    with pytest.raises(ConfigError, match="multiple"):
        group_rows(np.zeros(3), rows[:3], 2)
    with pytest.raises(ConfigError, match="disagree"):
        group_rows(np.array([0.0, 1.0, 1.0, 1.0]), rows, 2)


def test_format_rows_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        format_rows([0.0, 1.0], np.zeros((1, 16)))
