"""Artifact writer tests: formatting, column union, atomicity."""
import json
import os

import numpy as np
import pytest

from kpzlab.output import (fmt_value, sha256_text, write_csv, write_json,
                           _atomic_write)


def test_fmt_value_round_trips():
    assert fmt_value(0.1) == "0.1"
    assert fmt_value(1 / 3) == repr(1 / 3)
    assert float(fmt_value(np.float64(2.5e-17))) == 2.5e-17
    assert fmt_value(True) == "true" and fmt_value(np.bool_(False)) == "false"
    assert fmt_value(np.int64(7)) == "7"
    assert fmt_value("label") == "label"


def test_write_csv_unions_columns(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, [{"a": 1, "b": 2.0}, {"a": 3, "c": "x"}])
    lines = p.read_text().splitlines()
    assert lines[0] == "a,b,c"
    assert lines[1] == "1,2.0,"
    assert lines[2] == "3,,x"


def test_write_csv_accepts_generator(tmp_path):
    p = tmp_path / "g.csv"
    write_csv(p, ({"k": i} for i in range(3)))
    assert p.read_text().splitlines() == ["k", "0", "1", "2"]


def test_write_json_handles_numpy(tmp_path):
    p = tmp_path / "t.json"
    write_json(p, {"f": np.float64(0.5), "i": np.int32(2),
                   "b": np.bool_(True), "arr": np.arange(3)})
    doc = json.loads(p.read_text())
    assert doc == {"f": 0.5, "i": 2, "b": True, "arr": [0, 1, 2]}


def test_atomic_write_leaves_no_temp_on_failure(tmp_path):
    target = tmp_path / "out.txt"

    def boom(fh):
        fh.write("partial")
        raise RuntimeError("disk on fire")

    with pytest.raises(RuntimeError):
        _atomic_write(str(target), boom)
    assert not target.exists()
    assert os.listdir(tmp_path) == []


def test_sha256_text_known_value():
    # sha256 of the empty string, a fixed reference
    assert sha256_text("") == ("e3b0c44298fc1c149afbf4c8996fb924"
                               "27ae41e4649b934ca495991b7852b855")
