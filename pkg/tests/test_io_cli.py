import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhj import io as qio
from qhj.cli import RunConfig, UsageError, parse_bracket, parse_levels, run
from qhj.core.analytic import ho_eigenfunction
from qhj.spectrum import shooting_oracle


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=30))
def test_csv_roundtrip_bit_identical(values):
    text = qio.format_csv({"a": values, "b": values[::-1]}, {"k": 1.5})
    meta, cols = qio.parse_csv(text)
    assert meta == {"k": 1.5}
    assert np.array_equal(cols["a"], np.array(values, dtype=float))
    assert [v.hex() for v in cols["b"]] == [float(v).hex() for v in values[::-1]]


def test_json_roundtrip():
    text = qio.format_json({"x": [0.1, 1 / 3], "name": ["a", "b"]}, {"n": 2})
    meta, cols = qio.parse_json(text)
    assert meta == {"n": 2} and cols["x"][1] == 1 / 3 and cols["name"] == ["a", "b"]


def test_unequal_columns_rejected():
    with pytest.raises(ValueError):
        qio.format_csv({"a": [1.0], "b": [1.0, 2.0]})


def test_level_and_bracket_parsing():
    assert parse_levels("0..5") == (0, 1, 2, 3, 4, 5)
    assert parse_levels("3") == (3,)
    assert parse_levels("1,4") == (1, 4)
    assert parse_bracket("0.5:1.5") == (0.5, 1.5)
    for bad in ("5..2", "a", "-1"):
        with pytest.raises(UsageError):
            parse_levels(bad)
    with pytest.raises(UsageError):
        parse_bracket("1.0")


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(grid=199)
    with pytest.raises(UsageError):
        RunConfig(hbar=0.0)
    with pytest.raises(UsageError):
        RunConfig(fmt="xml")
    assert RunConfig(grid=200).grid == 200


def _run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = run([*argv, "--out", str(out)])
    return code, out


def test_eigen_range(tmp_path):
    code, out = _run(tmp_path, "eigen", "--n", "0..5")
    assert code == 0
    meta, cols = qio.read_table(out)
    assert cols["n"] == [0, 1, 2, 3, 4, 5]
    assert np.allclose(cols["E"], np.arange(6) + 0.5, atol=1e-8)
    assert cols["method"] == ["matching"] * 6


def test_eigen_quartic_bracket(tmp_path, quartic):
    code, out = _run(tmp_path, "eigen", "--model", "quartic", "--m", "0.5", "--bracket", "0.5:1.5")
    assert code == 0
    _, cols = qio.read_table(out)
    ref = shooting_oracle(quartic, (0.5, 1.5))
    assert len(cols["E"]) == 1 and abs(cols["E"][0] - ref.E) <= 1e-6 * ref.E


def test_exit_codes(tmp_path, capsys):
    assert run(["eigen", "--bracket", "0.6:0.9"]) == 2
    assert run(["eigen", "--grid", "10"]) == 1
    assert run(["eigen", "--bogus"]) == 1
    assert run(["figure", "12"]) == 2
    assert run(["frobnicate"]) == 1
    assert run(["action", "--energy", "-3"]) == 2
    assert run(["eigen", "--model", "polynomial", "--coeffs", "0,0,-2,0,1", "--bracket=-0.5:0.5"]) == 2


def test_config_file_overridden_by_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model = oscillator\nomega = 2.0\nn = 0..1\n")
    code, out = _run(tmp_path, "eigen", "--config", str(cfg), "--omega", "3.0")
    assert code == 0
    _, cols = qio.read_table(out)
    assert np.allclose(cols["E"], [1.5, 4.5], atol=1e-8)
    assert run(["eigen", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_action_roundtrip(tmp_path):
    code, out = _run(tmp_path, "action", "--n", "2", "--grid", "400")
    assert code == 0
    text = out.read_text()
    meta, cols = qio.parse_csv(text)
    assert qio.format_csv(cols, meta) == text
    assert cols["X"][0] == 0.0
    assert cols["X"][-1] == pytest.approx(2.5 * math.pi, abs=1e-6)


@pytest.mark.parametrize("path", ["analytic", "oracle"])
def test_action_paths(tmp_path, path):
    code, out = _run(tmp_path, "action", "--n", "1", "--grid", "300", "--path", path)
    assert code == 0
    meta, cols = qio.read_table(out)
    assert meta["path"] == path
    assert cols["X"][-1] == pytest.approx(1.5 * math.pi, abs=1e-6)


def test_action_with_energy_derivative(tmp_path):
    code, out = _run(tmp_path, "action", "--n", "3", "--grid", "300", "--with-xe", "--format", "json")
    assert code == 0
    meta, cols = qio.read_table(out)
    assert "XE" in cols and len(cols["XE"]) == 300


@pytest.mark.parametrize("path", ["general", "special", "classical"])
def test_momentum_provenance(tmp_path, path):
    code, out = _run(tmp_path, "momentum", "--n", "2", "--grid", "301", "--path", path)
    assert code == 0
    meta, cols = qio.read_table(out)
    assert meta["provenance"] == path
    if path == "special":
        assert np.all(cols["re_p"] == 0.0)
    else:
        assert np.all(cols["re_p"][1:-1] > 0)


def test_coarse_rows(tmp_path):
    code, out = _run(tmp_path, "coarse", "--n", "10", "--bins", "20", "--source", "action")
    assert code == 0
    meta, cols = qio.read_table(out)
    assert len(cols["bin_center"]) == 20 and meta["source"] == "action"


def test_stdout_output(capsys):
    assert run(["eigen", "--n", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0][1:])["command"] == "eigen"
    assert lines[1] == "n,E,mismatch,method"


def test_figure_four_product(tmp_path):
    code, out = _run(tmp_path, "figure", "4", "--grid", "801")
    assert code == 0
    _, cols = qio.read_table(out)
    psi, _ = ho_eigenfunction(2, cols["x"], __import__("qhj").PotentialModel.oscillator())
    assert np.max(np.abs(cols["product"] - psi)) <= 1e-6
    assert np.allclose(cols["product"], cols["sin_phase"] * cols["amplitude"] * cols["product"][-1]
                       / (cols["sin_phase"][-1] * cols["amplitude"][-1]), atol=1e-12)


def test_figure_nine_companion(tmp_path):
    code, out = _run(tmp_path, "figure", "9", name="fig9.csv")
    assert code == 0
    _, main = qio.read_table(out)
    _, companion = qio.read_table(tmp_path / "fig9_classical.csv")
    assert len(main["bin_center"]) == 20
    assert len(companion["x"]) > 20 and np.all(companion["p_C"] >= 0)
