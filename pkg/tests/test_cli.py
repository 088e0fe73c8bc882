import io
import json
import subprocess
import sys

import numpy as np
import pytest

from biqutrit.cli import main
from biqutrit.moments import QutritState

REPO = __import__("pathlib").Path(__file__).resolve().parents[1]
DEFAULT_CONFIG = REPO / "configs" / "sweep_default.json"


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_state(tmp_path, state, name="state.json"):
    path = tmp_path / name
    path.write_text(json.dumps(state.to_dict()))
    return str(path)


def test_prepare_alpha_zero(capsys):
    code, out, err = run(["prepare", "--alpha", "0"], capsys)
    assert code == 0
    c = QutritState.from_dict(json.loads(out)).amplitudes
    np.testing.assert_allclose(abs(c), [0, 0, 1], atol=1e-15)
    assert "delta" in err


def test_prepare_with_delta(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"delta_rad": np.pi / 4}))
    code, out, _ = run(["prepare", "--alpha", "45", "--config", str(cfg)], capsys)
    assert code == 0
    # delta = pi/4, alpha = 45: t = 1/sqrt2, r = i/sqrt2, third column of G
    want = np.array([-0.5, 1j * np.sqrt(2) * 0.5, 0.5])
    np.testing.assert_allclose(QutritState.from_dict(json.loads(out)).amplitudes, want, atol=1e-15)


def test_prepare_missing_config(capsys):
    code, _, err = run(["prepare", "--alpha", "0", "--config", "/nonexistent/cfg.json"], capsys)
    assert code == 2 and "error" in err


def test_simulate_basis_state(tmp_path, capsys):
    path = write_state(tmp_path, QutritState.from_amplitudes([0, 1, 0]))
    code, out, _ = run(["simulate", "--state", path], capsys)
    rates = json.loads(out)["rates"]
    assert code == 0
    assert rates[1] == pytest.approx(0.25)
    assert rates[0] == pytest.approx(0) and rates[2] == pytest.approx(0)


def test_simulate_seeded(tmp_path, capsys):
    path = write_state(tmp_path, QutritState.from_amplitudes([0.6, 0.8j, 0]))
    argv = ["simulate", "--state", path, "--noise", "poisson", "--total", "1000", "--seed", "3"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b
    assert json.loads(a)["total_per_setting"] == 1000


def test_simulate_bad_total(tmp_path, capsys):
    path = write_state(tmp_path, QutritState.from_amplitudes([1, 0, 0]))
    code, _, _ = run(["simulate", "--state", path, "--noise", "poisson", "--total", "0"], capsys)
    assert code == 2


def test_invert_from_stdin(tmp_path, capsys, monkeypatch):
    state = QutritState.from_amplitudes(np.array([0.3, 0.5j, -0.2 + 0.4j]) / np.linalg.norm([0.3, 0.5, 0.2, 0.4]))
    _, moments, _ = run(["simulate", "--state", write_state(tmp_path, state)], capsys)
    code, out, _ = run(["invert", "--moments", "-"], capsys, stdin=moments, monkeypatch=monkeypatch)
    assert code == 0
    rho = np.array(json.loads(out)["rho_raw"])
    rho = rho[..., 0] + 1j * rho[..., 1]
    assert np.linalg.norm(rho - state.rho) < 1e-10


def test_invert_pure_seven(tmp_path, capsys):
    state = QutritState.from_amplitudes([0.6, 0.64j, 0.48])
    _, moments, _ = run(["simulate", "--state", write_state(tmp_path, state)], capsys)
    doc = json.loads(moments)
    doc["rates"] = doc["rates"][:7]
    path = tmp_path / "m7.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(["invert", "--moments", str(path), "--pure"], capsys)
    res = json.loads(out)
    assert code == 0 and res["e_source"] == "quotient"


def test_invert_malformed(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"rates": [0.1, 0.2,\n ]}')
    code, _, err = run(["invert", "--moments", str(path)], capsys)
    assert code == 2
    assert "line 2" in err


def test_sweep_formats(tmp_path, capsys):
    code, _, err = run(["sweep", "--config", str(DEFAULT_CONFIG), "--out", str(tmp_path)], capsys)
    assert code == 0 and "37 records" in err
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 38
    code, _, _ = run(["sweep", "--config", str(DEFAULT_CONFIG), "--out", str(tmp_path), "--format", "json"], capsys)
    assert len(json.loads((tmp_path / "sweep.json").read_text())["records"]) == 37


def test_check_codes(tmp_path, capsys):
    pure = write_state(tmp_path, QutritState.from_amplitudes([0.6, 0.8, 0]), "pure.json")
    assert run(["check", "--state", pure, "--pure"], capsys)[0] == 0
    mixed = write_state(tmp_path, QutritState.from_rho(np.eye(3) / 3), "mixed.json")
    assert run(["check", "--state", mixed], capsys)[0] == 0
    assert run(["check", "--state", mixed, "--pure"], capsys)[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"rho": [[[0.5, 0], [0, 0], [0, 0]], [[0, 0], [0.6, 0], [0, 0]],
                                       [[0, 0], [0, 0], [0, 0]]]}))
    code, out, _ = run(["check", "--state", str(bad)], capsys)
    assert code == 1
    assert json.loads(out)["normalization_residual"] == pytest.approx(0.2)


def test_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["prepare"])
    assert err.value.code == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "biqutrit", "prepare", "--alpha", "10"],
                          capture_output=True, text=True, check=True)
    assert "rho" in json.loads(proc.stdout)
