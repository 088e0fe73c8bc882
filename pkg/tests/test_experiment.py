import csv
import json

import numpy as np
import pytest

from biqutrit import experiment
from biqutrit.experiment import CSV_COLUMNS, SweepConfig, emit, prepare, run_sweep
from biqutrit.jones import plate_coefficients
from biqutrit.moments import check_constraints, k4_from_rho


@pytest.fixture(scope="module")
def exact_records():
    return run_sweep(SweepConfig())


def test_default_config():
    cfg = SweepConfig()
    assert cfg.alpha_grid[0] == 0 and cfg.alpha_grid[-1] == 90 and len(cfg.alpha_grid) == 37
    # pi * dn * h / lambda with h = 824 um, lambda = 702 nm
    assert cfg.delta == pytest.approx(np.pi * -0.00906 * 824e3 / 702)
    assert SweepConfig(delta_rad=0.4).delta == 0.4


@pytest.mark.parametrize("bad", [
    {"alpha_grid": []},
    {"plate_thickness_um": 0},
    {"wavelength_nm": -1},
    {"noise": "gaussian"},
    {"noise": "poisson"},
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        SweepConfig(**bad)


def test_config_from_dict():
    cfg = SweepConfig.from_dict({"alpha_grid": {"start": 0, "stop": 10, "step": 2.5}, "delta_rad": 1.0})
    assert cfg.alpha_grid == [0, 2.5, 5, 7.5, 10]
    with pytest.raises(ValueError, match="unknown"):
        SweepConfig.from_dict({"thickness": 3})


def test_prepare_alpha_zero():
    for delta in (0.3, 1.2, -33.4):
        c = prepare(0, SweepConfig(delta_rad=delta)).amplitudes
        np.testing.assert_allclose(abs(c) ** 2, [0, 0, 1], atol=1e-15)


def test_prepare_population_formulas(rng):
    for _ in range(30):
        delta, alpha = rng.uniform(-4, 4), rng.uniform(-180, 180)
        c = prepare(alpha, SweepConfig(delta_rad=delta)).amplitudes
        t, _ = plate_coefficients(delta, np.deg2rad(alpha))
        s2a = np.sin(2 * np.deg2rad(alpha))
        np.testing.assert_allclose(abs(c) ** 2, [
            np.sin(delta) ** 4 * s2a ** 4,
            2 * abs(t) ** 2 * np.sin(delta) ** 2 * s2a ** 2,
            abs(t) ** 4,
        ], atol=1e-13)
        assert np.sum(abs(c) ** 2) == pytest.approx(1, abs=1e-14)


def test_prepared_states_are_pure():
    cfg = SweepConfig()
    for alpha in cfg.alpha_grid:
        assert check_constraints(k4_from_rho(prepare(alpha, cfg)), pure_hypothesis=True).passed


def test_periodicity():
    cfg = SweepConfig()
    for alpha in np.linspace(0, 90, 13):
        a = prepare(alpha, cfg)
        pops = np.diag(a.rho).real
        np.testing.assert_allclose(np.diag(prepare(alpha + 90, cfg).rho).real, pops, atol=1e-14)
        # the full state (hence every phase) repeats after a half turn
        np.testing.assert_allclose(prepare(alpha + 180, cfg).rho, a.rho, atol=1e-14)


def test_exact_sweep_round_trip(exact_records):
    assert len(exact_records) == 37
    for rec in exact_records:
        np.testing.assert_allclose(np.diag(rec.reconstruction.rho_physical).real,
                                   np.diag(rec.true_state.rho).real, atol=1e-10)
        t, r = rec.true_extraction(), rec.reconstructed_extraction()
        pops = t.populations
        assert r.reference == t.reference
        if pops[1] > 1e-6 and pops[0] > 1e-6:
            assert abs(np.angle(np.exp(1j * (t.phi12 - r.phi12)))) < 1e-8
        if pops[1] > 1e-6 and pops[2] > 1e-6:
            assert abs(np.angle(np.exp(1j * (t.phi32 - r.phi32)))) < 1e-8


def test_k4_traces_agree(exact_records):
    for rec in exact_records:
        truth = k4_from_rho(rec.true_state)
        assert abs(rec.reconstruction.k4.D - truth.D) < 1e-10
        assert abs(rec.reconstruction.k4.F - truth.F) < 1e-10


def test_noisy_k4_traces_agree_within_noise():
    cfg = SweepConfig(noise="poisson", total_per_setting=10 ** 6, seed=4)
    for rec in run_sweep(cfg):
        truth = k4_from_rho(rec.true_state)
        assert abs(rec.reconstruction.k4.D - truth.D) < 0.02
        assert abs(rec.reconstruction.k4.F - truth.F) < 0.02


def test_emit_csv(tmp_path, exact_records):
    path = emit(exact_records, "csv", tmp_path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == 38
    first = dict(zip(rows[0], map(float, rows[1])))
    assert first["alpha_deg"] == 0 and first["c3_sq_true"] == pytest.approx(1)


def test_emit_json_has_alpha25_point(tmp_path, exact_records):
    path = emit(exact_records, "json", tmp_path, SweepConfig())
    doc = json.loads(path.read_text())
    assert doc["delta_rad"] == pytest.approx(SweepConfig().delta)
    (rec,) = [r for r in doc["records"] if r["alpha_deg"] == 25]
    rho = np.array(rec["reconstruction"]["rho_physical"])
    assert rho.shape == (3, 3, 2)
    truth = np.array(rec["true_state"]["rho"])
    np.testing.assert_allclose(rho, truth, atol=1e-10)


def test_emit_empty(tmp_path):
    with pytest.raises(ValueError):
        emit([], "csv", tmp_path / "out")
    assert not (tmp_path / "out").exists()


def test_emit_io_error(tmp_path, exact_records):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit(exact_records[:1], "csv", blocker)


def test_poisson_sweep_reproducible(tmp_path):
    cfg = SweepConfig(alpha_grid=[0, 25, 45], noise="poisson", total_per_setting=5000, seed=9)
    a = emit(run_sweep(cfg), "json", tmp_path / "a", cfg).read_bytes()
    b = emit(run_sweep(cfg), "json", tmp_path / "b", cfg).read_bytes()
    assert a == b


def test_density_table(exact_records):
    table = experiment.density_table(experiment.record_at(exact_records, 25))
    assert table["alpha_deg"] == 25
    np.testing.assert_allclose(table["rho_physical"], table["rho_true"], atol=1e-10)
