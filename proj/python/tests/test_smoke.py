import math

import numpy as np
import pytest

import lrcone


def test_coupling_matrix_open_chain():
    w = lrcone.coupling_matrix(lrcone.model(1))
    expected = np.array([[5.0, -2.0, 0.0], [-2.0, 5.0, -2.0], [0.0, -2.0, 5.0]])
    assert np.array_equal(w, expected)


def test_evolution_matrices_identities():
    m = lrcone.model(4, "cyclic")
    w = lrcone.coupling_matrix(m)
    e0 = lrcone.evolution_matrices(m, 0.0)
    assert np.array_equal(e0["A"], np.eye(9))
    assert not e0["B"].any()
    e = lrcone.evolution_matrices(m, 1.3)
    assert np.abs(e["A"] @ e["A"] + w @ e["B"] @ e["B"] - np.eye(9)).max() < 1e-9
    c = lrcone.evolution_matrices(m, 1.3, "circulant")
    assert np.abs(c["B"] - e["B"]).max() < 1e-12


def test_weyl_commutator_at_time_zero():
    m = lrcone.model(2)
    q0 = lrcone.phase_point(m, 0, u=1.0)
    p0 = lrcone.phase_point(m, 0, v=1.0)
    p1 = lrcone.phase_point(m, 1, v=1.0)
    # [Q, P] = i gives sigma = 1, so 2|sin(1/2)|.
    assert lrcone.weyl_commutator_norm(m, 0.0, q0, p0) == pytest.approx(2.0 * math.sin(0.5), abs=1e-14)
    assert lrcone.weyl_commutator_norm(m, 0.0, q0, p1) == 0.0
    assert lrcone.weyl_commutator_norm(m, 1.0, q0, p1) > 0.0


def test_quadratic_velocity_anchor():
    v = lrcone.velocity_bound_quadratic(5.0, 2.0)
    assert v["value"] == pytest.approx(1.0, abs=1e-2)


def test_cone_scan_and_velocity_fit():
    m = lrcone.model(64, "cyclic")
    a = lrcone.phase_point(m, 0, u=1.0)
    # Far-field shifts; near the origin the wave front has a finite-distance offset.
    scan = lrcone.cone_scan_harmonic(m, a, a, range(16, 65), [0.1 * k for k in range(811)])
    assert len(scan["points"]) == 49 * 811
    assert scan["source"] == "harmonic-exact"
    report = lrcone.fit_velocity(scan, 1e-3)
    assert report["defined"]
    assert 0.9 < report["v_empirical"] < 1.1


def test_run_experiment_writes_manifest(tmp_path):
    cfg = {
        "experiment": "dispersion",
        "model": {"n_sites": 8, "boundary": "cyclic", "a": 5, "b": 2},
        "grids": {"t": [0.5]},
        "laurent_K": 4,
    }
    manifest = lrcone.run_experiment(cfg, tmp_path)
    assert manifest["experiment"] == "dispersion"
    assert (tmp_path / "manifest.json").exists()


def test_errors_map_to_python_exceptions():
    with pytest.raises(lrcone.InvalidArgument):
        lrcone.coupling_matrix(lrcone.model(2, a=3.0, b=2.0))
    with pytest.raises(lrcone.ConfigError):
        lrcone.run_experiment({"experiment": "bogus"})
    assert issubclass(lrcone.BudgetExceeded, lrcone.Error)
