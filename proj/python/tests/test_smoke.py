import numpy as np
import pytest

import hspec


def test_version_and_corpus():
    assert hspec.__version__
    names = hspec.corpus_names()
    assert "identity" in names and "half" in names and "wavy6" in names


def test_scale_section_is_diagonal():
    w = hspec.build_wco(hspec.HoloMap.scale(0.5), 16, 64)
    assert w.shape == (64, 16)
    expect = np.zeros((64, 16))
    expect[np.arange(16), np.arange(16)] = 0.5 ** (np.arange(16) + 0.5)
    assert np.max(np.abs(w - expect)) < 1e-15


def test_singular_values_match_numpy():
    w = hspec.build_wco(hspec.HoloMap.named("half"), 32, 128)
    spec = hspec.singular_values(w)
    ref = np.linalg.svd(w, compute_uv=False)
    assert np.max(np.abs(np.array(spec["values"]) - ref)) < 1e-12
    assert len(spec["trusted"]) == 32
    compact = hspec.singular_values(hspec.build_wco(hspec.HoloMap.named("scale05"), 32, 128))
    assert all(compact["trusted"][:16])


def test_map_evaluation_and_json_round_trip():
    m = hspec.HoloMap.mobius(0.3)
    assert abs(m(0.3)) < 1e-15
    assert abs(m.derivative(0.0) - (1 - 0.09)) < 1e-15
    back = hspec.HoloMap.from_json(m.to_json())
    assert abs(back(0.2 + 0.1j) - m(0.2 + 0.1j)) < 1e-15


def test_gram_equals_section_modulus():
    m = hspec.HoloMap.named("bump2")
    w = hspec.build_wco(m, 32, 128)
    g = hspec.gram_matrix(m, 32, 1024)
    assert np.max(np.abs(w.conj().T @ w - g)) < 1e-8


def test_exterior_power_determinant():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    top = hspec.exterior_power(a, 4)
    assert abs(top[0, 0] - np.linalg.det(a)) < 1e-12


def test_count_zeros_and_eigenpairs():
    assert hspec.count_zeros(np.array([0, 0, 1], dtype=complex)) == 2
    pairs = hspec.eigenpairs(hspec.HoloMap.scale(0.5), 16, 128)
    assert abs(pairs[0]["lambda"] - 0.5) < 1e-15
    assert abs(pairs[2]["lambda"] - 0.5 ** 5) < 1e-15


def test_errors_are_typed():
    with pytest.raises(hspec.DomainError):
        hspec.build_wco(hspec.HoloMap.poly([0.3, 0.8]), 4, 16)
    with pytest.raises(hspec.ConfigError):
        hspec.HoloMap.named("no-such-map")
    assert issubclass(hspec.ConfigError, hspec.HspecError)


def test_run_experiment(tmp_path):
    code, log = hspec.run_experiment({"suite": "selftest", "out_dir": str(tmp_path)})
    assert code == hspec.EXIT_PASS, log
    assert (tmp_path / "manifest.json").exists()
    code, log = hspec.run_experiment({"suite": "singular", "map": "nope"})
    assert code == hspec.EXIT_CONFIG
    assert "config error" in log
