# Copyright 2026 The surfflow Authors.
# SPDX-License-Identifier: Apache-2.0

import math

import numpy as np
import pytest

import surfflow


@pytest.fixture(scope="module")
def torus():
    return surfflow.Surface.flat_torus(16)


def test_mesh_counts():
    t = surfflow.Surface.from_string("flat_torus:4")
    assert (t.num_vertices, t.num_edges, t.num_faces) == (16, 48, 32)
    assert t.genus == 1 and t.harmonic_dimension == 2
    s = surfflow.Surface.icosphere(1)
    assert s.euler_characteristic == 2 and s.harmonic_dimension == 0
    with pytest.raises(surfflow.ConfigError):
        surfflow.Surface.from_string("klein:4")


def test_d_of_d_and_biot_savart(torus):
    rng = np.random.default_rng(0)
    f = rng.standard_normal(torus.num_vertices)
    assert np.abs(torus.d1(torus.d0(f))).max() < 1e-12

    omega = f - torus.mean(f)
    flux = torus.biot_savart(omega)
    assert np.abs(torus.d1(flux)).max() < 1e-12 * np.abs(flux).max()
    back = torus.curl(flux)
    w = torus.vertex_areas
    assert math.sqrt(w @ (back - omega) ** 2) <= 1e-8 * math.sqrt(w @ omega**2)

    with pytest.raises(surfflow.HodgeError):
        torus.biot_savart(np.ones(torus.num_vertices))


def test_exp_of_shear(torus):
    y = torus.coordinates()[:, 1]
    omega = -0.1 * 2 * math.pi * np.cos(2 * math.pi * y)
    image, area_error, folded = torus.exp_map(omega)
    assert folded == 0 and area_error < 2e-2
    assert image.shape == (torus.num_vertices, 3)

    still, area_error, _ = torus.exp_map(np.zeros(torus.num_vertices))
    assert np.array_equal(still, torus.coordinates())
    assert area_error <= 1e-14


def test_run_conserves_energy(torus):
    y = torus.coordinates()[:, 1]
    omega = -2 * math.pi * np.cos(2 * math.pi * y)
    final, diagnostics = torus.run(omega, T=0.25, dt=1 / 64)
    assert len(diagnostics["energy"]) == 17
    assert abs(diagnostics["energy"][-1] / diagnostics["energy"][0] - 1) < 1e-2
    assert final.shape == omega.shape


def test_spectral_basis_and_slopes():
    s = surfflow.Surface.flat_torus(32)
    basis = surfflow.SpectralBasis(s, 80)
    lam = basis.eigenvalues
    assert lam[0] == pytest.approx(0.0, abs=1e-9)
    assert lam[1] == pytest.approx(4 * math.pi**2, rel=1e-2)
    f = basis.synthetic_field(2.5, 1, 80, 3)
    slope, residual = basis.slope(f)
    assert slope == pytest.approx(2.5, abs=0.1) and residual < 0.2
    one = np.ones(s.num_vertices)
    p = basis.paraproduct(one, f)
    assert np.linalg.norm(p - f) < 0.05 * np.linalg.norm(f)


def test_symbols():
    xi = np.array([1.0, 0.0])
    s = surfflow.symbol_biot_savart(xi)
    assert abs(s[0]) < 1e-15 and abs(s[1] + 1j / (2 * math.pi)) < 1e-15
    assert surfflow.symbol_main(xi, np.eye(2)) == pytest.approx(1.0, abs=1e-12)
    assert surfflow.symbol_main(xi, np.diag([2.0, 0.5])) == pytest.approx(4.0, abs=1e-12)


def test_config_and_commands(tmp_path):
    text = "mesh = flat_torus:16\nmodes = 30\n"
    assert "modes = 30" in surfflow.format_config(text)
    with pytest.raises(surfflow.ConfigError, match="config:1: unknown key"):
        surfflow.format_config("speed = 3\n")

    ok, checks, files = surfflow.command("verify", text, tmp_path / "a", seed=4)
    assert ok and checks and all(c[1] for c in checks)
    surfflow.command("verify", text, tmp_path / "b", seed=4)
    assert (tmp_path / "a" / "verify_report.txt").read_bytes() == (tmp_path / "b" / "verify_report.txt").read_bytes()
    with pytest.raises(ValueError):
        surfflow.command("fly", text, tmp_path / "c", seed=1)
