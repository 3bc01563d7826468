import numpy as np
import pytest

from kdvres.grid import GridSpec, SpectralState, project_coeffs


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(3)
    with pytest.raises(ValueError):
        GridSpec(7)
    with pytest.raises(ValueError):
        GridSpec(2)
    GridSpec(4)


def test_modes_layout():
    g = GridSpec(8)
    assert list(g.modes) == [0, 1, 2, 3, -4, -3, -2, -1]
    assert g.nyquist_index == 4
    assert g.nodes[0] == 0.0
    assert np.isclose(g.nodes[1], np.pi / 4)


def test_projection_zeroes_mean_and_nyquist():
    rng = np.random.default_rng(0)
    c = rng.normal(size=16) + 1j * rng.normal(size=16)
    out = project_coeffs(c, 16)
    assert out[0] == 0.0
    assert out[8] == 0.0


def test_projection_hermitian():
    rng = np.random.default_rng(1)
    c = rng.normal(size=16) + 1j * rng.normal(size=16)
    out = project_coeffs(c, 16)
    neg = (-np.arange(16)) % 16
    assert np.allclose(out, np.conj(out[neg]))


def test_projection_idempotent():
    rng = np.random.default_rng(2)
    c = rng.normal(size=32) + 1j * rng.normal(size=32)
    once = project_coeffs(c, 32)
    twice = project_coeffs(once, 32)
    assert np.array_equal(once, twice)


def test_state_construction_projects():
    c = np.ones(8, dtype=np.complex128)
    s = SpectralState.from_coeffs(GridSpec(8), c)
    assert s.coeffs[0] == 0.0
    assert s.coeffs[4] == 0.0


def test_state_mode_lookup():
    g = GridSpec(8)
    c = np.zeros(8, dtype=np.complex128)
    c[1] = 1.0 + 2.0j
    c[7] = 1.0 - 2.0j
    s = SpectralState(g, c)
    assert s.mode(1) == 1.0 + 2.0j
    assert s.mode(-1) == 1.0 - 2.0j


def test_state_arithmetic():
    g = GridSpec(8)
    c = np.zeros(8, dtype=np.complex128)
    c[1], c[7] = 1.0, 1.0
    s = SpectralState(g, c)
    d = (s + s) - s.scaled(2.0)
    assert np.allclose(d.coeffs, 0.0)


def test_coeffs_read_only():
    g = GridSpec(8)
    s = SpectralState.zero(g)
    with pytest.raises(ValueError):
        s.coeffs[1] = 1.0
