import numpy as np
import pytest

from spin1wave import fields
from spin1wave.fields import Grid, VectorField


GRID = Grid.cubic(16)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(15, 16, 16, 1.0, 1.0, 1.0)  # odd
    with pytest.raises(ValueError):
        Grid(2, 16, 16, 1.0, 1.0, 1.0)  # too small
    with pytest.raises(ValueError):
        Grid(16, 16, 16, 0.0, 1.0, 1.0)  # empty box


def test_curl_of_plane_wave():
    k = fields.mode_wavevector(GRID, (0, 0, 1))
    f = fields.plane_wave(GRID, k, (1, 0, 0))
    cf = fields.curl(f)
    expected = fields.plane_wave(GRID, k, (0, 1j * k[2], 0))
    assert np.max(np.abs(cf.data - expected.data)) <= 1e-13


def test_curl_of_constant_is_zero():
    f = VectorField(GRID, np.ones((3, *GRID.shape), complex))
    assert fields.max_abs(fields.curl(f)) <= 1e-14


def test_divergence_of_transverse_plane_wave_is_zero():
    k = fields.mode_wavevector(GRID, (0, 0, 2))
    f = fields.plane_wave(GRID, k, (1, 1j, 0))  # eps perpendicular to k
    assert np.max(np.abs(fields.divergence(f))) <= 1e-13


def test_divergence_of_longitudinal_plane_wave():
    k = fields.mode_wavevector(GRID, (0, 0, 2))
    f = fields.plane_wave(GRID, k, (0, 0, 1))
    div = fields.divergence(f)
    expected = 1j * k[2] * fields.plane_wave(GRID, k, (1, 0, 0)).data[0]
    assert np.max(np.abs(div - expected)) <= 1e-12


def test_div_curl_is_zero():
    rng = np.random.default_rng(1)
    f = fields.random_vector_field(GRID, 2.0, rng)
    r = np.max(np.abs(fields.divergence(fields.curl(f))))
    assert r <= 1e-13 * fields.max_abs(f) * 16.0


def test_curl_grad_is_zero():
    rng = np.random.default_rng(2)
    s = fields.random_vector_field(GRID, 2.0, rng).data[0]
    g = fields.gradient(GRID, s)
    assert fields.max_abs(fields.curl(g)) <= 1e-12


def test_parseval_and_roundtrip():
    rng = np.random.default_rng(3)
    f = fields.random_vector_field(GRID, 3.0, rng)
    fh = fields.fftn(f.data)
    grid_l2 = np.sum(np.abs(f.data) ** 2)
    spec_l2 = np.sum(np.abs(fh) ** 2) / GRID.npoints
    assert abs(grid_l2 - spec_l2) <= 1e-13 * grid_l2
    back = fields.ifftn(fh)
    assert np.max(np.abs(back - f.data)) <= 1e-13 * fields.max_abs(f)


def test_projector_idempotent():
    rng = np.random.default_rng(4)
    f = fields.random_vector_field(GRID, 2.0, rng)
    p1 = fields.project_transverse(f)
    p2 = fields.project_transverse(p1)
    assert np.max(np.abs(p2.data - p1.data)) <= 1e-14 * fields.max_abs(f)


def test_projector_self_adjoint():
    rng = np.random.default_rng(5)
    f = fields.random_vector_field(GRID, 2.0, rng)
    g = fields.random_vector_field(GRID, 2.0, rng)
    lhs = fields.inner(fields.project_transverse(f), g)
    rhs = fields.inner(f, fields.project_transverse(g))
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1.0)


def test_projector_output_divergence_free():
    rng = np.random.default_rng(6)
    f = fields.random_vector_field(GRID, 2.0, rng)
    p = fields.project_transverse(f)
    assert np.max(np.abs(fields.divergence(p))) <= 1e-12 * fields.max_abs(f)


def test_projector_kills_longitudinal_keeps_transverse():
    k = fields.mode_wavevector(GRID, (0, 0, 2))
    lng = fields.plane_wave(GRID, k, (0, 0, 1))
    assert fields.max_abs(fields.project_transverse(lng)) <= 1e-14
    trans = fields.plane_wave(GRID, k, (1, 0, 0))
    out = fields.project_transverse(trans)
    assert np.max(np.abs(out.data - trans.data)) <= 1e-14


def test_projector_leaves_k0_mode_unchanged():
    f = VectorField(GRID, np.ones((3, *GRID.shape), complex))
    out = fields.project_transverse(f)
    assert np.max(np.abs(out.data - f.data)) <= 1e-14


def test_random_field_reproducible_and_band_limited():
    f1 = fields.random_vector_field(GRID, 2.0, 123)
    f2 = fields.random_vector_field(GRID, 2.0, 123)
    assert np.array_equal(f1.data, f2.data)
    fh = fields.fftn(f1.data)
    k2 = fields.k_squared(GRID)
    kmax = 0.25 * fields.nyquist_wavenumber(GRID)
    # transform round trip leaves only fp dust outside the band
    assert np.max(np.abs(fh[:, k2 > kmax**2])) <= 1e-13 * np.max(np.abs(fh))


def test_random_wave_field_unit_norm_and_transverse():
    psi = fields.random_wave_field(GRID, 1.0, 2.0, seed=9, transverse=True)
    assert abs(psi.norm() - 1.0) <= 1e-13
    du, dv = fields.divergence_residuals(psi)
    assert max(du, dv) <= 1e-13


def test_coordinates_centered_sawtooth():
    x = fields.coordinates(GRID)
    assert x[0].min() == -GRID.lx / 2
    assert abs(x[0].max() - (GRID.lx / 2 - GRID.spacing[0])) <= 1e-14
    # midpoint sample sits at the origin
    assert abs(x[0][GRID.nx // 2, 0, 0]) <= 1e-14


def test_wavevectors_nyquist_zeroing():
    k = fields.wavevectors(GRID)
    assert k[0][GRID.nx // 2, 0, 0] == 0.0
    k_full = fields.k_squared(GRID)
    assert k_full[GRID.nx // 2, 0, 0] > 0.0


def test_grid_mismatch_raises():
    other = Grid.cubic(8)
    f = VectorField.zeros(GRID)
    g = VectorField.zeros(other)
    with pytest.raises(Exception):
        _ = f + g


def test_plane_eigenmode_field_matches_matrix_eigenmode():
    from spin1wave import dynamics

    psi = fields.plane_eigenmode_field(GRID, 1.0, (0, 0, 1), +1, "t1")
    h = dynamics.apply_free_hamiltonian(psi)
    k = fields.mode_wavevector(GRID, (0, 0, 1))
    lam = np.hypot(np.linalg.norm(k), 1.0)
    assert np.max(np.abs(h.stack() - lam * psi.stack())) <= 1e-12
