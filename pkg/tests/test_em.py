import numpy as np
import pytest

from spin1wave import algebra, dynamics, em_coupling as em, fields
from spin1wave.errors import NonFiniteState, StepTooLarge

GRID = fields.Grid.cubic(16)
MASS = 1.0


@pytest.fixture(scope="module")
def ext():
    return em.random_smooth_external(GRID, 0.5, seed=11, amplitude=0.2, nmax=1)


@pytest.fixture(scope="module")
def psi():
    return fields.random_wave_field(GRID, MASS, 1.5, seed=5, transverse=True, kmax=2.0)


def test_external_field_shapes_validated():
    with pytest.raises(ValueError):
        em.ExternalField(GRID, 1.0, np.zeros((4, 4, 4)), np.zeros((3, *GRID.shape)))


def test_derived_magnetic_field_divergence_free(ext):
    h = fields.VectorField(GRID, ext.hvec.astype(complex))
    assert np.max(np.abs(fields.divergence(h))) <= 1e-12


def test_zero_field_reduces_to_free_hamiltonian(psi):
    ext0 = em.ExternalField.zero(GRID, 0.0)
    a = em.apply_hamiltonian_A(psi, ext0).stack()
    b = dynamics.apply_free_hamiltonian(psi).stack()
    assert np.max(np.abs(a - b)) <= 1e-14


def test_constant_vector_potential_shifts_momentum():
    # plane wave at mode k with constant A = A0 z-hat: coupled application
    # equals the free matrix at momentum k - e*A0 z-hat
    a0, e = 0.7, 0.5
    ext_c = em.ExternalField(
        GRID, e, np.zeros(GRID.shape), np.broadcast_to(
            np.array([0.0, 0.0, a0])[:, None, None, None], (3, *GRID.shape)
        ).copy(),
    )
    k = fields.mode_wavevector(GRID, (0, 1, 1))
    amp = np.array([0.3, -0.1j, 0.2, 0.5, 0.4j, -0.2], complex)
    ph = fields.plane_wave(GRID, k, (1, 0, 0)).data[0]
    psi_pw = fields.WaveField.from_stack(GRID, amp[:, None, None, None] * ph, MASS)
    out = em.apply_hamiltonian_A(psi_pw, ext_c).stack()
    h_shift = algebra.hamiltonian_symbol(k - e * np.array([0, 0, a0]), MASS)
    expected = (h_shift @ amp)[:, None, None, None] * ph
    assert np.max(np.abs(out - expected)) <= 1e-12


def test_generator_hermitian(ext):
    rep = em.hermiticity_check(ext, MASS, trials=4, seed=2)
    assert rep.all_passed
    assert rep.value("generator_hermiticity") <= 1e-12


def test_covariant_projection_reduces_to_transverse_at_zero_charge(psi):
    ext0 = em.ExternalField.zero(GRID, 0.0)
    res = em.covariant_project(psi, ext0)
    ref = fields.project_constraints(psi)
    assert np.max(np.abs(res.field.stack() - ref.stack())) <= 1e-13


def test_covariant_projection_fixed_point(psi, ext):
    first = em.covariant_project(psi, ext)
    again = em.covariant_project(first.field, ext)
    assert again.iterations == (0, 0)
    assert np.max(np.abs(again.field.stack() - first.field.stack())) <= 1e-12


def test_covariant_projection_residual_and_idempotence(psi, ext):
    res = em.covariant_project(psi, ext)
    scale = np.max(np.abs(psi.stack()))
    ru, rv = em.constraint_residuals(res.field, ext)
    assert max(ru, rv) <= 1e-10 * scale
    res2 = em.covariant_project(res.field, ext)
    diff = np.max(np.abs(res2.field.stack() - res.field.stack()))
    assert diff <= 1e-9 * scale


def test_squared_hamiltonian_identity(ext):
    rep = em.squared_hamiltonian_check(ext, MASS, trials=6, seed=3)
    assert rep.value("squared_hamiltonian_identity") <= 1e-12
    assert rep.value("non_anticommuting_control") >= 1e-3


def test_squared_hamiltonian_identity_massless(ext):
    rep = em.squared_hamiltonian_check(
        em.ExternalField(GRID, ext.charge, ext.phi, ext.avec), 0.0,
        trials=3, seed=4, include_negative_control=False,
    )
    assert rep.value("squared_hamiltonian_identity") <= 1e-12


def test_constrained_square_identity_at_24():
    grid = fields.Grid.cubic(24)
    ext24 = em.random_smooth_external(grid, 0.5, seed=11, amplitude=0.2, nmax=1)
    rep = em.constrained_square_check(ext24, MASS, trials=2, seed=4)
    assert rep.value("projected_identity_residual") <= 1e-8
    assert rep.value("unprojected_negative_control") >= 1e-2


def test_constrained_square_identity_pure_scalar_potential():
    # A = 0: the covariant constraints are the plain transversality ones and
    # the identity becomes (a.p)^2 = p^2 on the transverse subspace
    phi = em.random_smooth_external(GRID, 0.5, seed=13, amplitude=0.3, nmax=1).phi
    ext_phi = em.ExternalField(GRID, 0.5, phi, np.zeros((3, *GRID.shape)))
    rep = em.constrained_square_check(ext_phi, MASS, trials=2, seed=5)
    assert rep.value("projected_identity_residual") <= 1e-12


def test_evolve_matches_exact_free_at_rk4_order(psi):
    ext0 = em.ExternalField.zero(GRID, 0.0)
    exact = dynamics.evolve_free(psi, 0.5).stack()
    d1 = np.linalg.norm(em.evolve_em(psi, ext0, 0.5, 0.01).final.stack() - exact)
    d2 = np.linalg.norm(em.evolve_em(psi, ext0, 0.5, 0.005).final.stack() - exact)
    assert 12.0 <= d1 / d2 <= 20.0


def test_constant_scalar_potential_is_global_phase(psi):
    phi0 = 0.7
    e = 0.5
    ext_p = em.ExternalField(GRID, e, np.full(GRID.shape, phi0), np.zeros((3, *GRID.shape)))
    run = em.evolve_em(psi, ext_p, 0.5, 0.005)
    expected = np.exp(-1j * e * phi0 * 0.5) * dynamics.evolve_free(psi, 0.5).stack()
    assert np.linalg.norm(run.final.stack() - expected) <= 1e-8


def test_norm_drift_over_1000_steps():
    grid = fields.Grid.cubic(12)
    psi12 = fields.random_wave_field(grid, MASS, 1.5, seed=5, transverse=True, kmax=1.5)
    ext12 = em.random_smooth_external(grid, 0.5, seed=11, amplitude=0.2, nmax=1)
    dt = 0.45 * em.stability_bound(grid, MASS, ext12)
    run = em.evolve_em(psi12, ext12, 1000 * dt, dt)
    assert abs(run.final.norm() - psi12.norm()) / psi12.norm() <= 1e-8


def test_constraint_drift_monitored_not_enforced(psi, ext):
    dt = 0.5 * em.stability_bound(GRID, MASS, ext)
    proj = em.covariant_project(psi, ext).field
    run = em.evolve_em(proj, ext, 40 * dt, dt, diag_stride=20)
    # drift is recorded in the records; no projection happens silently
    assert len(run.records) == 3
    assert run.records[-1].div_u_res >= run.records[0].div_u_res


def test_step_bound_enforced(psi, ext):
    with pytest.raises(StepTooLarge):
        em.evolve_em(psi, ext, 1.0, 1.0)


def test_non_finite_state_detected(ext):
    stack = np.full((6, *GRID.shape), np.nan, dtype=complex)
    bad = fields.WaveField.from_stack(GRID, stack, MASS)
    dt = 0.5 * em.stability_bound(GRID, MASS, ext)
    with pytest.raises(NonFiniteState):
        em.evolve_em(bad, ext, 4 * dt, dt, diag_stride=2)


def test_t_final_must_be_step_multiple(psi, ext):
    with pytest.raises(ValueError):
        em.evolve_em(psi, ext, 0.0105, 0.01)


def test_second_order_free_case_cross_checks_kgf():
    psi_low = fields.random_wave_field(GRID, MASS, 1.0, seed=9, transverse=True, kmax=1.0)
    ext0 = em.ExternalField.zero(GRID, 0.0)
    r = em.second_order_residual(psi_low, ext0, 1e-3)
    assert r <= 1e-6
    assert dynamics.kgf_residual(psi_low).transverse_res <= 1e-12


def test_second_order_ratio_vector_potential(psi, ext):
    proj = em.covariant_project(psi, ext).field
    r1 = em.second_order_residual(proj, ext, 8e-3)
    r2 = em.second_order_residual(proj, ext, 4e-3)
    assert 3.5 <= r1 / r2 <= 4.5


def test_second_order_ratio_scalar_potential(psi):
    phi = em.random_smooth_external(GRID, 0.5, seed=13, amplitude=0.3, nmax=1).phi
    ext_p = em.ExternalField(GRID, 0.5, phi, np.zeros((3, *GRID.shape)))
    proj = em.covariant_project(psi, ext_p).field
    r1 = em.second_order_residual(proj, ext_p, 8e-3)
    r2 = em.second_order_residual(proj, ext_p, 4e-3)
    assert 3.5 <= r1 / r2 <= 4.5


def test_second_order_zero_field(ext):
    assert em.second_order_residual(fields.WaveField.zeros(GRID, MASS), ext, 1e-3) == 0.0


def test_gauge_covariance(psi, ext):
    # chi small enough that the truncation tail of the non-band-limited
    # phase factor stays below the RK4 error at this grid size
    x = fields.coordinates(GRID)
    chi = 0.05 * np.cos(x[0]) + 0.035 * np.sin(x[1])
    dt = 0.02
    dev = em.gauge_covariance_deviation(psi, ext, chi, 0.2, dt)
    # integrator self-error of the same run bounds the acceptable deviation
    a = em.evolve_em(psi, ext, 0.2, dt).final.stack()
    b = em.evolve_em(psi, ext, 0.2, dt / 2).final.stack()
    self_err = np.linalg.norm(a - b) / np.linalg.norm(a)
    assert dev <= max(4.0 * self_err, 1e-9)


def test_landau_free_case_lowest_is_mass_squared():
    lv = em.landau_spectrum(12, 1, MASS, 0.0)
    assert abs(lv.e_squared[0] - MASS**2) <= 1e-12
    assert lv.eB == 0.0


def test_landau_clusters_at_16():
    lv = em.landau_spectrum(16, 1, MASS, 1.0)
    assert abs(lv.eB - 1.0 / (2.0 * np.pi)) <= 1e-15
    analysis = em.landau_cluster_analysis(lv)
    assert analysis["all_passed"]
    assert abs(analysis["sigma_splitting_over_eB"] - 1.0) <= 0.05
    for check in analysis["level_checks"]:
        assert check["passed"]


def test_landau_flux_validation():
    with pytest.raises(ValueError):
        em.landau_spectrum(8, 0, MASS, 1.0)


def test_dealias_mask_cuts_upper_third():
    m = em.dealias_mask(GRID)
    idx = np.rint(np.fft.fftfreq(16) * 16).astype(int)
    assert m[np.abs(idx) == 5, 0, 0].all() == True  # 3*5 < 16
    assert not m[np.abs(idx) == 6, 0, 0].any()  # 3*6 >= 16
