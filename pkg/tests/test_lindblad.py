import numpy as np
import pytest

from blockade_sim import lindblad as L
from blockade_sim.errors import InvariantViolation, UndefinedCorrelationError
from blockade_sim.hilbert import annihilation, make_space
from blockade_sim.model import Direction, SystemParams, effective_drive

from conftest import coherent_amplitude, coherent_density, random_density, thermal_density


def test_vec_roundtrip():
    m = np.arange(9.0).reshape(3, 3)
    np.testing.assert_array_equal(L.unvec(L.vec(m), 3), m)
    assert L.vec(m)[1] == m[1, 0]


def test_liouvillian_matches_direct_action(fig2_params):
    space = make_space(4)
    p = fig2_params.replace(omega_p=3e-4, theta_p=-1.0, b_in=0.3)
    liou = L.build_liouvillian(p, Direction.FORWARD, space)
    rho = random_density(space, np.random.default_rng(1)).matrix
    from blockade_sim.model import hamiltonian
    from blockade_sim.hilbert import sigma_minus
    h = hamiltonian(p, Direction.FORWARD, space).matrix
    expected = -1j * (h @ rho - rho @ h)
    for c, rate in ((annihilation(space).matrix, 1.0), (sigma_minus(space).matrix, p.gamma)):
        cd = c.conj().T
        expected += rate * (c @ rho @ cd - 0.5 * (cd @ c @ rho + rho @ cd @ c))
    np.testing.assert_allclose(liou.apply(rho), expected, atol=1e-13)


def test_trace_preserving(fig2_params):
    space = make_space(5)
    liou = L.build_liouvillian(fig2_params, Direction.BACKWARD, space)
    np.testing.assert_allclose(L.trace_row(space) @ liou.generator, 0, atol=1e-13)


def test_vacuum_is_steady_without_drive():
    space = make_space(5)
    liou = L.build_liouvillian(SystemParams(b_in=0.0), Direction.FORWARD, space)
    rho = L.steady_state(liou, check_unique=True)
    assert abs(rho.matrix[0, 0] - 1) < 1e-12
    sol = L.solve_point(SystemParams(b_in=0.0), Direction.FORWARD)
    assert np.isnan(sol.g2) and sol.n_photon < 1e-15


@pytest.mark.parametrize("delta_c", [0.0, 0.7, 1.5])
def test_coherent_state_oracle(space10, delta_c):
    p = SystemParams(g=0.0, delta_c=delta_c, b_in=0.05)
    drive = effective_drive(p, Direction.FORWARD)
    alpha = coherent_amplitude(drive, delta_c)
    rho = L.steady_state(L.build_liouvillian(p, Direction.FORWARD, space10))
    field = np.trace(annihilation(space10).matrix @ rho.matrix)
    assert abs(field - alpha) < 1e-6
    assert L.trace_distance(rho, coherent_density(space10, alpha)) < 1e-8
    assert L.g2(rho) == pytest.approx(1.0, abs=1e-4)


def test_thermal_oracle(space10):
    rho = thermal_density(space10, 0.1)
    assert L.g2(rho) == pytest.approx(2.0, abs=1e-3)
    assert L.g3(rho) == pytest.approx(6.0, abs=1e-2)
    assert L.mean_photon_number(rho) == pytest.approx(0.1, rel=1e-6)


def test_fock_state_correlations(space10):
    assert L.g2(L.DensityMatrix.basis(space10, 1)) == 0.0
    assert L.g2(L.DensityMatrix.basis(space10, 2)) == pytest.approx(0.5)
    with pytest.raises(UndefinedCorrelationError):
        L.g2(L.DensityMatrix.basis(space10, 0, 1))


def test_photon_distribution_traces_atom(space10):
    psi = space10.basis_vector(1, 0) + space10.basis_vector(1, 1)
    p = L.photon_distribution(L.DensityMatrix.pure(space10, psi))
    assert p[1] == pytest.approx(1.0)


def test_steady_state_invariants(fig2_params):
    sol = L.solve_point(fig2_params, Direction.FORWARD)
    assert sol.rho.invariant_violations() == []
    assert sol.residual < 1e-8
    assert sol.top_population < 1e-10


def test_invariant_violation_detected(space10):
    bad = L.DensityMatrix(space10, np.diag(np.r_[1.5, -0.5, np.zeros(20)]))
    assert len(bad.invariant_violations()) == 1
    with pytest.raises(InvariantViolation):
        bad.validate()
    with pytest.raises(InvariantViolation):
        L.DensityMatrix(space10, 2 * np.eye(22) / 22).validate()


def test_evolution_approaches_steady_state(fig2_params):
    space = make_space(6)
    liou = L.build_liouvillian(fig2_params, Direction.FORWARD, space)
    rho0 = L.DensityMatrix.basis(space, 0)
    late = L.evolve(rho0, liou, 100.0, dt=2.0)
    assert late.trace_error < 1e-10
    assert L.trace_distance(late, L.steady_state(liou)) < 1e-4


def test_evolve_zero_time_is_identity(space10, fig2_params):
    liou = L.build_liouvillian(fig2_params, Direction.FORWARD, space10)
    rho0 = random_density(space10, np.random.default_rng(3))
    assert L.trace_distance(L.evolve(rho0, liou, 1e-12), rho0) < 1e-10


def test_truncation_check(fig2_params):
    assert L.check_truncation(fig2_params, Direction.FORWARD).converged
    assert not L.check_truncation(fig2_params.replace(b_in=2.0), Direction.FORWARD).converged
    assert L.check_truncation(SystemParams(b_in=0.0), Direction.FORWARD).converged
