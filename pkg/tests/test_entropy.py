import math

import numpy as np
import pytest
import scipy.linalg

from collective_noise import entropy as E
from collective_noise.errors import DomainError, ShapeError
from collective_noise.lindblad_core import GibbsState, lindblad_dense, lindblad_from_generator
from collective_noise.rep_su2 import tensor_generator


def logm_oracle(r, s):
    return float(np.real(np.trace(r @ (scipy.linalg.logm(r) - scipy.linalg.logm(s)))))


def test_relative_entropy_oracle(rng):
    for dim in (2, 3, 6):
        r, s = E.random_density(dim, rng), E.random_density(dim, rng)
        assert math.isclose(E.relative_entropy(r, s), logm_oracle(r, s), rel_tol=1e-9, abs_tol=1e-12)
        assert abs(E.relative_entropy(r, r)) < 1e-12


def test_relative_entropy_support():
    r = np.diag([0.5, 0.5])
    s = np.diag([1.0, 0.0])
    with pytest.raises(DomainError):
        E.relative_entropy(r, s)
    assert math.isclose(E.relative_entropy(s, r), math.log(2))
    with pytest.raises(ShapeError):
        E.relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


def test_validate_density():
    with pytest.raises(DomainError):
        E.validate_density(np.eye(2))
    with pytest.raises(DomainError):
        E.validate_density(np.diag([1.5, -0.5]))


def test_difference_quotient_is_derivative_of_log(rng):
    rho = E.random_density(4, rng)
    x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    x = x + x.conj().T
    h = 1e-6
    fd = (scipy.linalg.logm(rho + h * x) - scipy.linalg.logm(rho - h * x)) / (2 * h)
    assert np.allclose(E.difference_quotient_log(rho, x), fd, atol=1e-6)


def test_entropy_production_beta_zero_is_entropy_slope(rng):
    a = tensor_generator(2, "a")
    L = lindblad_from_generator(a, 0.0)
    rho = E.random_density(4, rng)
    h = 1e-5
    traj = E.evolve_trajectory(L, rho, [0, h, 2 * h])
    fd = (3 * traj[0].entropy - 4 * traj[1].entropy + traj[2].entropy) / (2 * h)
    ep = float(E.entropy_production_pair(a, rho, 0.0))
    assert math.isclose(ep, fd, rel_tol=1e-6)
    assert math.isclose(ep, E.entropy_production_rate(L, rho), rel_tol=1e-10)


def test_exact_rate_matches_finite_difference_at_positive_beta(rng):
    a = tensor_generator(2, "a")
    L = lindblad_from_generator(a, 1.0)
    rho = E.random_density(4, rng)
    h = 1e-5
    traj = E.evolve_trajectory(L, rho, [0, h, 2 * h])
    fd = (3 * traj[0].entropy - 4 * traj[1].entropy + traj[2].entropy) / (2 * h)
    assert math.isclose(E.entropy_production_rate(L, rho), fd, rel_tol=1e-6)


def test_entropy_production_tracial_form(rng):
    a = tensor_generator(1, "a")
    rho = E.random_density(2, rng)
    comm = a @ rho - rho @ a
    direct = np.real(np.trace(comm.conj().T @ E.difference_quotient_log(rho, comm)))
    assert math.isclose(float(E.entropy_production(a, rho)), direct, rel_tol=1e-12)


def test_trajectory_matches_expm_and_decreases(rng):
    N, b = 2, 0.7
    L = lindblad_dense(N, b)
    rho = E.random_density(4, rng)
    times = [0, 0.1, 0.5, 1.0, 3.0]
    traj = E.evolve_trajectory(L, rho, times)
    for p in traj:
        want = (scipy.linalg.expm(-p.time * L.predual_matrix()) @ rho.reshape(-1)).reshape(4, 4)
        assert np.allclose(p.rho, want, atol=1e-10)
    ent = [p.entropy for p in traj]
    assert all(x >= y - 1e-12 for x, y in zip(ent, ent[1:]))
    with pytest.raises(DomainError):
        E.evolve_trajectory(L, rho, [1.0, 0.5])


def test_fixed_point_state_is_stationary(rng):
    L = lindblad_dense(3, 1.0)
    rho = E.random_density(8, rng)
    s = E.fixed_point_state(L, rho)
    assert np.abs(L.predual_matrix() @ s.reshape(-1)).max() < 1e-10
    assert math.isclose(np.trace(s).real, 1.0)
    # the Gibbs state is its own limit
    d = GibbsState(3, 1.0).matrix()
    assert np.allclose(E.fixed_point_state(L, d), d)


def test_conditional_covariance_vanishes(rng):
    x = rng.normal(size=(16, 16))
    assert abs(E.conditional_covariance({0, 1}, {1, 3}, x, 4, 0.8)) < 1e-10
    with pytest.raises(DomainError):
        E.conditional_covariance({0}, {1}, x, 4, 0.8)


def test_log_ratio_and_pinsker(rng):
    lhs, rhs = E.log_ratio_sides(2.0, 2.0, 1.0)
    assert lhs >= rhs
    D, half = E.pinsker_sides(E.random_density(3, rng), E.random_density(3, rng))
    assert D >= half


@pytest.mark.parametrize("N,b", [(2, 0.5), (2, 1.0), (3, 1.0)])
def test_chain_rule_omega_fix(N, b, rng):
    from collective_noise.lindblad_core import conditional_expectation
    L = lindblad_dense(N, b)
    rho = E.random_density(2 ** N, rng)
    ef = E.fixed_point_state(L, rho)
    eo = conditional_expectation(rho, "omega", N, b)
    total = E.relative_entropy(rho, ef)
    parts = E.relative_entropy(rho, eo) + E.relative_entropy(eo, ef)
    assert abs(total - parts) <= 1e-9
