import math
from fractions import Fraction

import numpy as np
import pytest

from collective_noise import markov_chain as M
from collective_noise.acceptance import phi_oracle
from collective_noise.errors import DomainError
from collective_noise.rep_su2 import multiplicity


@pytest.mark.parametrize("N", [1, 2, 5, 16, 101])
def test_kernel_is_stochastic_and_reversible(N):
    k = M.phi_matrix(N, 1.0)
    assert np.allclose(k.P.sum(axis=1), 1)
    assert np.all(k.P >= 0)
    assert math.isclose(k.mu.sum(), 1, rel_tol=1e-12)
    assert k.detailed_balance_defect() < 1e-12
    assert np.allclose(k.mu @ k.P, k.mu)


def test_invariant_measure_exact_small():
    # N = 2, beta -> mu_n = sinh(b(n+1)/2) / (sinh(b/2) (2 cosh(b/2))^2) dim W_n
    b = 0.7
    mu = M.invariant_measure(2, b)
    z = (2 * math.cosh(b / 2)) ** 2
    want = [math.sinh(b / 2) / math.sinh(b / 2) / z,
            math.sinh(3 * b / 2) / math.sinh(b / 2) / z]
    assert np.allclose(mu, want)


def test_infinite_temperature_measure():
    k = M.phi_matrix(4, 0.0)
    want = [float(Fraction((n + 1) * multiplicity(4, n), 16)) for n in (0, 2, 4)]
    assert np.allclose(k.mu, want)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("beta", [0.5, 1.5])
def test_phi_matches_conditional_expectation_oracle(N, beta):
    assert np.allclose(M.phi_matrix(N, beta).P, phi_oracle(N, beta), atol=1e-10)


def test_phi_is_numerically_stable_at_large_N():
    k = M.phi_matrix(512, 2.0)
    assert np.isfinite(k.P).all() and k.detailed_balance_defect() < 1e-10


def test_mixing_time_matches_direct_powering():
    for N in (6, 12):
        k = M.phi_matrix(N, 1.0)
        res = M.mixing_time(k, 0.25)
        Pk, steps = np.eye(k.P.shape[0]), 0
        while np.abs(Pk / k.mu[None, :] - 1).max() > 0.25:
            Pk, steps = Pk @ k.P, steps + 1
        assert res.steps == steps
        assert res.deviation <= 0.25
    with pytest.raises(DomainError):
        M.mixing_time(k, 1.5)


def test_gaussian_comparison_report():
    r = M.gaussian_comparison(16, 1.0, samples=50, seed=3)
    c = r.coefficients
    assert np.allclose(np.exp(-c.s ** 2), c.mu_hat)
    assert np.allclose(c.delta, np.diff(c.s ** 2))
    assert r.t_s_ratio_ok and r.K > 0
    assert r.samples == 50 + 2 * c.labels.size


def test_entropy_and_dirichlet_forms():
    mu = np.array([0.2, 0.3, 0.5])
    f = np.ones(3)
    assert M.entropy_functional(f, mu) == pytest.approx(0)
    assert M.dirichlet_form(f, mu) == 0
    assert M.dirichlet_form([0, 1, 1], mu) == pytest.approx(0.2)


def test_lower_transition_constant_positive():
    for N in (3, 10, 50):
        k = M.phi_matrix(N, 1.0)
        c1, c2 = M.lower_transition_constant(k)
        assert c1 > 0 and c2 > 0
