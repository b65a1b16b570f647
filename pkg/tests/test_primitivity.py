import math

import numpy as np
import pytest

from collective_noise import primitivity as P
from collective_noise.errors import CapacityError, ShapeError
from collective_noise.lindblad_core import GibbsState
from collective_noise.rep_su2 import schur_weyl_decomposition, tensor_generator


def test_rotation_unitary_conjugates_collective_generator():
    th = np.array([0.3, 1.1, 2.5])
    U = P.rotation_unitary(th)
    assert np.allclose(U @ U.conj().T, np.eye(8))
    assert np.allclose(P.collective_generator(th), U @ tensor_generator(3, "a") @ U.conj().T)


def test_zero_angles_give_collective_generator():
    assert np.allclose(P.collective_generator(np.zeros(4)), tensor_generator(4, "a"))


def test_capacity():
    with pytest.raises(CapacityError):
        P.collective_generator(np.zeros(13))


def test_random_angles_seeded():
    assert np.array_equal(P.random_angles(4, 7), P.random_angles(4, 7))
    assert not np.array_equal(P.random_angles(4, 7), P.random_angles(4, 8))


def test_vandermonde_generic_and_degenerate():
    r = P.vandermonde_check([0.3, 1.0, 2.2], [0, 0, 0])
    assert r.holds is True and r.witness is None and r.pairwise_condition and r.determinant > 0
    # theta_2 - phi_2 = -(theta_1 - phi_1): cosines coincide
    r = P.vandermonde_check([0.5, -0.5, 2.0], [0, 0, 0])
    assert r.holds is False and r.witness == (1, 2)
    assert r.pairwise_condition  # the pairwise condition misses this case
    # z_j = 0
    r = P.vandermonde_check([math.pi, 1.0], [0, 0])
    assert r.holds is False and r.witness == (1, 1)
    with pytest.raises(ShapeError):
        P.vandermonde_check([1, 2], [1])


def test_vandermonde_indeterminate_band():
    r = P.vandermonde_check([0.5, 0.5 + 5e-8], [0, 0])
    assert r.holds is None


def test_lie_closure_dims():
    a = tensor_generator(3, "a")
    assert P.lie_closure_dim([a, a.conj().T]) == 3
    assert P.lie_closure_dim([tensor_generator(3, "h")]) == 1
    # a generic rotation adds i a_j for every site: 6 real dimensions per qubit
    O = P.collective_generator(P.random_angles(2))
    a = tensor_generator(2, "a")
    assert P.lie_closure_dim([a, a.conj().T, O, O.conj().T]) == 12


def test_commutant_of_collective_algebra():
    N = 3
    a = tensor_generator(N, "a")
    want = sum(k * k for _, k in schur_weyl_decomposition(N).components)
    assert P.commutant_dim([a, a.conj().T]) == want


@pytest.mark.parametrize("N", [2, 3])
def test_primitivity_generic_vs_constant(N):
    b = 1.0
    d = GibbsState(N, b).matrix()
    th = P.random_angles(N)
    assert P.fixed_point_dim(P.combined_lindbladian(th, b), d) == 1
    const = sum(k * k for _, k in schur_weyl_decomposition(N).components)
    assert P.fixed_point_dim(P.combined_lindbladian(np.full(N, 1.3), b), d) == const


def test_vandermonde_is_sufficient_for_primitivity():
    N, b = 3, 0.5
    d = GibbsState(N, b).matrix()
    rng = np.random.default_rng(4)
    for _ in range(5):
        th, ph = rng.uniform(0, 2 * np.pi, N), rng.uniform(0, 2 * np.pi, N)
        if P.vandermonde_check(th, ph).holds:
            assert P.fixed_point_dim(P.combined_lindbladian(th, b, ph), d) == 1
