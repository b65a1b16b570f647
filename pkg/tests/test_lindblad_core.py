import math

import numpy as np
import pytest

from collective_noise.errors import CapacityError, ContractError, DomainError, ShapeError
from collective_noise.lindblad_core import (
    BlockIndex, BlockOperator, GibbsState, all_blocks, conditional_expectation,
    conditional_expectation_matrix, kernel_projection, kms_inner, lindblad_block,
    lindblad_dense, lindblad_from_generator, lindblad_multiplicity_free,
)
from collective_noise.rep_su2 import irrep_generator, schur_weyl_basis, tensor_generator
from collective_noise.spectral import dense_kms_spectrum, kms_symmetrize


def rand_matrix(rng, dim):
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


# --- Gibbs state ---------------------------------------------------------

def test_qubit_gibbs_state():
    g = GibbsState(1, 1.0)
    d = np.real(np.diag(g.matrix()))
    assert np.allclose(d, np.array([math.exp(0.5), math.exp(-0.5)]) / (2 * math.cosh(0.5)))


@pytest.mark.parametrize("N", [1, 3, 4])
def test_gibbs_is_product_and_normalised(N):
    g = GibbsState(N, 0.7)
    d = g.matrix()
    single = g.single_site()
    prod = single
    for _ in range(N - 1):
        prod = np.kron(prod, single)
    assert np.allclose(d, prod)
    assert np.isclose(np.trace(g.matrix("mf") @ np.diag(np.repeat(
        [g.decomposition.mult(n) for n in g.decomposition.labels],
        [n + 1 for n in g.decomposition.labels]))), 1)


def test_modular_covariance():
    # d a d^{-1} = e^{beta} a since [h, a] = 2a
    N, b = 3, 0.9
    d = GibbsState(N, b).matrix()
    a = tensor_generator(N, "a")
    assert np.allclose(d @ a @ np.linalg.inv(d), math.exp(b) * a)


# --- generator -----------------------------------------------------------

def test_qubit_spectrum():
    b = 1.0
    lam = dense_kms_spectrum(lindblad_dense(1, b), GibbsState(1, b).matrix())
    c = 2 * math.cosh(b / 2)
    assert np.allclose(lam, [0, c, c, 2 * c])


@pytest.mark.parametrize("N,b", [(1, 0.3), (2, 1.0), (3, 2.0)])
def test_stationary_and_unital(N, b):
    L = lindblad_dense(N, b)
    d = GibbsState(N, b).matrix()
    assert np.abs(L.predual_matrix() @ d.reshape(-1)).max() < 1e-12
    assert L.trace_preservation_defect() < 1e-12


@pytest.mark.parametrize("N,b", [(2, 0.5), (3, 1.0)])
def test_kms_detailed_balance_random_pairs(N, b, rng):
    L = lindblad_dense(N, b)
    d = GibbsState(N, b).matrix()
    for _ in range(100):
        x, y = rand_matrix(rng, 2 ** N), rand_matrix(rng, 2 ** N)
        lhs = kms_inner(x, L.apply(y), d)
        rhs = kms_inner(L.apply(x), y, d)
        assert abs(lhs - rhs) <= 1e-10 * max(1, abs(lhs))


def test_non_detailed_balance_rejected():
    a = irrep_generator(1, "a") + 0.3 * irrep_generator(1, "h")
    L = lindblad_from_generator(a, 1.0)
    with pytest.raises(ContractError):
        kms_symmetrize(L, GibbsState(1, 1.0).matrix())


@pytest.mark.parametrize("N", [2, 3, 4])
def test_block_generator_matches_multiplicity_free_action(N, rng):
    b = 1.3
    Lmf = lindblad_multiplicity_free(N, b)
    for blk in all_blocks(N):
        c = rng.normal(size=blk.size)
        x = BlockOperator(blk, c).to_matrix(N)
        y = BlockOperator(blk, lindblad_block(blk, b).apply(c)).to_matrix(N)
        assert np.allclose(Lmf.apply(x), y, atol=1e-11)


def test_block_index_validation():
    with pytest.raises(DomainError):
        BlockIndex(2, 3, 4)
    blk = BlockIndex(3, 1, 1)
    assert (blk.jmin, blk.jmax, blk.size) == (1, 2, 2)
    assert blk.adjoint() == BlockIndex(1, 3, -1)
    with pytest.raises(ShapeError):
        BlockOperator(blk, [1, 2, 3])


def test_dense_capacity():
    with pytest.raises(CapacityError):
        lindblad_dense(7, 1.0)


# --- conditional expectations --------------------------------------------

@pytest.mark.parametrize("target", ["fix", "omega", "diag", "sigma"])
@pytest.mark.parametrize("N", [2, 3])
def test_conditional_expectation_axioms(target, N, rng):
    b = 0.8
    d = GibbsState(N, b).matrix()
    x, y = rand_matrix(rng, 2 ** N), rand_matrix(rng, 2 ** N)
    E = lambda z: conditional_expectation(z, target, N, b)
    assert np.allclose(E(E(x)), E(x), atol=1e-12)
    assert np.allclose(E(np.eye(2 ** N)), np.eye(2 ** N), atol=1e-12)
    assert np.isclose(kms_inner(E(x), y, d), kms_inner(x, E(y), d), atol=1e-10)


def test_minimal_expectation_axioms(rng):
    N, b = 3, 1.1
    d = GibbsState(N, b).matrix()
    x, y = rand_matrix(rng, 8), rand_matrix(rng, 8)
    E = lambda z: conditional_expectation(z, "minimal", N, b, sites=[0, 2])
    assert np.allclose(E(E(x)), E(x))
    assert np.allclose(E(np.eye(8)), np.eye(8))
    assert np.isclose(kms_inner(E(x), y, d), kms_inner(x, E(y), d))
    with pytest.raises(DomainError):
        conditional_expectation(x, "minimal", N, b, sites=[3])


@pytest.mark.parametrize("N", [2, 3, 4])
def test_fix_equals_kernel_projection(N):
    b = 1.0
    L = lindblad_dense(N, b)
    d = GibbsState(N, b).matrix()
    P = kernel_projection(L, d)
    E = conditional_expectation_matrix("fix", N, b)
    assert np.allclose(P, E, atol=1e-9)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_commuting_square_fix_diag(N, rng):
    b = 0.6
    x = rand_matrix(rng, 2 ** N)
    fd = conditional_expectation(conditional_expectation(x, "diag", N, b), "fix", N, b)
    df = conditional_expectation(conditional_expectation(x, "fix", N, b), "diag", N, b)
    assert np.allclose(fd, df, atol=1e-12)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_omega_kills_mismatched_coefficients(N):
    sw = schur_weyl_basis(N)
    col = {lab: c for c, lab in enumerate(sw.labels)}
    u = sw.U[:, col[(N, 1, 0)]]
    v = sw.U[:, col[(N - 2, 1, 0)]]
    x = np.outer(u, v.conj())
    assert np.abs(conditional_expectation(x, "omega", N, 1.0)).max() < 1e-12


def test_mf_space_expectations(rng):
    N, b = 4, 1.0
    dim = sum(n + 1 for n in (4, 2, 0))
    x = rand_matrix(rng, dim)
    for target in ("fix", "omega", "diag", "sigma"):
        E = lambda z: conditional_expectation(z, target, N, b, space="mf")
        assert np.allclose(E(E(x)), E(x))
    with pytest.raises(ShapeError):
        conditional_expectation(np.eye(3), "fix", N, b, space="mf")
