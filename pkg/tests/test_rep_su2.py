from math import comb

import numpy as np
import pytest

from collective_noise.errors import CapacityError, DomainError
from collective_noise.rep_su2 import (
    alpha, alpha_squared, casimir, gamma_generator, irrep_generator, multiplicity,
    multiplicity_free_generator, schur_weyl_basis, schur_weyl_decomposition, site_operator,
    tensor_generator, weight_space_dim,
)


def comm(x, y):
    return x @ y - y @ x


def test_alpha_values():
    assert alpha_squared(1, 1) == 1
    assert alpha_squared(4, 2) == 6
    assert alpha(3, 0) == 0 and alpha(3, 4) == 0
    with pytest.raises(DomainError):
        alpha_squared(3, 5)


@pytest.mark.parametrize("n", range(0, 7))
def test_irrep_commutation_relations(n):
    a, ad, h = (irrep_generator(n, k) for k in ("a", "adag", "h"))
    assert np.allclose(comm(h, a), 2 * a)
    assert np.allclose(comm(h, ad), -2 * ad)
    assert np.allclose(comm(a, ad), h)
    assert np.allclose(ad, a.conj().T)


def test_kind_aliases():
    assert np.array_equal(irrep_generator(2, "raising"), irrep_generator(2, "adag"))
    with pytest.raises(DomainError):
        irrep_generator(2, "z")


@pytest.mark.parametrize("N", range(1, 13))
def test_dimension_count(N):
    d = schur_weyl_decomposition(N)
    assert d.dimension == 2 ** N
    assert sum(weight_space_dim(N, w) for w in range(-N, N + 1, 2)) == 2 ** N
    assert multiplicity(N, N) == 1
    assert multiplicity(N, N - 2) == (N - 1 if N >= 2 else 0)
    assert list(d.labels) == sorted(d.labels, reverse=True)


def test_multiplicity_formula_small():
    # mult(n) = C(N, (N-n)/2) - C(N, (N-n)/2 - 1)
    N = 9
    for n in range(1, N + 1, 2):
        k = (N - n) // 2
        assert multiplicity(N, n) == comb(N, k) - (comb(N, k - 1) if k else 0)


@pytest.mark.parametrize("N", range(1, 7))
def test_casimir_oracle(N):
    # eigenvalues n(n+2)/2 with multiplicity (n+1) mult(n)
    lam = np.round(np.linalg.eigvalsh(casimir(N)), 8)
    vals, counts = np.unique(lam, return_counts=True)
    want = {n * (n + 2) / 2: (n + 1) * k for n, k in schur_weyl_decomposition(N).components}
    assert dict(zip(vals, counts)) == pytest.approx(want)


def test_tensor_generator_is_sum_of_sites():
    N = 3
    a1 = irrep_generator(1, "a")
    total = sum(site_operator(a1, i, N) for i in range(N))
    assert np.allclose(tensor_generator(N, "a"), total)
    assert np.allclose(np.diag(tensor_generator(2, "h")), [2, 0, 0, -2])


def test_dense_limit():
    with pytest.raises(CapacityError):
        tensor_generator(14, "a")


@pytest.mark.parametrize("N", range(1, 6))
def test_schur_weyl_basis_block_diagonalises(N):
    sw = schur_weyl_basis(N)
    U = sw.U
    assert np.allclose(U.conj().T @ U, np.eye(2 ** N), atol=1e-12)
    a = U.conj().T @ tensor_generator(N, "a") @ U
    # in the (n desc, j, k) order the generator is a direct sum of irreps
    blocks = []
    for n, mult in schur_weyl_decomposition(N).components:
        for _ in range(mult):
            blocks.append(irrep_generator(n, "a"))
    labels = sw.labels
    expected = np.zeros_like(a)
    pos = {}
    for c, (n, j, k) in enumerate(labels):
        pos[(n, j, k)] = c
    for (n, j, k), c in pos.items():
        if j >= 1:
            expected[pos[(n, j - 1, k)], c] = alpha(n, j)
    assert np.allclose(a, expected, atol=1e-10)


def test_multiplicity_free_generator_matches_direct_sum():
    a = multiplicity_free_generator(4, "a")
    dims = [n + 1 for n in schur_weyl_decomposition(4).labels]
    assert a.shape == (sum(dims), sum(dims))
    assert np.allclose(a[:5, :5], irrep_generator(4, "a"))


def test_gamma_generator_singular_values():
    n, g = 5, 2
    sv = np.sort(np.linalg.svd(gamma_generator(n, g), compute_uv=False))
    want = np.sort([alpha(n, j) ** (2 * g + 1) for j in range(n + 1)])
    assert np.allclose(sv, want)
    assert np.allclose(gamma_generator(n, 0), irrep_generator(n, "a"))
