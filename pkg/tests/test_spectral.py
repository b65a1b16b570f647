import math

import numpy as np
import pytest

from collective_noise.errors import DomainError
from collective_noise.lindblad_core import (
    BlockIndex, GibbsState, all_blocks, kms_inner, lindblad_multiplicity_free,
)
from collective_noise.rep_su2 import irrep_generator
from collective_noise.spectral import (
    block_eigenvalues, block_spectra, block_spectrum_recurrence, cb_return_profile,
    cb_return_time_bound, expanded_spectrum, gamma_singular_values, gap_upper_bound_witness,
    min_spectral_difference, recurrence_polynomials, spectral_gap,
)


@pytest.mark.parametrize("n,m", [(1, 2), (2, 5), (4, 3), (6, 9)])
@pytest.mark.parametrize("beta", [0.5, 2.0])
def test_recurrence_matches_tridiagonal(n, m, beta):
    r = block_spectrum_recurrence(n, m, beta)
    t = block_eigenvalues(BlockIndex(n, m, 0), beta)
    assert not r.used_fallback
    assert np.allclose(r.eigenvalues, t, rtol=1e-8, atol=1e-10)


def test_recurrence_polynomial_degree():
    f, g = recurrence_polynomials(3, 5, 1.0)
    assert len(f) == 4
    assert len(np.trim_zeros(g, "b")) - 1 == 4


def test_recurrence_domain():
    with pytest.raises(DomainError):
        block_spectrum_recurrence(3, 3, 1.0)


def _brute_delta(N, gamma):
    vals = []
    for n in range(1, N + 1):
        sv = np.linalg.svd(irrep_generator(n, "a"), compute_uv=False)
        vals.extend(sv ** gamma)
    vals = np.sort(np.array(vals))
    d = np.diff(vals)
    return d[d > 1e-9].min()


@pytest.mark.parametrize("N", [2, 5, 11, 20])
@pytest.mark.parametrize("gamma", [1, 2, 3])
def test_min_spectral_difference_oracle(N, gamma):
    assert math.isclose(min_spectral_difference(N, gamma).delta, _brute_delta(N, gamma),
                        rel_tol=1e-9)


def test_min_spectral_difference_example():
    assert math.isclose(min_spectral_difference(2, 1).delta, math.sqrt(2) - 1)


def test_gamma_singular_values():
    sv = gamma_singular_values(4, 1)
    assert np.allclose(sv, np.sort([math.sqrt(j * (5 - j)) ** 3 for j in range(5)]))


@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_expanded_spectrum_size(N):
    assert expanded_spectrum(N, 1.0).size == 4 ** N


def test_adjoint_blocks_share_spectrum():
    N, b = 6, 0.8
    for blk, ev in block_spectra(N, b):
        assert np.allclose(ev, block_eigenvalues(blk, b))


def test_threaded_block_spectra_match():
    a = block_spectra(7, 1.0)
    b = block_spectra(7, 1.0, jobs=3)
    assert all(x[0] == y[0] and np.array_equal(x[1], y[1]) for x, y in zip(a, b))


@pytest.mark.parametrize("N", [3, 5, 8])
def test_witness_quotient_is_rayleigh_quotient(N):
    b = 1.0
    w = gap_upper_bound_witness(N, b)
    x = w.xi.to_matrix(N)
    y = x + x.conj().T
    L = lindblad_multiplicity_free(N, b)
    d = GibbsState(N, b).matrix("mf")
    rq = kms_inner(y, L.apply(y), d) / kms_inner(y, y, d)
    assert math.isclose(rq.real, w.quotient, rel_tol=1e-9)
    assert w.quotient >= spectral_gap(N, b, with_witness=False).gap


def test_witness_lemma_support_zeroes_first_coefficient():
    w = gap_upper_bound_witness(6, 1.0, "lemma")
    assert w.xi.coeffs[0] == 0
    with pytest.raises(DomainError):
        gap_upper_bound_witness(2, 1.0)


@pytest.mark.parametrize("N", [1, 2, 5, 10])
def test_spectral_gap_kernel(N):
    r = spectral_gap(N, 1.0)
    assert r.kernel_dim == N // 2 + 1
    assert r.gap > 0
    assert len(r.per_block_minima) == len(all_blocks(N))


def test_cb_return_time():
    delta, eps = 0.3, 0.2
    t = cb_return_time_bound(delta, eps)
    assert math.isclose(t, math.pi / (eps * delta) ** 2)
    lam = delta * np.arange(50)
    assert cb_return_profile(lam, t) <= eps
    with pytest.raises(DomainError):
        cb_return_time_bound(0, 0.5)
