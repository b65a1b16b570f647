import math

import numpy as np
import pytest
import scipy.linalg

from collective_noise.errors import DomainError
from collective_noise.lindblad_core import BlockIndex, lindblad_from_generator
from collective_noise.metastable import (
    dephasing_profile, metastable_state, min_decay_mode, pair_generator,
)
from collective_noise.spectral import block_eigenvalues


def test_min_rate_is_block_minimum():
    r = min_decay_mode(3, 5, 1.0)
    assert math.isclose(r.min_rate, block_eigenvalues(BlockIndex(3, 5, 0), 1.0)[0])
    assert r.min_rate > 0


def test_gamma_relation():
    n, m, b = 4, 6, 1.5
    r = min_decay_mode(n, m, b)
    assert math.isclose(r.gamma_slowest,
                        (n + m - math.exp(b / 2) * r.min_rate) / (2 * math.sqrt(n * m)))
    assert math.isclose(r.bound, math.exp(b / 2) / (2 * math.sqrt(n * m)))


def test_rate_times_N_stays_bounded():
    # the slow mode of (N-2, N) is O(1/N): rate * N does not grow
    scaled = [min_decay_mode(N - 2, N, 1.0).min_rate * N for N in (10, 20, 40, 80)]
    assert all(y <= x for x, y in zip(scaled, scaled[1:]))


def test_domain():
    with pytest.raises(DomainError):
        min_decay_mode(5, 3, 1.0)


@pytest.mark.parametrize("n,m,beta", [(1, 3, 1.0), (2, 4, 0.5), (4, 6, 2.0)])
def test_metastable_evolution_matches_dense(n, m, beta):
    r = min_decay_mode(n, m, beta)
    L = lindblad_from_generator(pair_generator(r), beta)
    rho0 = metastable_state(r, 0.9)
    assert np.isclose(np.trace(rho0).real, 1)
    assert np.linalg.eigvalsh(rho0).min() >= -1e-12
    for t in (0.3, 2.0):
        want = (scipy.linalg.expm(-t * L.predual_matrix()) @ rho0.reshape(-1)).reshape(rho0.shape)
        assert np.allclose(metastable_state(r, 0.9, t), want, atol=1e-10)


def test_dephasing_profile():
    times = np.linspace(0, 5, 6)
    curves, fixed = dephasing_profile(4, 1.0, times, seed=1)
    for blk, c in curves.items():
        assert np.all(np.diff(c) <= 1e-12)
    assert set(b for b in fixed) == {BlockIndex(n, n, 0) for n in (4, 2, 0)}
    for v in fixed.values():
        assert np.allclose(v, v[0])
