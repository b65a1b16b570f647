import os
import subprocess
import sys

import numpy as np
import pytest

from collective_noise import _accel, _kernels

numba_only = pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")


@numba_only
@pytest.mark.parametrize("n,m,d", [(1, 1, 0), (4, 2, 0), (6, 3, -2), (7, 5, 4), (9, 9, 0)])
def test_block_tridiagonal_flavours_agree(n, m, d):
    a = _kernels._block_tridiagonal_numpy(n, m, d, 0.7)
    b = _kernels._block_tridiagonal_numba(n, m, d, 0.7)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-14, atol=0)


@numba_only
def test_log_quotient_flavours_agree(rng):
    lam = np.sort(rng.uniform(0.01, 1, size=12))
    lam[3] = lam[4]
    assert np.allclose(_kernels._log_quotient_numpy(lam), _kernels._log_quotient_numba(lam),
                       rtol=1e-13)


@numba_only
def test_phi_flavours_agree():
    from collective_noise.markov_chain import _ratios, labels
    N = 9
    R, ws = _ratios(N)
    lab = labels(N).astype(np.int64)
    a = _kernels._phi_numpy(lab, R, ws.astype(float), 1.2)
    b = _kernels._phi_numba(lab, R, ws.astype(float), 1.2)
    assert np.allclose(a, b, rtol=1e-13)


def test_log_quotient_diagonal_is_inverse():
    lam = np.array([0.2, 0.5])
    C = _kernels._log_quotient_numpy(lam)
    assert np.allclose(np.diag(C), 1 / lam)


def _flag_state(value):
    env = dict(os.environ)
    env["COLLECTIVE_NOISE_DISABLE_NUMBA"] = value
    code = ("from collective_noise import _accel, _kernels; "
            "print(_accel.NUMBA_ENABLED, _kernels.block_tridiagonal is _kernels._block_tridiagonal_numpy)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    return out.stdout.split()


def test_env_flag_selects_numpy():
    assert _flag_state("1") == ["False", "True"]
    assert _flag_state("yes") == ["False", "True"]


@numba_only
def test_default_uses_numba():
    assert _flag_state("0") == ["True", "False"]
