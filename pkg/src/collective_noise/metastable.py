"""Slow decay modes of the off-diagonal blocks and the generalized-dephasing
picture of the semigroup.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .errors import DomainError
from .lindblad_core import (
    BlockIndex, BlockOperator, GibbsState, all_blocks, block_kms_scaling,
)
from .rep_su2 import irrep_generator
from .spectral import block_symmetric_tridiagonal


@dataclass
class MetastableReport:
    """Slowest mode of block ``(n, m, 0)``.

    ``min_rate`` is the smallest eigenvalue of ``L`` on the block and
    ``gamma_slowest = (n + m - e^{b/2} min_rate) / (2 sqrt(nm))`` its root of
    the recurrence polynomial; ``min_gamma`` is the smallest ``|gamma|`` over
    all modes of the block and ``bound = e^{b/2}/(2 sqrt(nm))``.
    ``eigvec`` holds the coefficients of the slow mode ``x`` (not KMS-scaled).
    """

    N: int
    n: int
    m: int
    beta: float
    min_gamma: float
    gamma_slowest: float
    min_rate: float
    bound: float
    rates: np.ndarray
    eigvec: BlockOperator

    @property
    def bound_holds(self):
        return self.min_gamma <= self.bound + 1e-9


def _block_eigh(blk, beta):
    diag, off = block_symmetric_tridiagonal(blk, beta)
    if diag.size == 1:
        return diag.copy(), np.ones((1, 1))
    return scipy.linalg.eigh_tridiagonal(diag, off)


def min_decay_mode(n, m, beta, N=None):
    """Slowest decay mode of block ``(n, m, 0)``, ``1 <= n < m``.

    ``N`` (default ``m``) fixes the Gibbs normalisation of the eigenvector.
    """
    if not 1 <= n < m:
        raise DomainError("min_decay_mode requires 1 <= n < m")
    N = m if N is None else int(N)
    blk = BlockIndex(n, m, 0)
    rates, vecs = _block_eigh(blk, beta)
    s = 2 * math.sqrt(n * m)
    gam = (n + m - math.exp(beta / 2) * rates) / s
    q = block_kms_scaling(blk, GibbsState(N, beta))
    x = vecs[:, 0] / q
    x = x / np.linalg.norm(x)
    if x[0] < 0:
        x = -x
    return MetastableReport(N, n, m, float(beta), float(np.abs(gam).min()), float(gam[0]),
                            float(rates[0]), math.exp(beta / 2) / s, rates,
                            BlockOperator(blk, x))


def _pair_space(report):
    """``x`` and ``d`` restricted to ``V_n (+) V_m`` (``V_m`` first)."""
    n, m = report.n, report.m
    g = GibbsState(report.N, report.beta)
    X = np.zeros((n + m + 2, n + m + 2), dtype=complex)
    j = np.arange(n + 1)
    X[m + 1 + j, j] = report.eigvec.coeffs  # |n, j><m, j|
    d = np.concatenate([g.block_weights(m), g.block_weights(n)])
    return X, d


def pair_generator(report):
    """Lowering operator ``pi_m(a) (+) pi_n(a)`` on ``V_m (+) V_n``."""
    return scipy.linalg.block_diag(irrep_generator(report.m, "a"), irrep_generator(report.n, "a"))


def metastable_state(report, eta, t=0.0):
    """``rho(eta) = d^{1/2} (1 + (eta/r) x) d^{1/2} / tr(d)`` on ``V_m (+) V_n``.

    ``x`` is the symmetrised slow mode and ``r`` its spectral radius.  With
    ``t > 0`` the state evolved for time ``t`` is returned, whose off-diagonal
    part is damped by ``exp(-min_rate t)``.
    """
    if abs(eta) > 1:
        raise DomainError("|eta| must be at most 1")
    X, d = _pair_space(report)
    x = (X + X.conj().T) / 2
    r = np.abs(np.linalg.eigvalsh(x)).max()
    xt = np.eye(x.shape[0]) + (eta / r) * math.exp(-report.min_rate * t) * x
    s = np.sqrt(d)
    rho = s[:, None] * xt * s[None, :]
    return rho / d.sum()


def dephasing_profile(N, beta, times, seed=0):
    """Decay of random block operators under the block semigroups.

    Returns ``(curves, fixed)``: ``curves[blk]`` is the KMS 2-norm of the
    evolved non-fixed part of a random operator in ``blk``, and
    ``fixed[blk]`` (blocks ``(n, n, 0)`` only) the norm of its fixed-point
    component, which stays constant.
    """
    rng = np.random.default_rng(seed)
    times = np.asarray(times, dtype=float)
    curves, fixed = {}, {}
    for blk in all_blocks(N):
        rates, vecs = _block_eigh(blk, beta)
        c = rng.normal(size=blk.size)
        amp = vecs.T @ c
        zero = np.abs(rates) <= 1e-9 * max(1.0, np.abs(rates).max())
        decay = np.exp(-np.outer(times, np.where(zero, 0.0, rates)))
        moving = np.sqrt(((decay * amp) ** 2)[:, ~zero].sum(axis=1))
        curves[blk] = moving
        if zero.any():
            fixed[blk] = np.full(times.size, np.sqrt((amp[zero] ** 2).sum()))
    return curves, fixed
