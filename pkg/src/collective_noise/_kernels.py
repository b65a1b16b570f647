"""Hot loops, each in a numba and a pure-numpy flavour.

The public names (``block_tridiagonal``, ``log_quotient_matrix``,
``phi_from_ratios``) are bound to the numba versions unless
``COLLECTIVE_NOISE_DISABLE_NUMBA`` is set.  Both flavours stay importable
for the benchmark and the equivalence tests.
"""

import math

import numpy as np

from ._accel import NUMBA_ENABLED, njit


# --- block tridiagonal coefficients --------------------------------------

def _block_tridiagonal_numpy(n, m, d, beta):
    jmin, jmax = max(0, d), min(n, m + d)
    j = np.arange(jmin, jmax + 1, dtype=np.float64)
    k = j - d
    an_j = np.sqrt(j * (n - j + 1))
    am_k = np.sqrt(k * (m - k + 1))
    an_j1 = np.sqrt((j + 1) * (n - j))
    am_k1 = np.sqrt((k + 1) * (m - k))
    ep, em = math.exp(beta / 2), math.exp(-beta / 2)
    diag = -(ep * (an_j ** 2 + am_k ** 2) + em * (an_j1 ** 2 + am_k1 ** 2))
    lower = 2.0 * ep * an_j1[:-1] * am_k1[:-1]
    upper = 2.0 * em * an_j[1:] * am_k[1:]
    return diag, lower, upper


@njit(cache=True)
def _block_tridiagonal_numba(n, m, d, beta):
    jmin = max(0, d)
    jmax = min(n, m + d)
    size = jmax - jmin + 1
    diag = np.empty(size)
    lower = np.empty(max(size - 1, 0))
    upper = np.empty(max(size - 1, 0))
    ep = math.exp(beta / 2)
    em = math.exp(-beta / 2)
    for i in range(size):
        j = jmin + i
        k = j - d
        a2nj = j * (n - j + 1.0)
        a2mk = k * (m - k + 1.0)
        a2nj1 = (j + 1.0) * (n - j)
        a2mk1 = (k + 1.0) * (m - k)
        diag[i] = -(ep * (a2nj + a2mk) + em * (a2nj1 + a2mk1))
        if i < size - 1:
            lower[i] = 2.0 * ep * math.sqrt(a2nj1 * a2mk1)
        if i > 0:
            upper[i - 1] = 2.0 * em * math.sqrt(a2nj * a2mk)
    return diag, lower, upper


# --- logarithmic difference quotient -------------------------------------

def _log_quotient_numpy(lam, tol=1e-12):
    lam = np.asarray(lam, dtype=np.float64)
    li, lj = np.meshgrid(lam, lam, indexing="ij")
    diff = li - lj
    same = np.abs(diff) < tol
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (np.log(li) - np.log(lj)) / diff
    return np.where(same, 2.0 / (li + lj), out)


@njit(cache=True)
def _log_quotient_numba(lam, tol=1e-12):
    size = lam.shape[0]
    out = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            diff = lam[i] - lam[j]
            if abs(diff) < tol:
                out[i, j] = 2.0 / (lam[i] + lam[j])
            else:
                out[i, j] = (math.log(lam[i]) - math.log(lam[j])) / diff
    return out


# --- Markov kernel entries -----------------------------------------------

def _phi_numpy(labels, ratios, weights, beta):
    # ratios[b, c] = dim W_{labels[b]} / dim H_{w_c}; weights[c] = w_c
    labels = np.asarray(labels)
    w = np.asarray(weights, dtype=np.float64)
    out = np.zeros((labels.size, labels.size))
    for a, m in enumerate(labels):
        k = np.arange(m + 1)
        denom = np.exp(-beta * k).sum()
        boltz = np.exp(beta * (w - m) / 2) / denom
        for b, n in enumerate(labels):
            mask = np.abs(w) <= min(m, n)
            out[a, b] = np.sum(ratios[b, mask] * boltz[mask])
    return out


@njit(cache=True)
def _phi_numba(labels, ratios, weights, beta):
    size = labels.shape[0]
    nw = weights.shape[0]
    out = np.zeros((size, size))
    for a in range(size):
        m = labels[a]
        denom = 0.0
        for k in range(m + 1):
            denom += math.exp(-beta * k)
        for b in range(size):
            n = labels[b]
            lim = min(m, n)
            acc = 0.0
            for c in range(nw):
                if abs(weights[c]) <= lim:
                    acc += ratios[b, c] * math.exp(beta * (weights[c] - m) / 2) / denom
            out[a, b] = acc
    return out


if NUMBA_ENABLED:
    block_tridiagonal = _block_tridiagonal_numba
    log_quotient_matrix = _log_quotient_numba
    phi_from_ratios = _phi_numba
else:
    block_tridiagonal = _block_tridiagonal_numpy
    log_quotient_matrix = _log_quotient_numpy
    phi_from_ratios = _phi_numpy
