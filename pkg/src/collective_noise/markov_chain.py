"""The classical chain ``Phi = E_fix E_sigma E_fix`` on irrep labels, its
invariant measure, Gaussian-comparison coefficients and mixing times.

Labels are ``n = N mod 2, ..., N`` in increasing order; ``P[a, b]`` is
``Phi_{m, n}`` with ``m = labels[a]``, ``n = labels[b]`` and rows sum to one.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from . import _kernels
from .errors import DomainError
from .rep_su2 import multiplicity, weight_space_dim


def labels(N):
    return np.arange(N % 2, N + 1, 2)


@dataclass
class MarkovKernel:
    N: int
    beta: float
    labels: np.ndarray
    P: np.ndarray
    mu: np.ndarray

    def detailed_balance_defect(self):
        F = self.mu[:, None] * self.P
        return float(np.abs(F - F.T).max())


def _log_sinh(x):
    # log sinh(x) for x > 0 without overflow
    return x + math.log1p(-math.exp(-2 * x)) - math.log(2)


def log_invariant_measure(N, beta):
    if beta <= 0:
        raise DomainError("beta must be positive")
    lz = N * math.log(2 * math.cosh(beta / 2))
    return np.array([_log_sinh(beta * (n + 1) / 2) - _log_sinh(beta / 2) - lz
                     + math.log(multiplicity(N, n)) for n in labels(N)])


def invariant_measure(N, beta):
    """``mu_n = sinh(b(n+1)/2) / (sinh(b/2) (2 cosh(b/2))^N) dim W_n`` over increasing labels."""
    return np.exp(log_invariant_measure(N, beta))


def _ratios(N):
    lab = labels(N)
    ws = np.arange(-N, N + 1, 2)
    R = np.zeros((lab.size, ws.size))
    for b, n in enumerate(lab):
        mult = multiplicity(N, n)
        for c, w in enumerate(ws):
            R[b, c] = float(Fraction(mult, weight_space_dim(N, w)))
    return R, ws


def phi_matrix(N, beta):
    """Transition matrix ``Phi_{m,n} = sum_{|w| <= min(m,n)} (dim W_n/dim H_w) e^{bw/2}/sum_k e^{b(m-2k)/2}``."""
    if N < 1:
        raise DomainError("N must be positive")
    lab = labels(N)
    R, ws = _ratios(N)
    P = _kernels.phi_from_ratios(lab.astype(np.int64), R, ws.astype(np.float64), float(beta))
    mu = invariant_measure(N, beta) if beta > 0 else _mu_infinite_temperature(N)
    return MarkovKernel(int(N), float(beta), lab, P, mu)


def _mu_infinite_temperature(N):
    lab = labels(N)
    return np.array([float(Fraction((n + 1) * multiplicity(N, n), 2 ** N)) for n in lab])


# --- Gaussian comparison -------------------------------------------------

@dataclass
class GaussianComparisonCoefficients:
    """``e^{-s_n^2} = mu_hat_n``, ``t_n^2 = s_n^2 - log s_n``, ``delta_n = s_{n+2}^2 - s_n^2``."""

    labels: np.ndarray
    mu_hat: np.ndarray
    s: np.ndarray
    t: np.ndarray
    delta: np.ndarray


@dataclass
class LSIReport:
    N: int
    beta: float
    coefficients: GaussianComparisonCoefficients
    K: float              # largest observed entropy / Dirichlet ratio
    second_difference_min: float
    t_s_ratio_ok: bool
    samples: int


def mu_hat(N, beta):
    """Normalised ``e^{bn/2} dim W_n``."""
    lab = labels(N)
    logw = np.array([beta * n / 2 + math.log(multiplicity(N, n)) for n in lab])
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def entropy_functional(f, mu):
    """``D(f^2 | E_mu f^2) = sum mu f^2 log(f^2 / E_mu f^2)``."""
    g = np.asarray(f, dtype=float) ** 2
    mean = float(mu @ g)
    if mean == 0:
        return 0.0
    pos = g > 0
    return float(np.sum(mu[pos] * g[pos] * np.log(g[pos] / mean)))


def dirichlet_form(f, mu):
    """``sum_n mu_n (f_{n+2} - f_n)^2`` over consecutive labels."""
    f = np.asarray(f, dtype=float)
    return float(np.sum(mu[:-1] * np.diff(f) ** 2))


def probe_functions(size, count, rng):
    """Random positive and signed profiles plus indicators and steps."""
    fs = []
    for k in range(count):
        kind = k % 4
        if kind == 0:
            fs.append(rng.normal(size=size))
        elif kind == 1:
            fs.append(np.exp(rng.normal(scale=2.0, size=size)))
        elif kind == 2:
            fs.append(np.cumsum(rng.normal(size=size)))
        else:
            c = rng.integers(0, size)
            fs.append(np.where(np.arange(size) >= c, 1.0, rng.uniform(0, 0.5)))
    for c in range(size):
        fs.append(np.eye(size)[c])
        fs.append((np.arange(size) >= c).astype(float))
    return fs


def gaussian_comparison(N, beta, samples=200, seed=0):
    """Coefficients ``s, t, delta`` and the comparison constant ``K(N)``.

    ``K(N)`` is the largest ratio ``D(f^2 | E_mu f^2) / sum mu (f_{n+2} - f_n)^2``
    over ``samples`` random profiles plus all indicators and step functions.
    """
    mu = invariant_measure(N, beta)
    if np.any(mu <= 0):
        raise DomainError("measure must be strictly positive")
    lab = labels(N)
    mh = mu_hat(N, beta)
    s = np.sqrt(-np.log(mh))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.sqrt(s ** 2 - np.log(s))
    delta = np.diff(s ** 2)
    big = s >= 1
    ratio = t[big] / s[big]
    ok = bool(np.all((ratio >= 1 / math.sqrt(2) - 1e-12) & (ratio <= 1 + 1e-12)))
    rng = np.random.default_rng(seed)
    K = 0.0
    fs = probe_functions(lab.size, samples, rng)
    for f in fs:
        den = dirichlet_form(f, mu)
        if den > 0:
            K = max(K, entropy_functional(f, mu) / den)
    second = np.diff(delta)
    return LSIReport(int(N), float(beta),
                     GaussianComparisonCoefficients(lab, mh, s, t, delta),
                     K, float(second.min()) if second.size else math.inf, ok, len(fs))


# --- mixing --------------------------------------------------------------

@dataclass
class MixingReport:
    steps: int
    spectral_gap: float
    deviation: float


def _deviation(Pk, mu):
    return float(np.abs(Pk / mu[None, :] - 1).max())


def mixing_time(kernel, epsilon=0.5, max_doublings=60):
    """Smallest ``k`` with ``max_{m,n} |Phi^k_{m,n} / mu_n - 1| <= epsilon``.

    Powers are formed by repeated squaring of the nonnegative matrix, which
    keeps every entry accurate to relative rounding error.
    """
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    P, mu = kernel.P, kernel.mu
    sq = np.sqrt(mu)
    S = sq[:, None] * P / sq[None, :]
    ev = np.sort(np.linalg.eigvalsh((S + S.T) / 2))
    gap = float(1 - ev[-2]) if ev.size > 1 else 1.0
    eye = np.eye(P.shape[0])
    if _deviation(eye, mu) <= epsilon:
        return MixingReport(0, gap, _deviation(eye, mu))
    powers = [P]
    while _deviation(powers[-1], mu) > epsilon:
        if len(powers) > max_doublings:
            raise DomainError("chain did not mix within the doubling budget")
        powers.append(powers[-1] @ powers[-1])
    # binary descent: largest k below threshold, built from stored powers
    acc, k = eye, 0
    for i in range(len(powers) - 2, -1, -1):
        cand = acc @ powers[i]
        if _deviation(cand, mu) > epsilon:
            acc, k = cand, k + 2 ** i
    final = acc @ P
    return MixingReport(k + 1, gap, _deviation(final, mu))


def lower_transition_constant(kernel):
    """``min_n Phi_{n+2,n} (N + n + 2)/(n + 1)`` and ``min_n Phi_{n+2,n} N``."""
    lab, P, N = kernel.labels, kernel.P, kernel.N
    if lab.size < 2:
        return math.inf, math.inf
    down = np.array([P[i + 1, i] for i in range(lab.size - 1)])
    n = lab[:-1]
    return float(np.min(down * (N + n + 2) / (n + 1))), float(np.min(down * N))
