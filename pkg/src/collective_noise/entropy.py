"""Relative entropy, logarithmic difference quotients, entropy production and
entropy-decay trajectories.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from .errors import DomainError, NumericStabilityError, ShapeError
from .lindblad_core import GibbsState, conditional_expectation

SUPPORT_TOL = 1e-11
CLAMP = 1e-14


def validate_density(rho, atol=1e-10):
    """Return ``rho`` as a Hermitian array after checking trace and positivity."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ShapeError("density matrix must be square")
    if np.linalg.norm(rho - rho.conj().T) > atol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise DomainError(f"density matrix has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(rho).min() < -1e-12:
        raise DomainError("density matrix is not positive semidefinite")
    return (rho + rho.conj().T) / 2


def _eigh(rho):
    lam, V = np.linalg.eigh((rho + rho.conj().T) / 2)
    return lam, V


def _logm_psd(rho):
    lam, V = _eigh(rho)
    return (V * np.log(np.maximum(lam, CLAMP))) @ V.conj().T


def relative_entropy(rho, sigma):
    """``D(rho | sigma) = tr(rho (log rho - log sigma))``."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ShapeError("rho and sigma have different shapes")
    ls, Vs = _eigh(sigma)
    null = Vs[:, ls <= SUPPORT_TOL]
    if null.size:
        overlap = float(np.real(np.trace(null.conj().T @ rho @ null)))
        if overlap > SUPPORT_TOL:
            raise DomainError(f"support of rho not inside support of sigma (overlap {overlap:.3e})")
    lr, Vr = _eigh(rho)
    pos = lr > CLAMP
    h = float(np.sum(lr[pos] * np.log(lr[pos])))
    log_s = (Vs * np.log(np.maximum(ls, CLAMP))) @ Vs.conj().T
    return h - float(np.real(np.trace(rho @ log_s)))


def difference_quotient_log(rho, x):
    """``J^log_rho(x)``: entrywise ``(log l - log m)/(l - m)`` in ``rho``'s eigenbasis."""
    lam, V = _eigh(np.asarray(rho, dtype=complex))
    if lam.min() <= SUPPORT_TOL:
        raise DomainError("difference quotient requires a strictly positive rho")
    C = _kernels.log_quotient_matrix(np.ascontiguousarray(lam))
    y = V.conj().T @ np.asarray(x) @ V
    return V @ (C * y) @ V.conj().T


@dataclass(frozen=True)
class EntropyProductionValue:
    value: float
    generator: str = ""

    def __float__(self):
        return self.value


def _ep(a, rho):
    lam, V = _eigh(rho)
    if lam.min() <= SUPPORT_TOL:
        raise DomainError("entropy production requires a strictly positive rho")
    comm = a @ rho - rho @ a
    y = V.conj().T @ comm @ V
    C = _kernels.log_quotient_matrix(np.ascontiguousarray(lam))
    return float(np.real(np.sum(np.abs(y) ** 2 * C)))


def entropy_production(a, rho, tag="a"):
    """Tracial entropy production ``EP_a(rho) = <[a, rho], J^log_rho [a, rho]>``."""
    return EntropyProductionValue(_ep(np.asarray(a), np.asarray(rho)), tag)


def entropy_production_pair(a, rho, beta):
    """``e^{b/2} EP_a(rho) + e^{-b/2} EP_{a*}(rho)``.

    Equals the entropy slope ``-d/dt D(rho_t | E*_fix rho)`` at ``b = 0``;
    for ``b > 0`` the exact slope is ``entropy_production_rate``.
    """
    a = np.asarray(a)
    val = math.exp(beta / 2) * _ep(a, rho) + math.exp(-beta / 2) * _ep(a.conj().T, rho)
    return EntropyProductionValue(val, "pair")


def entropy_production_rate(L, rho, sigma=None):
    """Exact ``-d/dt D(rho_t | sigma)`` at ``t = 0`` for ``rho_t = exp(-t L*) rho``.

    ``sigma`` defaults to ``E*_fix rho`` (the ``t -> inf`` limit), which is
    conserved along the flow.
    """
    rho = np.asarray(rho, dtype=complex)
    if sigma is None:
        sigma = fixed_point_state(L, rho)
    drho = -(L.predual_matrix() @ rho.reshape(-1)).reshape(rho.shape)
    return -float(np.real(np.trace(drho @ (_logm_psd(rho) - _logm_psd(sigma)))))


# --- trajectories --------------------------------------------------------

class _PredualFlow:
    """``exp(-t L*)`` through one eigendecomposition of the predual generator."""

    def __init__(self, L):
        M = L.predual_matrix()
        self.dim = L.dim
        lam, V = np.linalg.eig(M)
        self.lam, self.V = lam, V
        self.Vinv = np.linalg.inv(V)
        self.zero = np.abs(lam) <= 1e-9 * max(1.0, np.abs(lam).max())

    def __call__(self, rho, t):
        c = self.Vinv @ rho.reshape(-1)
        if np.isinf(t):
            f = np.where(self.zero, 1.0, 0.0)
        else:
            f = np.exp(-t * self.lam)
            f[self.zero] = 1.0
        out = (self.V @ (f * c)).reshape(self.dim, self.dim)
        return (out + out.conj().T) / 2


def fixed_point_state(L, rho):
    """``E*_fix rho``: the long-time limit of the predual flow."""
    return _PredualFlow(L)(np.asarray(rho, dtype=complex), math.inf)


@dataclass
class TrajectoryPoint:
    time: float
    rho: np.ndarray
    entropy: float


def evolve_trajectory(L, rho0, times):
    """``rho(t) = exp(-t L*) rho0`` with ``D(rho(t) | E*_fix rho0)`` on a time grid."""
    rho0 = validate_density(rho0)
    times = [float(t) for t in times]
    if not times or times[0] < 0 or any(b <= a for a, b in zip(times, times[1:])):
        raise DomainError("times must be increasing and start at t >= 0")
    flow = _PredualFlow(L)
    target = flow(rho0, math.inf)
    out = []
    for t in times:
        rho = rho0.copy() if t == 0 else flow(rho0, t)
        drift = abs(np.trace(rho) - 1)
        if drift > 1e-8:
            raise NumericStabilityError(f"trace drift {drift:.3e} at t={t}")
        if drift > 1e-12:
            rho = rho / np.trace(rho)
        out.append(TrajectoryPoint(t, rho, relative_entropy(rho, target)))
    return out


# --- strong clustering ---------------------------------------------------

def conditional_covariance(A, B, x, N, beta):
    """``Cov_{A u B}(E_A x, E_B x)`` in the KMS inner product of the product state.

    ``A`` and ``B`` are overlapping 0-based qubit subsets.
    """
    A, B = set(A), set(B)
    if not A & B:
        raise DomainError("A and B must overlap")
    C = sorted(A | B)
    d = GibbsState(int(N), float(beta)).matrix("full")
    ea = conditional_expectation(x, "minimal", N, beta, sites=sorted(A))
    eb = conditional_expectation(x, "minimal", N, beta, sites=sorted(B))
    u = ea - conditional_expectation(ea, "minimal", N, beta, sites=C)
    v = eb - conditional_expectation(eb, "minimal", N, beta, sites=C)
    s = np.sqrt(np.real(np.diag(d)))
    return complex(np.trace((s[:, None] * u.conj().T * s[None, :]) @ v))


# --- scalar inequalities -------------------------------------------------

def log_ratio_sides(lam, mu, beta):
    """Both sides of ``(log l - log m)/(l - m) >= e^{-b/2} (log(l e^{-b/2}) - log(m e^{b/2}))/(l e^{-b/2} - m e^{b/2})``."""
    def q(x, y):
        return 1 / x if x == y else (math.log(x) - math.log(y)) / (x - y)
    lhs = q(lam, mu)
    rhs = math.exp(-beta / 2) * q(lam * math.exp(-beta / 2), mu * math.exp(beta / 2))
    return lhs, rhs


def pinsker_sides(rho, sigma):
    """``(D(rho | sigma), ||rho - sigma||_1^2 / 2)``."""
    tn = np.abs(np.linalg.eigvalsh(np.asarray(rho) - np.asarray(sigma))).sum()
    return relative_entropy(rho, sigma), 0.5 * tn ** 2


def random_density(dim, rng, rank=None):
    """Random full-rank (by default) density matrix from a Ginibre sample."""
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho)
