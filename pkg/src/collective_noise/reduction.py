"""Haar-random quantum expanders, the fibred expander channel, the spectral
quantum Fourier transform and the channel identities built from them.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, ShapeError
from .lindblad_core import _sw_basis
from .rep_su2 import DENSE_LIMIT


@dataclass(frozen=True)
class ExpanderSet:
    """Unitaries ``W_0, ..., W_{m-1}`` closed under adjoint (stored in pairs)."""

    dim: int
    unitaries: tuple
    seed: int = None

    @property
    def m(self):
        return len(self.unitaries)


def haar_unitary(dim, rng):
    """Haar-distributed unitary: QR of a complex Ginibre matrix with phase fix."""
    Z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph[None, :]


def expander_set(dim, pairs=3, seed=0):
    """``{U_1, U_1*, ..., U_p, U_p*}`` with Haar-random ``U_i``, deterministic in ``seed``."""
    if dim < 2:
        raise DomainError("dimension must be at least 2")
    rng = np.random.default_rng(seed)
    us = []
    for _ in range(pairs):
        U = haar_unitary(dim, rng)
        us.extend([U, U.conj().T])
    return ExpanderSet(int(dim), tuple(us), seed)


def expander_channel(x, eset):
    """``Psi_W(x) = (1/m) sum_j W_j* x W_j``."""
    return sum(W.conj().T @ x @ W for W in eset.unitaries) / eset.m


def channel_matrix(eset):
    """Row-major superoperator matrix of ``Psi_W``."""
    return sum(np.kron(W.conj().T, W.T) for W in eset.unitaries) / eset.m


def contraction_coefficient(eset):
    """Norm of ``Psi_W`` on traceless matrices (Hilbert-Schmidt geometry)."""
    D = eset.dim
    M = channel_matrix(eset)
    one = np.eye(D).reshape(-1) / np.sqrt(D)
    proj = np.eye(D * D) - np.outer(one, one)
    return float(np.linalg.norm(M @ proj, 2))


def expander_gap(eset):
    """``1 - ||Psi_W - E_tau||_{2->2}``."""
    return 1.0 - contraction_coefficient(eset)


# --- fibred channel ------------------------------------------------------

def expander_block_channel(d, eset, x, inverse=False):
    """Apply ``x_j -> W_{j mod m}* x_j W_{j mod m}`` on fibres ``j < d - (d mod m)``.

    ``x`` has shape ``(d, D, D)``; the remaining ``d mod m`` fibres (all of
    them when ``d < m``) are left unchanged.  ``inverse=True`` applies the
    inverse automorphism.
    """
    x = np.asarray(x)
    if x.ndim != 3 or x.shape[0] != d or x.shape[1:] != (eset.dim, eset.dim):
        raise ShapeError(f"x must have shape ({d}, {eset.dim}, {eset.dim})")
    m = eset.m
    out = x.astype(complex).copy()
    for j in range(d - d % m):
        W = eset.unitaries[j % m]
        out[j] = W @ x[j] @ W.conj().T if inverse else W.conj().T @ x[j] @ W
    return out


def plateau_measure(d, m, eta, rng):
    """Measure constant on each full period ``[l m, (l+1) m)`` with plateau mass ``eta``."""
    L = d // m
    if L < 1:
        raise DomainError("need d >= m for a plateau")
    rest = d - L * m
    if rest == 0 and not np.isclose(eta, 1.0):
        raise DomainError("eta < 1 needs a remainder fibre")
    per = rng.dirichlet(np.ones(L)) * eta
    mu = np.repeat(per / m, m)
    if rest:
        mu = np.concatenate([mu, rng.dirichlet(np.ones(rest)) * (1 - eta)])
    return mu


def fibre_average(mu, y):
    """``E_mu(y) = sum_j mu_j y_j``."""
    return np.tensordot(mu, y, axes=1)


def composite_channel_norm(eset, mu):
    """``||E_mu E^W_mu E_mu - E_tau||_{2->2}`` on ``1 (x) B(H)``.

    ``E^W_mu = (Phi^d_W)^{-1} E_mu Phi^d_W``; the map is assembled column by
    column from its action on matrix units.
    """
    d, D = len(mu), eset.dim
    M = np.zeros((D * D, D * D), dtype=complex)
    for k in range(D * D):
        x = np.zeros(D * D, dtype=complex)
        x[k] = 1
        x = x.reshape(D, D)
        y = fibre_average(mu, expander_block_channel(d, eset, np.broadcast_to(x, (d, D, D))))
        z = fibre_average(mu, expander_block_channel(d, eset, np.broadcast_to(y, (d, D, D)),
                                                     inverse=True))
        M[:, k] = z.reshape(-1)
    one = np.eye(D).reshape(-1) / np.sqrt(D)
    Etau = np.outer(one, one)
    return float(np.linalg.norm(M - Etau, 2))


def composite_bound(theta, eta):
    """``(eta theta + 1 - eta)^2``."""
    return (eta * theta + 1 - eta) ** 2


# --- spectral Fourier transform ------------------------------------------

def fourier_matrix(h):
    """``F[b, a] = e^{-2 pi i a b / h} / sqrt(h)``."""
    k = np.arange(h)
    return np.exp(-2j * np.pi * np.outer(k, k) / h) / np.sqrt(h)


def weight_space_basis(N):
    """Per weight ``w`` the Schur-Weyl columns spanning ``H_w``, ordered by ``n`` then multiplicity."""
    sw = _sw_basis(int(N))
    groups = {}
    for c, (n, j, k) in enumerate(sw.labels):
        groups.setdefault(n - 2 * j, []).append((n, k, c))
    return sw.U, {w: [c for _, _, c in sorted(v)] for w, v in sorted(groups.items())}


def spectral_qft(N, dense_limit=8):
    """``F = sum_w F_w`` acting on each weight space in the canonical basis order."""
    if N > min(dense_limit, DENSE_LIMIT):
        raise CapacityError(f"N={N} exceeds the Schur-Weyl basis limit")
    U, groups = weight_space_basis(N)
    F = np.zeros((2 ** N, 2 ** N), dtype=complex)
    for w, cols in groups.items():
        B = U[:, cols]
        F += B @ fourier_matrix(len(cols)) @ B.conj().T
    return F


def diagonal_expectation(x):
    """``E_inf``: keep the diagonal."""
    return np.diag(np.diag(x))


def fourier_sandwich(h):
    """Superoperator ``E_inf Ad_F* E_inf Ad_F E_inf`` on ``h x h`` matrices."""
    F = fourier_matrix(h)
    Ad = np.kron(F, F.conj())          # x -> F x F*
    Adi = np.kron(F.conj().T, F.T)     # x -> F* x F
    E = np.diag(np.eye(h).reshape(-1))
    return E @ Adi @ E @ Ad @ E


def trace_expectation_matrix(h):
    """Superoperator of ``x -> tr(x)/h * 1``."""
    one = np.eye(h).reshape(-1)
    return np.outer(one, one) / h

