"""Generalized Dicke models with rotation angles: collective generators,
rotation unitaries, fixed-point dimensions and the Vandermonde criterion.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import CapacityError, DomainError, ShapeError
from .lindblad_core import KERNEL_RTOL, Superoperator, lindblad_from_generator
from .rep_su2 import DENSE_LIMIT, irrep_generator, site_operator
from .spectral import kms_symmetrize

DEFAULT_SEED = 20240611
ANGLE_TOL = 1e-9
INDETERMINATE_TOL = 1e-7


def _angles(theta, dense_limit=None):
    theta = np.mod(np.asarray(theta, dtype=float).ravel(), 2 * np.pi)
    limit = DENSE_LIMIT if dense_limit is None else dense_limit
    if theta.size < 1:
        raise DomainError("need at least one angle")
    if theta.size > limit:
        raise CapacityError(f"N={theta.size} exceeds dense limit {limit}")
    return theta


def collective_generator(theta, dense_limit=None):
    """``O_theta = sum_j e^{i theta_j} a_j`` on ``(C^2)^{(x) N}``."""
    theta = _angles(theta, dense_limit)
    N = theta.size
    a = irrep_generator(1, "a")
    return sum(np.exp(1j * t) * site_operator(a, i, N, dense_limit) for i, t in enumerate(theta))


def rotation_unitary(theta, dense_limit=None):
    """``U_theta = (x)_j exp(i theta_j h_j / 2)``; then ``O_theta = U_theta pi_N(a) U_theta*``."""
    theta = _angles(theta, dense_limit)
    diag = np.ones(1, dtype=complex)
    for t in theta:
        diag = np.kron(diag, np.array([np.exp(1j * t / 2), np.exp(-1j * t / 2)]))
    return np.diag(diag)


def rotated_lindbladian(theta, beta, dense_limit=None):
    """``L^b_{O_theta}`` with jump operators ``O_theta`` and ``O_theta*``."""
    return lindblad_from_generator(collective_generator(theta, dense_limit), beta)


def fixed_point_dim(L, d):
    """Kernel dimension of the KMS-symmetrised generator (relative threshold 1e-9)."""
    lam = np.linalg.eigvalsh(kms_symmetrize(L, d))
    return int(np.sum(np.abs(lam) <= KERNEL_RTOL * max(1.0, np.abs(lam).max())))


def random_angles(N, seed=DEFAULT_SEED):
    return np.random.default_rng(seed).uniform(0, 2 * np.pi, size=N)


@dataclass
class VandermondeResult:
    """Outcome of the genericity test on difference angles ``theta - phi``.

    ``holds`` is ``True``/``False``, or ``None`` when a quantity sits
    within the indeterminate band.  ``pairwise_condition`` is the pairwise
    condition ``(theta_i - theta_j) - (phi_i - phi_j) != 0 mod 2 pi`` and
    ``determinant`` the modulus ``prod |z_j| prod_{i<j} ||z_i|^2 - |z_j|^2|``
    with ``z_j = 1 + e^{i (theta_j - phi_j)}``.  ``witness`` is a 1-based
    offending pair ``(i, j)`` or ``(j, j)`` for a vanishing ``z_j``.
    """

    holds: object
    witness: tuple
    pairwise_condition: bool
    determinant: float


def _angle_dist(x):
    x = np.mod(x, 2 * np.pi)
    return np.minimum(x, 2 * np.pi - x)


def vandermonde_check(theta, phi):
    """Cos-distinctness test of ``|z_j|^2 = 2 + 2 cos(theta_j - phi_j)``."""
    theta = np.asarray(theta, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    if theta.shape != phi.shape:
        raise ShapeError("theta and phi must have equal length")
    delta = theta - phi
    N = delta.size
    z2 = 2 + 2 * np.cos(delta)
    det = float(np.prod(np.sqrt(np.maximum(z2, 0.0))))
    pairwise = True
    worst, witness = math.inf, None
    for i in range(N):
        # z_j = 0 when delta_j = pi
        dist = _angle_dist(delta[i] - np.pi)
        if dist < worst:
            worst, witness = dist, (i + 1, i + 1)
    for i in range(N):
        for j in range(i + 1, N):
            det *= abs(z2[i] - z2[j])
            if _angle_dist(delta[i] - delta[j]) <= ANGLE_TOL:
                pairwise = False
            # cos d_i = cos d_j  iff  d_i = +-d_j mod 2 pi
            dist = min(_angle_dist(delta[i] - delta[j]), _angle_dist(delta[i] + delta[j]))
            if dist < worst:
                worst, witness = dist, (i + 1, j + 1)
    if worst <= ANGLE_TOL:
        holds = False
    elif worst <= INDETERMINATE_TOL:
        holds = None
    else:
        holds, witness = True, None
    return VandermondeResult(holds, witness, pairwise, det)


# --- Lie closure oracle --------------------------------------------------

def _realvec(X):
    v = X.reshape(-1)
    return np.concatenate([v.real, v.imag])


def _new_directions(B, cands, tol):
    """Orthonormal rows spanning ``cands`` modulo the row space of ``B``."""
    scale = np.maximum(1.0, np.linalg.norm(cands, axis=1))[:, None]
    R = cands / scale
    for _ in range(2):
        R = R - (R @ B.T) @ B
    R = R[np.linalg.norm(R, axis=1) > tol]
    if not R.size:
        return R
    _, sv, Vt = np.linalg.svd(R, full_matrices=False)
    new = Vt[sv > tol]
    for _ in range(2):
        new = new - (new @ B.T) @ B
    return new / np.linalg.norm(new, axis=1)[:, None]


def lie_closure(generators, max_dim=64, tol=1e-9, max_iter=64, chunk_bytes=2 ** 26):
    """Orthonormal real basis (as matrices) of the real Lie algebra generated.

    Brackets of each new batch with the current basis are formed in chunks and
    reduced against the basis by block Gram-Schmidt plus an SVD.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        return []
    size = gens[0].shape[0]
    if size > max_dim:
        raise CapacityError(f"matrices of size {size} exceed {max_dim}")
    ceiling = 2 * size * size

    def to_mats(rows):
        half = rows.shape[1] // 2
        return (rows[:, :half] + 1j * rows[:, half:]).reshape(-1, size, size)

    def to_rows(mats):
        flat = mats.reshape(mats.shape[0], -1)
        return np.hstack([flat.real, flat.imag])

    B = _new_directions(np.zeros((0, ceiling)), to_rows(np.stack(gens)), tol)
    frontier = B
    for _ in range(max_iter):
        if not frontier.size or B.shape[0] >= ceiling:
            break
        F = to_mats(frontier)
        step = max(1, chunk_bytes // (16 * size * size * max(1, B.shape[0])))
        added = []
        for i in range(0, F.shape[0], step):
            Y = to_mats(B)
            X = F[i:i + step]
            Z = np.einsum("fij,kjl->fkil", X, Y) - np.einsum("kij,fjl->fkil", Y, X)
            new = _new_directions(B, to_rows(Z.reshape(-1, size, size)), tol)
            if new.size:
                B = np.vstack([B, new])
                added.append(new)
        frontier = np.vstack(added) if added else np.zeros((0, ceiling))
    return list(to_mats(B))


def lie_closure_dim(generators, **kw):
    """Real dimension of the Lie algebra generated by ``generators``."""
    return len(lie_closure(generators, **kw))


def in_span(basis, X, tol=1e-8):
    """Whether ``X`` lies in the real span of ``basis``."""
    if not basis:
        return bool(np.linalg.norm(X) <= tol)
    B = np.column_stack([_realvec(b) for b in basis])
    v = _realvec(np.asarray(X, dtype=complex))
    coef, *_ = np.linalg.lstsq(B, v, rcond=None)
    return bool(np.linalg.norm(B @ coef - v) <= tol * max(1.0, np.linalg.norm(v)))


def commutant_dim(generators, tol=1e-9):
    """Dimension of ``{X : [X, g] = 0 for all g}``."""
    gens = [np.asarray(g, dtype=complex) for g in generators]
    size = gens[0].shape[0]
    eye = np.eye(size)
    M = np.vstack([np.kron(g, eye) - np.kron(eye, g.T) for g in gens])
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s <= tol * max(1.0, s.max()))) + max(0, size * size - s.size)


def lie_primitivity_oracle(generators):
    """``(primitive, commutant_dim)`` from the generated Lie algebra.

    Primitive when the closure contains every single-site ``a_j`` and ``a_j*``;
    the commutant dimension of the closure equals the fixed-point dimension of
    a detailed-balance Lindbladian with these jump operators.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    N = int(round(math.log2(gens[0].shape[0])))
    basis = lie_closure(gens)
    a = irrep_generator(1, "a")
    singles = all(in_span(basis, site_operator(op, i, N))
                  for i in range(N) for op in (a, a.conj().T))
    return singles, commutant_dim(basis)


def combined_lindbladian(theta, beta, phi=None):
    """``L^b_{O_phi} + L^b_{O_theta}`` (``phi`` defaults to zero, i.e. ``L^b_N``)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.zeros_like(theta) if phi is None else np.asarray(phi, dtype=float)
    L = rotated_lindbladian(phi, beta) + rotated_lindbladian(theta, beta)
    return Superoperator(L.dim, L.matrix, "dense", beta=float(beta))
