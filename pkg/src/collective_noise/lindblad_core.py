"""Gibbs states, Lindbladians (dense and per block), the KMS inner product and
conditional expectations onto the distinguished subalgebras.

Sign conventions
----------------
``Superoperator.matrix`` stores the positive generator ``L`` so that the
Heisenberg semigroup is ``exp(-t L)``.  The Lindbladian built from a jump
operator ``a`` is

    -L(x) = e^{b/2} (2 a* x a - a* a x - x a* a) + e^{-b/2} (2 a x a* - a a* x - x a a*).

Vectorisation is row-major: ``vec(A X B) = kron(A, B.T) vec(X)``.

The reference state for which this generator satisfies detailed balance is
``d_N`` proportional to ``exp(+(b/2) pi_N(h))``: on a qubit
``d_b = diag(e^{b/2}, e^{-b/2}) / (2 cosh(b/2))``.  The block ``V_n`` weight
of ``|n, j>`` is ``exp(b (n - 2j)/2) / (2 cosh(b/2))^N``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import math
import string

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import CapacityError, DomainError, ShapeError
from .rep_su2 import (
    DENSE_LIMIT, irrep_generator, multiplicity_free_generator, schur_weyl_basis,
    schur_weyl_decomposition, tensor_generator,
)

KERNEL_RTOL = 1e-9


# --- Gibbs state ---------------------------------------------------------

@dataclass(frozen=True)
class GibbsState:
    """Product reference density ``d_N = d_b^{(x) N}`` stored as block weights."""

    N: int
    beta: float

    @property
    def decomposition(self):
        return schur_weyl_decomposition(self.N)

    @property
    def log_normalization(self):
        """``log N_b = -N log(2 cosh(b/2))``."""
        return -self.N * math.log(2 * math.cosh(self.beta / 2))

    @property
    def normalization(self):
        return math.exp(self.log_normalization)

    def weight(self, n, j):
        return math.exp(self.beta * (n - 2 * j) / 2 + self.log_normalization)

    def block_weights(self, n):
        """Weights of ``|n, 0>, ..., |n, n>``."""
        j = np.arange(n + 1)
        return np.exp(self.beta * (n - 2 * j) / 2 + self.log_normalization)

    def single_site(self):
        ep, em = math.exp(self.beta / 2), math.exp(-self.beta / 2)
        return np.diag([ep, em]) / (ep + em)

    def total_trace(self):
        return sum(k * self.block_weights(n).sum() for n, k in self.decomposition.components)

    def matrix(self, space="full"):
        """Dense ``d_N`` on the tensor space or the multiplicity-free space ``sum_n V_n``."""
        if space == "full":
            if self.N > DENSE_LIMIT:
                raise CapacityError(f"N={self.N} exceeds dense limit {DENSE_LIMIT}")
            h = np.real(np.diag(tensor_generator(self.N, "h")))
            return np.diag(np.exp(self.beta * h / 2 + self.log_normalization))
        if space == "mf":
            return np.diag(np.concatenate(
                [self.block_weights(n) for n in self.decomposition.labels]))
        raise DomainError(f"unknown space {space!r}")


def gibbs_state(decomp, beta):
    """Gibbs state on the decomposition's tensor space."""
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    N = decomp.N if hasattr(decomp, "N") else int(decomp)
    return GibbsState(int(N), float(beta))


# --- blocks --------------------------------------------------------------

@dataclass(frozen=True)
class BlockIndex:
    """Operator space spanned by ``|n, j><m, j - d|``, ``jmin <= j <= jmax``."""

    n: int
    m: int
    d: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0 or not (-self.m <= self.d <= self.n):
            raise DomainError(f"invalid block (n={self.n}, m={self.m}, d={self.d})")

    @property
    def jmin(self):
        return max(0, self.d)

    @property
    def jmax(self):
        return min(self.n, self.m + self.d)

    @property
    def size(self):
        return self.jmax - self.jmin + 1

    def adjoint(self):
        return BlockIndex(self.m, self.n, -self.d)


@dataclass
class BlockOperator:
    """Coefficients of ``sum_j c_j |n, j><m, j - d|``."""

    block: BlockIndex
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.block.size,):
            raise ShapeError(f"block {self.block} needs {self.block.size} coefficients")

    def adjoint(self):
        return BlockOperator(self.block.adjoint(), self.coeffs.conj())

    def to_matrix(self, N):
        """Embed into the multiplicity-free space of ``N`` qubits."""
        off = mf_offsets(N)
        dim = sum(k + 1 for k in off)
        out = np.zeros((dim, dim), dtype=complex)
        b = self.block
        j = np.arange(b.jmin, b.jmax + 1)
        out[off[b.n] + j, off[b.m] + j - b.d] = self.coeffs
        return out


@lru_cache(maxsize=None)
def _mf_offsets(N):
    off, pos = {}, 0
    for n in schur_weyl_decomposition(N).labels:
        off[n] = pos
        pos += n + 1
    return off


def mf_offsets(N):
    """Row offset of each ``V_n`` inside the multiplicity-free space (labels decreasing)."""
    return dict(_mf_offsets(int(N)))


def all_blocks(N):
    """Every nonempty block of the multiplicity-free operator space, canonical order."""
    labels = schur_weyl_decomposition(N).labels
    return [BlockIndex(n, m, d) for n in labels for m in labels for d in range(-m, n + 1)]


def block_kms_scaling(blk, gibbs):
    """Diagonal ``(w_n(j) w_m(j-d))^{1/4}`` mapping block coefficients to KMS coordinates."""
    j = np.arange(blk.jmin, blk.jmax + 1)
    wn = gibbs.block_weights(blk.n)[j]
    wm = gibbs.block_weights(blk.m)[j - blk.d]
    return (wn * wm) ** 0.25


# --- superoperators ------------------------------------------------------

@dataclass
class Superoperator:
    """Positive generator ``L`` (semigroup ``exp(-t L)``) as a matrix.

    ``kind`` is ``"dense"`` for an operator on ``dim x dim`` matrices
    (``matrix`` has shape ``dim^2 x dim^2``) or ``"block"`` for the action on
    the ``dim`` coefficients of one ``BlockIndex``.
    """

    dim: int
    matrix: np.ndarray
    kind: str = "dense"
    block: BlockIndex = None
    beta: float = None
    meta: dict = field(default_factory=dict)

    @property
    def derivative(self):
        """Matrix ``T = -L``; coefficients evolve as ``c' = T c``."""
        return -self.matrix

    def apply(self, x):
        """``L(x)`` for a matrix (dense) or coefficient vector (block)."""
        if self.kind == "block":
            return self.matrix @ np.asarray(x)
        x = np.asarray(x)
        return (self.matrix @ x.reshape(-1)).reshape(self.dim, self.dim)

    def predual_matrix(self):
        """Matrix of ``L*`` with respect to the trace pairing ``tr(L(x) r) = tr(x L*(r))``."""
        if self.kind != "dense":
            raise DomainError("predual only defined for dense superoperators")
        p = _transpose_permutation(self.dim)
        return self.matrix.T[np.ix_(p, p)]

    def trace_preservation_defect(self):
        """``||L(1)||``; zero for generators of trace-preserving predual semigroups."""
        if self.kind != "dense":
            raise DomainError("defined for dense superoperators")
        return float(np.linalg.norm(self.apply(np.eye(self.dim))))

    def __add__(self, other):
        if self.kind != other.kind or self.dim != other.dim:
            raise ShapeError("superoperators live on different spaces")
        return Superoperator(self.dim, self.matrix + other.matrix, self.kind, self.block, self.beta)


def _transpose_permutation(dim):
    idx = np.arange(dim * dim).reshape(dim, dim)
    return idx.T.reshape(-1)


def _dissipator(a):
    """Matrix of ``x -> 2 a* x a - a* a x - x a* a``."""
    dim = a.shape[0]
    eye = np.eye(dim)
    ad = a.conj().T
    ada = ad @ a
    return 2 * np.kron(ad, a.T) - np.kron(ada, eye) - np.kron(eye, ada.T)


def lindblad_from_generator(a, beta):
    """Detailed-balance Lindbladian with jump operators ``a`` and ``a*``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("generator must be a square matrix")
    gen = math.exp(beta / 2) * _dissipator(a) + math.exp(-beta / 2) * _dissipator(a.conj().T)
    return Superoperator(a.shape[0], -gen, "dense", beta=float(beta))


def lindblad_dense(N, beta, dense_limit=6):
    """``L^b_N`` on the full ``2^N`` tensor space (``4^N`` superoperator)."""
    if N > dense_limit:
        raise CapacityError(f"dense superoperator needs N <= {dense_limit}")
    return lindblad_from_generator(tensor_generator(N, "a"), beta)


def lindblad_multiplicity_free(N, beta, dense_limit=24):
    """``L^b_N`` restricted to the multiplicity-free space ``sum_n V_n``."""
    if N > dense_limit:
        raise CapacityError(f"multiplicity-free superoperator needs N <= {dense_limit}")
    return lindblad_from_generator(multiplicity_free_generator(N, "a"), beta)


def schur_multiplier_selfadjoint(A, atol=1e-10):
    """Schur coefficients ``-(l_i - l_j)^2`` of ``x -> 2 A x A - A^2 x - x A^2`` in ``A``'s eigenbasis."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError("A must be square")
    if np.linalg.norm(A - A.conj().T) > atol:
        raise DomainError("A is not Hermitian")
    lam = np.linalg.eigvalsh(A)
    return -(lam[:, None] - lam[None, :]) ** 2


def block_derivative(blk, beta):
    """Tridiagonal ``T`` with ``c' = T c`` on the coefficients of ``blk``."""
    diag, lower, upper = _kernels.block_tridiagonal(blk.n, blk.m, blk.d, float(beta))
    return np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)


def lindblad_block(blk, beta):
    """Block action of ``L^b_N`` on ``B_{n,m,d}``; ``.derivative`` is the tridiagonal ``T``."""
    if not isinstance(blk, BlockIndex):
        blk = BlockIndex(*blk)
    T = block_derivative(blk, beta)
    return Superoperator(blk.size, -T, "block", blk, float(beta))


# --- KMS inner product ---------------------------------------------------

def _density(d, dim):
    if isinstance(d, GibbsState):
        full = 2 ** d.N
        if dim == full:
            return d.matrix("full")
        if dim == d.decomposition.multiplicity_free_dimension:
            return d.matrix("mf")
        raise ShapeError(f"Gibbs state of N={d.N} does not act on dimension {dim}")
    d = np.asarray(d)
    if d.shape != (dim, dim):
        raise ShapeError("density and operators have different shapes")
    return d


def _psd_power(d, p):
    if np.count_nonzero(d - np.diag(np.diag(d))) == 0:
        return np.diag(np.real(np.diag(d)) ** p)
    lam, V = np.linalg.eigh(d)
    if lam.min() <= 0:
        raise DomainError("reference density must be positive definite")
    return (V * lam ** p) @ V.conj().T


def kms_inner(x, y, d):
    """``<x, y>_d = tr(d^{1/2} x* d^{1/2} y)``."""
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape or x.ndim != 2:
        raise ShapeError("x and y must be square matrices of the same shape")
    s = _psd_power(_density(d, x.shape[0]), 0.5)
    return complex(np.trace(s @ x.conj().T @ s @ y))


def kms_conjugation(d, power):
    """Superoperator matrix of ``x -> d^p x d^p``."""
    s = _psd_power(d, power)
    return np.kron(s, s.T)


# --- conditional expectations -------------------------------------------

@lru_cache(maxsize=8)
def _sw_basis(N):
    return schur_weyl_basis(N)


def _structure(N, space):
    """Basis change and ``(n, j, k)`` labels for the chosen space."""
    if space == "full":
        sw = _sw_basis(int(N))
        return sw.U, sw.labels
    labels = tuple((n, j, 0) for n in schur_weyl_decomposition(N).labels for j in range(n + 1))
    return None, labels


def _to_sw(x, U):
    return x if U is None else U.conj().T @ x @ U


def _from_sw(y, U):
    return y if U is None else U @ y @ U.conj().T


def _fix(y, labels, gibbs):
    out = np.zeros_like(y)
    lab = np.array(labels)
    for n, mult in gibbs.decomposition.components:
        idx = np.flatnonzero(lab[:, 0] == n)
        if idx.size == 0:
            continue
        mult = idx.size // (n + 1)
        blk = y[np.ix_(idx, idx)].reshape(n + 1, mult, n + 1, mult)
        w = gibbs.block_weights(n)
        avg = np.einsum("j,jajb->ab", w, blk) / w.sum()
        out[np.ix_(idx, idx)] = np.kron(np.eye(n + 1), avg)
    return out


def _omega_mask(labels):
    lab = np.array(labels)
    return (lab[:, None, 0] == lab[None, :, 0]) & (lab[:, None, 1] == lab[None, :, 1])


def _diag(y, labels):
    out = np.zeros_like(y)
    lab = np.array(labels)
    for key in sorted({(n, j) for n, j, _ in labels}):
        idx = np.flatnonzero((lab[:, 0] == key[0]) & (lab[:, 1] == key[1]))
        out[idx, idx] = np.trace(y[np.ix_(idx, idx)]) / idx.size
    return out


def _sigma(x, weights):
    out = np.zeros_like(x)
    for w in np.unique(weights):
        idx = np.flatnonzero(weights == w)
        out[idx, idx] = np.trace(x[np.ix_(idx, idx)]) / idx.size
    return out


def _minimal(x, N, gibbs, sites):
    sites = sorted(set(int(s) for s in sites))
    if not sites or sites[0] < 0 or sites[-1] >= N:
        raise DomainError(f"site subset {sites} not inside 0..{N - 1}")
    s = np.sqrt(np.diag(gibbs.single_site()))
    X = x.reshape([2] * (2 * N)).astype(complex)
    for a in sites:
        for ax in (a, N + a):
            shape = [1] * (2 * N)
            shape[ax] = 2
            X = X * s.reshape(shape)
    rest = [i for i in range(N) if i not in sites]
    letters = string.ascii_letters
    row = list(letters[:N])
    col = list(letters[N:2 * N])
    for a in sites:
        col[a] = row[a]
    out = "".join(row[i] for i in rest) + "".join(col[i] for i in rest)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, X)
    # tensor back with the identity on the traced sites
    res = np.zeros([2] * (2 * N), dtype=complex)
    for combo in np.ndindex(*([2] * len(sites))):
        sl = [slice(None)] * (2 * N)
        for a, v in zip(sites, combo):
            sl[a] = sl[N + a] = v
        res[tuple(sl)] = red
    return res.reshape(2 ** N, 2 ** N)


TARGETS = ("fix", "omega", "diag", "sigma", "minimal")


def conditional_expectation(x, target, N, beta, space="full", sites=None):
    """Conditional expectation of ``x`` onto a distinguished subalgebra.

    Parameters
    ----------
    x : matrix on the tensor space (``space="full"``) or on the
        multiplicity-free space ``sum_n V_n`` (``space="mf"``).
    target : ``"fix"`` (``sum_n 1 (x) B(W_n)``), ``"omega"`` (commutant of
        ``|pi(a)|`` and ``|pi(a*)|``), ``"diag"`` (``sum_n l_inf^{n+1} (x) 1``),
        ``"sigma"`` (functions of ``pi_N(h)``) or ``"minimal"`` (minimal
        conditional expectation of ``d_N`` on the 0-based qubit subset ``sites``).
    """
    x = np.asarray(x, dtype=complex)
    gibbs = GibbsState(int(N), float(beta))
    if target not in TARGETS:
        raise DomainError(f"unknown conditional expectation target {target!r}")
    if space not in ("full", "mf"):
        raise DomainError(f"unknown space {space!r}")
    if target == "minimal":
        if space != "full":
            raise DomainError("minimal conditional expectation acts on the full tensor space")
        if N > DENSE_LIMIT:
            raise CapacityError(f"N={N} exceeds dense limit {DENSE_LIMIT}")
        return _minimal(x, int(N), gibbs, sites or [])
    if space == "full" and N > 8:
        raise CapacityError("explicit Schur-Weyl basis limited to N <= 8")
    U, labels = _structure(N, space)
    if x.shape != (len(labels), len(labels)):
        raise ShapeError(f"x has shape {x.shape}, expected {len(labels)} square")
    if target == "sigma":
        if space == "full":
            w = np.real(np.diag(tensor_generator(N, "h"))).astype(int)
        else:
            w = np.array([n - 2 * j for n, j, _ in labels])
        return _sigma(x, w)
    y = _to_sw(x, U)
    if target == "fix":
        y = _fix(y, labels, gibbs)
    elif target == "omega":
        y = np.where(_omega_mask(labels), y, 0)
    else:
        y = _diag(y, labels)
    return _from_sw(y, U)


def conditional_expectation_matrix(target, N, beta, space="full", sites=None):
    """Superoperator matrix (row-major vec) of ``conditional_expectation``."""
    dim = 2 ** N if space == "full" else schur_weyl_decomposition(N).multiplicity_free_dimension
    cols = []
    for k in range(dim * dim):
        e = np.zeros(dim * dim, dtype=complex)
        e[k] = 1
        cols.append(conditional_expectation(e.reshape(dim, dim), target, N, beta, space, sites).reshape(-1))
    return np.column_stack(cols)


def kernel_projection(L, d):
    """KMS-orthogonal projection onto ``ker L`` (dense), i.e. ``E_fix`` as a matrix."""
    d = _density(d, L.dim)
    G = kms_conjugation(d, 0.25)
    Gi = kms_conjugation(d, -0.25)
    H = G @ L.matrix @ Gi
    H = (H + H.conj().T) / 2
    lam, V = np.linalg.eigh(H)
    tol = KERNEL_RTOL * max(1.0, np.abs(lam).max())
    V0 = V[:, np.abs(lam) <= tol]
    return Gi @ (V0 @ V0.conj().T) @ G


def multiplicity_free_embedding(N):
    """Generators ``a`` on ``sum_n V_n`` (helper for dense cross-checks)."""
    return scipy.linalg.block_diag(*[irrep_generator(n, "a") for n in schur_weyl_decomposition(N).labels])
