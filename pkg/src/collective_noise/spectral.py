"""Spectral gaps in the KMS geometry, the recurrence-polynomial spectrum,
uniform spectral differences and the O(1/N) gap witness.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import warnings

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P

from . import _kernels
from .errors import ContractError, DomainError
from .lindblad_core import (
    KERNEL_RTOL, BlockIndex, BlockOperator, GibbsState, Superoperator, all_blocks,
    block_derivative, block_kms_scaling, kms_conjugation, _density,
)
from .rep_su2 import alpha_squared, gamma_generator


@dataclass
class GapReport:
    N: int
    beta: float
    gap: float
    kernel_dim: int
    witness_quotient: float
    per_block_minima: dict = field(repr=False)


@dataclass
class SpectralDifferenceReport:
    N: int
    gamma: float
    delta: float
    argmin: tuple  # ((n, j), (m, k)) achieving the minimum


# --- KMS symmetrisation --------------------------------------------------

def kms_symmetrize(L, d, atol=1e-8):
    """Hermitian ``H = Gamma^{1/2} L Gamma^{-1/2}`` with ``Gamma^{1/2} x = d^{1/4} x d^{1/4}``.

    For a block superoperator ``d`` must be a ``GibbsState``.  Raises
    ``ContractError`` when ``L`` is not KMS-self-adjoint.
    """
    if L.kind == "block":
        q = block_kms_scaling(L.block, d)
        H = (q[:, None] * L.matrix) / q[None, :]
    else:
        dm = _density(d, L.dim)
        H = kms_conjugation(dm, 0.25) @ L.matrix @ kms_conjugation(dm, -0.25)
    defect = float(np.linalg.norm(H - H.conj().T))
    if defect > atol * max(1.0, float(np.linalg.norm(H))):
        raise ContractError(f"superoperator is not KMS-self-adjoint (defect {defect:.3e})")
    return (H + H.conj().T) / 2


def block_symmetric_tridiagonal(blk, beta):
    """Diagonal and off-diagonal of the KMS-symmetrised block ``-T``."""
    diag, lower, upper = _kernels.block_tridiagonal(blk.n, blk.m, blk.d, float(beta))
    # the symmetrised off-diagonal is the geometric mean of the two couplings
    return -diag, -np.sqrt(lower * upper)


def block_eigenvalues(blk, beta):
    """Eigenvalues of ``L`` on one block (ascending, nonnegative up to rounding)."""
    diag, off = block_symmetric_tridiagonal(blk, beta)
    if diag.size == 1:
        return diag.copy()
    return scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True)


def block_spectra(N, beta, jobs=1):
    """``[(BlockIndex, eigenvalues)]`` for every block of the multiplicity-free space."""
    blocks = all_blocks(N)
    # L commutes with the adjoint, so a block and its adjoint share a spectrum
    reps = [b for b in blocks if (b.n, b.d) >= (b.m, -b.d)]
    if jobs and jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            vals = list(ex.map(lambda b: block_eigenvalues(b, beta), reps))
    else:
        vals = [block_eigenvalues(b, beta) for b in reps]
    found = dict(zip(reps, vals))
    return [(b, found[b] if b in found else found[b.adjoint()]) for b in blocks]


def expanded_spectrum(N, beta):
    """Full tensor-space spectrum: each block repeated ``mult(n) mult(m)`` times."""
    decomp = GibbsState(N, beta).decomposition
    out = []
    for blk, ev in block_spectra(N, beta):
        out.append(np.repeat(ev, decomp.mult(blk.n) * decomp.mult(blk.m)))
    return np.sort(np.concatenate(out))


def spectral_gap(N, beta, jobs=1, with_witness=True):
    """Smallest nonzero eigenvalue of ``L^b_N`` on the multiplicity-free space."""
    if N < 1:
        raise DomainError("N must be positive")
    spectra = block_spectra(N, beta, jobs)
    allv = np.concatenate([ev for _, ev in spectra])
    if allv.min() < -1e-9 * max(1.0, np.abs(allv).max()):
        raise ContractError(f"negative eigenvalue {allv.min():.3e} in KMS geometry")
    tol = KERNEL_RTOL * max(1.0, np.abs(allv).max())
    kernel = int(np.sum(np.abs(allv) <= tol))
    nonzero = allv[np.abs(allv) > tol]
    gap = float(nonzero.min()) if nonzero.size else math.inf
    minima = {blk: float(ev.min()) for blk, ev in spectra}
    wq = math.nan
    if with_witness and N >= 3:
        wq = gap_upper_bound_witness(N, beta).quotient
    return GapReport(int(N), float(beta), gap, kernel, wq, minima)


# --- recurrence polynomial ----------------------------------------------

@dataclass
class RecurrenceSpectrum:
    """Decay rates of block ``(n, m, 0)`` from the roots of ``g``.

    ``eigenvalues`` are the eigenvalues of ``L`` (nonnegative decay rates),
    ``roots`` the roots ``gamma = x1 / x0`` of ``g``, ``root_product_inverse``
    ``prod 1/|gamma|`` and ``beta01_power`` the value ``T[0,1]^n`` it is
    compared with.  ``used_fallback`` flags a tridiagonal fallback.
    """

    n: int
    m: int
    beta: float
    eigenvalues: np.ndarray
    roots: np.ndarray
    root_product_inverse: float
    beta01_power: float
    used_fallback: bool = False


def recurrence_polynomials(n, m, beta):
    """``f_0, ..., f_s`` and ``g`` as coefficient arrays in ``gamma = x1/x0``.

    ``s = min(n, m)``; the eigenvector of block ``(n, m, 0)`` satisfies
    ``x_j = x_0 f_j(gamma)`` and ``g(gamma) = 0``.
    """
    T = block_derivative(BlockIndex(n, m, 0), beta)
    s = T.shape[0] - 1
    b = lambda i, k: T[i, k]
    f = [np.array([1.0]), np.array([0.0, 1.0])]
    for j in range(1, s):
        nxt = P.polysub(P.polymul(f[j], np.array([b(0, 0) - b(j, j), b(0, 1)])),
                        f[j - 1] * b(j, j - 1))
        f.append(nxt / b(j, j + 1))
    g = P.polyadd(f[s - 1] * b(s, s - 1), P.polymul(f[s], np.array([b(s, s) - b(0, 0), -b(0, 1)])))
    return f[:s + 1], g


def block_spectrum_recurrence(n, m, beta, imag_tol=1e-7):
    """Spectrum of block ``(n, m, 0)`` via the roots of the recurrence polynomial.

    Validation path only; the tridiagonal solver is authoritative.
    """
    if n == m or n < 1 or m < 1:
        raise DomainError("recurrence requires n != m, both >= 1")
    _, g = recurrence_polynomials(n, m, beta)
    g = np.trim_zeros(g, "b")
    roots = np.roots(g[::-1] / g[-1])
    fallback = False
    if roots.size and np.abs(roots.imag).max() > imag_tol * max(1.0, np.abs(roots).max()):
        warnings.warn("complex roots in recurrence polynomial; using tridiagonal fallback")
        fallback = True
    gam = np.sort(roots.real)
    scale = math.exp(-beta / 2)
    rates = scale * (n + m - 2 * math.sqrt(n * m) * gam)
    if fallback:
        rates = block_eigenvalues(BlockIndex(n, m, 0), beta)
    T = block_derivative(BlockIndex(n, m, 0), beta)
    return RecurrenceSpectrum(
        n, m, float(beta), np.sort(rates), gam,
        float(abs(g[-1] / g[0])) if g[0] != 0 else math.inf,
        float(T[0, 1] ** min(n, m)), fallback)


# --- uniform spectral difference ----------------------------------------

def min_spectral_difference(N, gamma):
    """Minimum positive gap between distinct values ``alpha(n, j)**gamma``, ``1 <= n <= N``."""
    if N < 2:
        raise DomainError("N must be at least 2")
    # deduplicate on the exact integers alpha^2 before taking powers
    where = {}
    for n in range(1, N + 1):
        for j in range(n + 2):
            where.setdefault(alpha_squared(n, j), (n, j))
    keys = np.array(sorted(where), dtype=float)
    vals = keys ** (gamma / 2)
    gaps = np.diff(vals)
    i = int(np.argmin(gaps))
    ks = sorted(where)
    return SpectralDifferenceReport(int(N), float(gamma), float(gaps[i]),
                                    (where[ks[i]], where[ks[i + 1]]))


def gamma_singular_values(n, gamma):
    """Singular values of ``a (a* a)^gamma`` on ``V_n``, ascending."""
    return np.sort(np.linalg.svd(gamma_generator(n, gamma), compute_uv=False))


# --- gap witness ---------------------------------------------------------

@dataclass
class WitnessReport:
    """Dirichlet-form witness for the O(1/N) gap upper bound.

    ``xi`` lives in block ``(N, N-2, 0)``, ``xi_star`` in ``(N-2, N, 0)``.
    ``dirichlet`` is ``<xi, xi>_L``, ``norm2`` is ``||xi||_2^2`` and
    ``lemma_bound`` is ``2 e^{b/2} ||xi||^2 / N``.
    """

    N: int
    beta: float
    xi: BlockOperator
    xi_star: BlockOperator
    dirichlet: float
    dirichlet_star: float
    norm2: float
    lemma_bound: float
    quotient: float
    support: str


def _dirichlet(blk, coeffs_kms, beta):
    diag, off = block_symmetric_tridiagonal(blk, beta)
    c = np.asarray(coeffs_kms)
    Hc = diag * c
    Hc[:-1] += off * c[1:]
    Hc[1:] += off * c[:-1]
    return float(np.real(np.vdot(c, Hc)))


def gap_upper_bound_witness(N, beta, support="block"):
    """Rayleigh quotient of ``x = 1 - (x~ + x~*)/2`` with ``x~`` in block ``(N, N-2, 0)``.

    The KMS coordinates are ``xi_j = e^{-(j-1) b/2} xi_1`` with
    ``xi_1 = N_b^{1/2} e^{-bN/4 + 5b/4}``.  ``support="block"`` uses every
    ``j = 0..N-2`` of the block (``x~`` constant); ``support="lemma"`` uses
    only ``j = 1..N-2``.
    """
    if N < 3:
        raise DomainError("witness requires N >= 3")
    if support not in ("block", "lemma"):
        raise DomainError("support must be 'block' or 'lemma'")
    gibbs = GibbsState(N, beta)
    blk = BlockIndex(N, N - 2, 0)
    j = np.arange(blk.jmin, blk.jmax + 1)
    xi1 = math.exp(gibbs.log_normalization / 2 - beta * N / 4 + 5 * beta / 4)
    xi = xi1 * np.exp(-(j - 1) * beta / 2)
    if support == "lemma":
        xi = np.where(j >= 1, xi, 0.0)
    q = block_kms_scaling(blk, gibbs)
    xi_op = BlockOperator(blk, xi / q)  # coefficients of x~ itself
    xs_op = xi_op.adjoint()
    dl = _dirichlet(blk, xi, beta)
    ds = _dirichlet(blk.adjoint(), xi, beta)
    norm2 = float(np.sum(np.abs(xi) ** 2))
    quotient = (dl + ds) / (2 * norm2)
    return WitnessReport(int(N), float(beta), xi_op, xs_op, dl, ds, norm2,
                         2 * math.exp(beta / 2) * norm2 / N, quotient, support)


# --- cb return time ------------------------------------------------------

def cb_return_time_bound(delta, epsilon):
    """``t_cb(eps) <= pi / (eps^2 delta^2)`` for a Schur-multiplier semigroup with gap ``delta``."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    return math.pi / (epsilon ** 2 * delta ** 2)


def cb_return_profile(eigenvalues, t):
    """``max_i sum_{j != i} exp(-t (l_i - l_j)^2)`` for the Schur multiplier semigroup."""
    lam = np.asarray(eigenvalues, dtype=float)
    K = np.exp(-t * (lam[:, None] - lam[None, :]) ** 2)
    np.fill_diagonal(K, 0.0)
    return float(K.sum(axis=1).max())


def dense_kms_spectrum(L, d):
    """Sorted eigenvalues of a dense superoperator in the KMS geometry."""
    return np.linalg.eigvalsh(kms_symmetrize(L, d))


def superoperator_from_block(blk, beta):
    """Convenience: block Lindbladian as a ``Superoperator``."""
    T = block_derivative(blk, beta)
    return Superoperator(blk.size, -T, "block", blk, float(beta))
