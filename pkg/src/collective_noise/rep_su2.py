"""su(2) structure constants, irreducible representations and Schur-Weyl data.

Conventions
-----------
The irrep ``V_n`` has dimension ``n + 1`` and weight basis ``|n, j>``,
``j = 0..n``, with ``j = 0`` the highest-weight vector:

    h |n,j> = (n - 2j) |n,j>
    a |n,j> = alpha(n, j) |n,j-1>
    a*|n,j> = alpha(n, j+1) |n,j+1>

with ``alpha(n, j) = sqrt(j (n - j + 1))``.  On a single qubit ``a`` is
``[[0, 1], [0, 0]]`` and ``h = diag(1, -1)``.  Tensor-space operators use
the computational basis with qubit 0 as the most significant bit.
"""

from dataclasses import dataclass
from functools import reduce
from math import comb

import numpy as np
import scipy.linalg

from .errors import CapacityError, DomainError

DENSE_LIMIT = 12

_KIND_ALIASES = {
    "a": "a", "lowering": "a", "lower": "a",
    "adag": "adag", "a*": "adag", "raising": "adag", "raise": "adag",
    "h": "h", "cartan": "h",
}


def _kind(kind):
    try:
        return _KIND_ALIASES[str(kind).lower()]
    except KeyError:
        raise DomainError(f"unknown generator kind {kind!r}; use 'a', 'adag' or 'h'") from None


def alpha_squared(n, j):
    """Exact integer ``alpha(n, j)**2 = j (n - j + 1)``."""
    n, j = int(n), int(j)
    if n < 0 or j < 0 or j > n + 1:
        raise DomainError(f"alpha requires 0 <= j <= n+1, got n={n}, j={j}")
    return j * (n - j + 1)


def alpha(n, j):
    """Structure constant ``sqrt(j (n - j + 1))`` of the irrep ``V_n``."""
    return float(np.sqrt(alpha_squared(n, j)))


def alpha_vector(n):
    """Array ``[alpha(n, 0), ..., alpha(n, n + 1)]``."""
    j = np.arange(n + 2, dtype=float)
    return np.sqrt(j * (n - j + 1))


def irrep_generator(n, kind):
    """Matrix of ``a``, ``a*`` or ``h`` on ``V_n`` in the basis ``j = 0..n``."""
    if n < 0:
        raise DomainError("irrep label must be nonnegative")
    kind = _kind(kind)
    if kind == "h":
        return np.diag(np.arange(n, -n - 1, -2)).astype(complex)
    a = np.zeros((n + 1, n + 1), dtype=complex)
    al = alpha_vector(n)
    for j in range(1, n + 1):
        a[j - 1, j] = al[j]
    return a if kind == "a" else a.conj().T


def gamma_generator(n, gamma):
    """Block of ``a (a* a)^gamma`` on ``V_n``; singular values ``alpha^(2 gamma + 1)``."""
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    a = irrep_generator(n, "a")
    return a @ np.linalg.matrix_power(a.conj().T @ a, int(gamma))


def multiplicity(N, n):
    """Exact ``dim W_n = (n+1)/(N+1) * binom(N+1, (N-n)/2)`` (0 if ``n`` is not a label)."""
    N, n = int(N), int(n)
    if n < 0 or n > N or (N - n) % 2:
        return 0
    num = (n + 1) * comb(N + 1, (N - n) // 2)
    q, r = divmod(num, N + 1)
    assert r == 0
    return q


def weight_space_dim(N, w):
    """Exact ``dim H_w = binom(N, (N - w)/2)`` of the weight-``w`` eigenspace of ``pi_N(h)``."""
    N, w = int(N), int(w)
    if abs(w) > N or (N - w) % 2:
        return 0
    return comb(N, (N - w) // 2)


@dataclass(frozen=True)
class SchurWeylDecomposition:
    """``(C^2)^{tensor N} = sum_n V_n (x) W_n`` with labels in decreasing order."""

    N: int
    components: tuple

    @property
    def labels(self):
        return tuple(n for n, _ in self.components)

    def mult(self, n):
        return dict(self.components).get(n, 0)

    @property
    def dimension(self):
        return sum((n + 1) * k for n, k in self.components)

    @property
    def multiplicity_free_dimension(self):
        return sum(n + 1 for n, _ in self.components)


def schur_weyl_decomposition(N):
    """Irrep labels ``n = N, N-2, ...`` with exact multiplicities."""
    if N < 1:
        raise DomainError("N must be positive")
    comps = tuple((n, multiplicity(N, n)) for n in range(N, -1, -2))
    return SchurWeylDecomposition(int(N), comps)


def _check_dense(N, dense_limit):
    limit = DENSE_LIMIT if dense_limit is None else dense_limit
    if N > limit:
        raise CapacityError(f"N={N} exceeds dense limit {limit}")


def site_operator(op, site, N, dense_limit=None):
    """Identity-padded embedding of a single-qubit operator at ``site`` (0-based)."""
    _check_dense(N, dense_limit)
    eye = np.eye(2, dtype=complex)
    return reduce(np.kron, [op if k == site else eye for k in range(N)])


def tensor_generator(N, kind, dense_limit=None):
    """Collective generator ``pi_N(g) = sum_j 1 (x) .. (x) g_j (x) .. (x) 1``."""
    if N < 1:
        raise DomainError("N must be positive")
    _check_dense(N, dense_limit)
    g = irrep_generator(1, kind)
    if _kind(kind) == "h":
        # diagonal: avoid N dense kron products
        bits = (np.arange(2 ** N)[:, None] >> np.arange(N - 1, -1, -1)) & 1
        return np.diag((N - 2 * bits.sum(axis=1)).astype(complex))
    return sum(site_operator(g, i, N, dense_limit) for i in range(N))


def casimir(N, dense_limit=None):
    """``h^2/2 + a a* + a* a`` on the tensor space; equals ``n(n+2)/2`` on ``V_n``."""
    a = tensor_generator(N, "a", dense_limit)
    h = tensor_generator(N, "h", dense_limit)
    return h @ h / 2 + a @ a.conj().T + a.conj().T @ a


def multiplicity_free_generator(N, kind):
    """``sum_n pi_n(g)`` on the multiplicity-free space ``V = sum_n V_n`` (labels decreasing)."""
    decomp = schur_weyl_decomposition(N)
    return scipy.linalg.block_diag(*[irrep_generator(n, kind) for n in decomp.labels])


@dataclass(frozen=True)
class SchurWeylBasis:
    """Explicit orthonormal basis ``|n, j, k>`` of the tensor space.

    Columns of ``U`` are ordered by ``n`` decreasing, then ``j``, then the
    multiplicity index ``k``; ``labels[c] = (n, j, k)`` for column ``c``.
    Only used by dense oracles.
    """

    N: int
    U: np.ndarray
    labels: tuple


def schur_weyl_basis(N, dense_limit=8):
    """Construct ``|n, j, k>`` numerically from highest-weight vectors."""
    _check_dense(N, dense_limit)
    a = tensor_generator(N, "a")
    ad = a.conj().T
    w = np.real(np.diag(tensor_generator(N, "h"))).astype(int)
    cols, labels = [], []
    for n, mult in schur_weyl_decomposition(N).components:
        src = np.flatnonzero(w == n)
        dst = np.flatnonzero(w == n + 2)
        if dst.size:
            hw = scipy.linalg.null_space(a[np.ix_(dst, src)])
        else:
            hw = np.eye(src.size)
        if hw.shape[1] != mult:
            raise DomainError("highest-weight space dimension mismatch")
        tops = np.zeros((2 ** N, mult), dtype=complex)
        tops[src] = hw
        ladder = [tops]
        for j in range(1, n + 1):
            ladder.append(ad @ ladder[-1] / alpha(n, j))
        for j in range(n + 1):
            for k in range(mult):
                cols.append(ladder[j][:, k])
                labels.append((n, j, k))
    U = np.column_stack(cols)
    return SchurWeylBasis(int(N), U, tuple(labels))
