"""Dense real linear algebra used by the geometry engines.

Matrices are plain ``numpy`` float arrays. Functions that make sense on a
stack of matrices (``determinant``, ``cofactor_matrix``) accept arrays of
shape ``(..., n, n)``.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import factorial

import numpy as np
import scipy.linalg

from .errors import ContractError, DimensionError, NonRegularPointError, NotSingularError

UNIT_TOL = 1e-12
# combinatorial Pfaffian is enumerated over S_{2n}; 8! = 40320 terms max
MAX_COMBINATORIAL = 8


def _square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def frobenius_inner(X, Y):
    """tr(XᵀY)."""
    return float(np.sum(np.asarray(X) * np.asarray(Y)))


def antisymmetrize(X):
    X = np.asarray(X, dtype=float)
    return 0.5 * (X - X.T)


def is_skew(X, tol=0.0):
    X = np.asarray(X)
    return X.ndim == 2 and X.shape[0] == X.shape[1] and np.max(np.abs(X + X.T), initial=0.0) <= tol


def _require_skew(A, tol=1e-12):
    A = _square(A)
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    if not is_skew(A, tol * scale):
        raise ContractError("matrix is not skew-symmetric")
    return A


def _require_even(A):
    if A.shape[0] % 2:
        raise DimensionError(f"Pfaffian undefined for odd dimension {A.shape[0]}")


def determinant(M):
    """Determinant by Gaussian elimination with partial pivoting.

    Works on stacks of matrices. Row swaps only flip the sign, so permutation
    matrices come out as exactly +-1.
    """
    A = _square(M).copy()
    n = A.shape[-1]
    batch = A.shape[:-2]
    A = A.reshape((-1, n, n))
    m = A.shape[0]
    rows = np.arange(m)
    det = np.ones(m)
    for k in range(n):
        piv = k + np.argmax(np.abs(A[:, k:, k]), axis=1)
        swap = piv != k
        if np.any(swap):
            r = rows[swap]
            top = A[r, k, :].copy()
            A[r, k, :] = A[r, piv[swap], :]
            A[r, piv[swap], :] = top
            det[swap] = -det[swap]
        p = A[:, k, k]
        det = det * p
        nz = p != 0.0
        if k + 1 < n and np.any(nz):
            f = np.zeros((m, n - k - 1))
            f[nz] = A[nz, k + 1 :, k] / p[nz, None]
            A[:, k + 1 :, k:] -= f[:, :, None] * A[:, k, None, k:]
    det = det.reshape(batch)
    return float(det) if det.ndim == 0 else det


def cofactor_matrix(X):
    """Matrix of cofactors, i.e. the gradient of det with respect to the entries.

    Built from explicit minors so it is valid for singular ``X`` as well.
    """
    X = _square(X)
    n = X.shape[-1]
    if n == 1:
        return np.ones_like(X)
    idx = np.arange(n)
    minors = np.empty(X.shape[:-2] + (n, n, n - 1, n - 1))
    for i in range(n):
        ri = idx[idx != i]
        for j in range(n):
            cj = idx[idx != j]
            minors[..., i, j, :, :] = X[..., ri[:, None], cj[None, :]]
    signs = (-1.0) ** (idx[:, None] + idx[None, :])
    return signs * determinant(minors)


def svd(M):
    """Thin wrapper returning ``(U, sigma, V)`` with ``M = U diag(sigma) Vᵀ``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ContractError("matrix has non-finite entries")
    U, s, Vt = np.linalg.svd(M)
    return U, s, Vt.T


def default_delta(sigma):
    return 1e-8 * (float(sigma[0]) if len(sigma) else 0.0)


def _canonical_sign(v):
    nz = np.flatnonzero(np.abs(v) > 1e-14)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def left_null_vector(M, delta=None):
    """Unit ``v`` with ``vᵀM ≈ 0`` for a corank-1 square matrix."""
    M = _square(M)
    U, s, _ = svd(M)
    if delta is None:
        delta = default_delta(s)
    if s[-1] > delta:
        raise NotSingularError(f"smallest singular value {s[-1]:.3e} exceeds delta {delta:.3e}")
    if len(s) > 1 and s[-2] <= delta:
        raise NonRegularPointError("corank >= 2: non-regular point")
    return _canonical_sign(U[:, -1].copy())


@lru_cache(maxsize=None)
def _permutation_table(m):
    perms = np.array(list(permutations(range(m))), dtype=np.intp)
    # parity from the number of inversions
    inv = np.zeros(len(perms), dtype=np.intp)
    for i in range(m):
        for j in range(i + 1, m):
            inv += perms[:, i] > perms[:, j]
    signs = np.where(inv % 2 == 0, 1.0, -1.0)
    return perms, signs


def pfaffian_combinatorial(A):
    """Pfaffian as the normalized signed sum over all permutations of 2n indices."""
    A = _require_skew(A)
    _require_even(A)
    m = A.shape[0]
    if m > MAX_COMBINATORIAL:
        raise DimensionError(f"combinatorial Pfaffian limited to size <= {MAX_COMBINATORIAL}")
    if m == 0:
        return 1.0
    n = m // 2
    perms, signs = _permutation_table(m)
    prod = np.ones(len(perms))
    for i in range(n):
        prod *= A[perms[:, 2 * i], perms[:, 2 * i + 1]]
    return float(np.dot(signs, prod) / (2**n * factorial(n)))


@lru_cache(maxsize=None)
def perfect_matchings(m):
    """Signed perfect matchings of ``range(m)`` as ``(sign, ((i, j), ...))`` with i < j.

    Collapsing the 2^n n! redundant permutations of the full sum leaves one
    term per matching; the expansion is used for differentiable Pfaffians.
    """

    def rec(items):
        if not items:
            yield 1, ()
            return
        first, rest = items[0], items[1:]
        for pos, other in enumerate(rest):
            # moving `other` next to `first` crosses `pos` elements
            sign = -1 if pos % 2 else 1
            remaining = rest[:pos] + rest[pos + 1 :]
            for s, tail in rec(remaining):
                yield sign * s, ((first, other),) + tail

    return tuple(rec(tuple(range(m))))


def pfaffian_fast(A):
    """Pfaffian by skew tridiagonalization with partial pivoting (Parlett-Reid)."""
    A = _require_skew(A).copy()
    _require_even(A)
    m = A.shape[0]
    pf = 1.0
    for k in range(0, m - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1 :, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        pivot = A[k, k + 1]
        if pivot == 0.0:
            return 0.0
        pf *= pivot
        if k + 2 < m:
            tau = A[k, k + 2 :] / pivot
            col = A[k + 2 :, k + 1]
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


pfaffian = pfaffian_fast


def canonical_block_matrix(lambdas):
    """Block-diagonal skew matrix with 2x2 blocks [[0, l], [-l, 0]]."""
    lambdas = np.asarray(lambdas, dtype=float)
    m = 2 * len(lambdas)
    L = np.zeros((m, m))
    for i, lam in enumerate(lambdas):
        L[2 * i, 2 * i + 1] = lam
        L[2 * i + 1, 2 * i] = -lam
    return L


@dataclass(frozen=True)
class SkewCanonicalForm:
    """``X = Q Λ Qᵀ`` with Λ = canonical_block_matrix(lambdas)."""

    Q: np.ndarray
    lambdas: np.ndarray

    @property
    def Lambda(self):
        return canonical_block_matrix(self.lambdas)

    def reconstruct(self):
        return self.Q @ self.Lambda @ self.Q.T


def skew_canonical_form(X):
    """Orthogonal block diagonalization of a skew-symmetric matrix.

    Uses the real Schur form (block diagonal for normal matrices). Blocks are
    ordered by decreasing ``|λ|`` and each λ made nonnegative by swapping the
    corresponding pair of columns of Q; zero eigenvalues are paired into
    trailing zero blocks.
    """
    X = _require_skew(X)
    _require_even(X)
    m = X.shape[0]
    if not np.any(X):
        return SkewCanonicalForm(np.eye(m), np.zeros(m // 2))
    T, Z = scipy.linalg.schur(X, output="real")
    pairs, lams, singles = [], [], []
    i = 0
    while i < m:
        if i + 1 < m and T[i + 1, i] != 0.0:
            lam = 0.5 * (T[i, i + 1] - T[i + 1, i])
            if lam >= 0:
                pairs.append((i, i + 1))
            else:
                pairs.append((i + 1, i))
            lams.append(abs(lam))
            i += 2
        else:
            singles.append(i)
            i += 1
    for a, b in zip(singles[0::2], singles[1::2]):
        pairs.append((a, b))
        lams.append(0.0)
    order = sorted(range(len(lams)), key=lambda t: -lams[t])
    cols = [c for t in order for c in pairs[t]]
    Q = Z[:, cols]
    return SkewCanonicalForm(Q, np.array([lams[t] for t in order]))


def householder_reflection(v):
    """``I - 2vvᵀ``: the reflection negating unit ``v`` and fixing its complement."""
    v = np.asarray(v, dtype=float).ravel()
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ContractError("householder_reflection needs a unit vector")
    return np.eye(v.size) - 2.0 * np.outer(v, v)


def _plane_rotation(u, v):
    # rotation in span{u, v} taking u to v; requires u not close to -v
    c = float(u @ v)
    if c >= 0.0:
        K = np.outer(v, u) - np.outer(u, v)
        return np.eye(u.size) + K + (K @ K) / (1.0 + c)
    # H_{u+v} H_u: orthogonal to rounding however small 1 + c gets
    w = u + v
    w = w / np.linalg.norm(w)
    return householder_reflection(w) @ householder_reflection(u)


def rotation_taking(u, v):
    """Rotation R in SO(k) with ``Ru = v`` acting as the identity off span{u, v}.

    Near-antipodal pairs go through an intermediate coordinate vector.
    """
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.shape != v.shape:
        raise DimensionError("rotation_taking needs vectors of equal length")
    for w in (u, v):
        if abs(np.linalg.norm(w) - 1.0) > UNIT_TOL:
            raise ContractError("rotation_taking needs unit vectors")
    if 1.0 + float(u @ v) >= 1e-6:
        return _plane_rotation(u, v)
    if u.size == 1:
        raise ContractError("no rotation of R^1 maps u to -u")
    # lowest-index coordinate vector not (nearly) parallel to u
    i = int(np.flatnonzero(np.abs(u) < 0.9)[0])
    e = np.zeros_like(u)
    e[i] = 1.0
    return _plane_rotation(e, v) @ _plane_rotation(u, e)


def orthonormal_complement(vectors, dim):
    """Orthonormal basis of the complement of span(vectors) in R^dim."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float)).reshape(-1, dim).T
    Qf, _ = np.linalg.qr(V, mode="complete")
    r = np.linalg.matrix_rank(V)
    return Qf[:, r:]
