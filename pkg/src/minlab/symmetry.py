"""Ambient isometries and the helicoidal test.

A hypersurface Σ splitting the ambient space into two sides is helicoidal
at p when some isometry fixes p, maps Σ to itself and exchanges the sides.
This module checks that definition on samples and builds the explicit
isometries for generalized Clifford tori, the determinant cone and the
Pfaffian cone.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.linalg

from . import implicit, matlib, parametric
from .errors import ContractError, MinlabError, NonRegularPointError

ORTHO_TOL = 1e-10
FIX_TOL = 1e-10


@dataclass(frozen=True)
class AmbientIsometry:
    """Linear orthogonal map of R^N (hence also of S^{N-1})."""

    matrix: np.ndarray
    parity: int
    name: str = ""
    # the matrix-space operator (A or B) an induced map came from, if any
    factor: Optional[np.ndarray] = None

    def __post_init__(self):
        M = self.matrix
        err = np.max(np.abs(M.T @ M - np.eye(M.shape[0])))
        if err > ORTHO_TOL:
            raise ContractError(f"isometry matrix not orthogonal (error {err:.2e})")
        if self.parity != (1 if np.linalg.det(M) > 0 else -1):
            raise ContractError("stored parity disagrees with the determinant sign")

    @classmethod
    def from_matrix(cls, M, name="", factor=None):
        M = np.asarray(M, dtype=float)
        parity = 1 if matlib.determinant(M) > 0 else -1
        return cls(M, parity, name, factor)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float)

    def inverse(self):
        return AmbientIsometry(self.matrix.T.copy(), self.parity, f"{self.name}^-1")

    def then(self, other):
        """``other ∘ self``."""
        return AmbientIsometry(other.matrix @ self.matrix, self.parity * other.parity)

    def conjugated_by(self, eta):
        """η⁻¹ ∘ self ∘ η."""
        M = eta.matrix.T @ self.matrix @ eta.matrix
        return AmbientIsometry(M, self.parity, f"conj({self.name})")


def identity_isometry(N):
    return AmbientIsometry(np.eye(N), 1, "id")


@dataclass(frozen=True)
class SurfaceHandle:
    membership: Callable  # x -> distance-like, 0 on the surface
    side: Callable  # x -> +1 / -1, which of the two domains
    on_tol: float
    sample_on: Callable  # rng -> point of the surface
    sample_ambient: Callable  # rng -> proposal for an off-surface point
    name: str = ""


@dataclass(frozen=True)
class HelicoidalReport:
    fixes_point: bool
    fixed_distance: float
    preserves_surface: float
    swaps_sides: float
    n_on: int
    n_off: int

    @property
    def verdict(self):
        return self.fixes_point and self.preserves_surface == 1.0 and self.swaps_sides == 1.0


def helicoidal_check(handle, iso, p, n_samples, rng):
    """Evaluate the three helicoidal conditions for ``iso`` at ``p`` on samples."""
    p = np.asarray(p, dtype=float)
    if handle.membership(p) > handle.on_tol:
        raise ContractError("base point is not on the surface")
    dist = float(np.linalg.norm(iso(p) - p))

    kept = 0
    for _ in range(n_samples):
        x = handle.sample_on(rng)
        kept += handle.membership(iso(x)) <= handle.on_tol

    swapped = 0
    drawn = 0
    while drawn < n_samples:
        x = handle.sample_ambient(rng)
        if handle.membership(x) <= 10 * handle.on_tol:
            continue
        drawn += 1
        swapped += handle.side(iso(x)) == -handle.side(x)

    return HelicoidalReport(
        dist <= FIX_TOL,
        dist,
        kept / n_samples if n_samples else 1.0,
        swapped / n_samples if n_samples else 1.0,
        n_samples,
        n_samples,
    )


# --- surface handles ------------------------------------------------------


def _unit_gaussian(N):
    def draw(rng):
        x = rng.standard_normal(N)
        return x / np.linalg.norm(x)

    return draw


def torus_handle(p, q=None, r1=None, on_tol=1e-10):
    """S^p(r₁) × S^q(r₂) ⊂ S^{p+q+1}, with r₂ = √(1 − r₁²).

    Defaults to the generalized Clifford radii √(p/(p+q)), √(q/(p+q)). Off-surface
    proposals are uniform on the ambient sphere.
    """
    q = p if q is None else q
    if r1 is None:
        imm = parametric.generalized_clifford(p, q)
        r1 = float(np.sqrt(p / (p + q)))
    elif p == q == 1:
        imm = parametric.torus_with_radii(r1)
    else:
        raise ContractError("custom radii are only charted for p = q = 1")
    r2 = float(np.sqrt(1.0 - r1 * r1))
    cut = p + 1

    def membership(x):
        x = np.asarray(x, dtype=float)
        na, nb = np.linalg.norm(x[:cut]), np.linalg.norm(x[cut:])
        return float(np.hypot(na - r1, nb - r2))

    def side(x):
        x = np.asarray(x, dtype=float)
        return float(np.sign(np.linalg.norm(x[:cut]) * r2 - np.linalg.norm(x[cut:]) * r1))

    return SurfaceHandle(
        membership,
        side,
        on_tol,
        lambda rng: imm(imm.sample(rng)),
        _unit_gaussian(p + q + 2),
        imm.name,
    )


def det_handle(n, on_tol=1e-10):
    def membership(x):
        return abs(matlib.determinant(np.asarray(x, dtype=float).reshape(n, n)))

    def side(x):
        return float(np.sign(matlib.determinant(np.asarray(x, dtype=float).reshape(n, n))))

    return SurfaceHandle(
        membership,
        side,
        on_tol,
        lambda rng: implicit.sample_det_variety(n, rng).x,
        lambda rng: rng.standard_normal(n * n),
        f"det{n}",
    )


def pf_handle(n, on_tol=1e-10):
    poly = implicit.pfaffian_polynomial(n)

    def membership(x):
        return abs(float(poly(np.asarray(x, dtype=float))))

    def side(x):
        return float(np.sign(poly(np.asarray(x, dtype=float))))

    return SurfaceHandle(
        membership,
        side,
        on_tol,
        lambda rng: implicit.sample_pf_variety(n, rng).x,
        lambda rng: rng.standard_normal(implicit.skew_dim(n)),
        f"pf{2 * n}",
    )


# --- Clifford torus -------------------------------------------------------


def xi_swap(p_dim):
    """Block swap (x₁..x_{p+1}, x_{p+2}..x_{2p+2}) -> (x_{p+2}..x_{2p+2}, x₁..x_{p+1})."""
    if p_dim < 1:
        raise ContractError("p must be >= 1")
    b = p_dim + 1
    M = np.zeros((2 * b, 2 * b))
    M[:b, b:] = np.eye(b)
    M[b:, :b] = np.eye(b)
    return AmbientIsometry.from_matrix(M, f"xi{p_dim}")


def _blocks(q):
    q = np.asarray(q, dtype=float)
    if q.size % 2:
        raise ContractError("point dimension must be even")
    b = q.size // 2
    return q[:b], q[b:]


def eta_conjugator(q):
    """Block rotation η = diag(I, R) with η(q) = (a, a), where q = (a, b)."""
    a, b = _blocks(q)
    r = 1.0 / np.sqrt(2.0)
    if max(abs(np.linalg.norm(a) - r), abs(np.linalg.norm(b) - r)) > 1e-10:
        raise ContractError("point is not on S^p(1/sqrt2) x S^p(1/sqrt2)")
    R = matlib.rotation_taking(b / np.linalg.norm(b), a / np.linalg.norm(a))
    M = scipy.linalg.block_diag(np.eye(a.size), R)
    return AmbientIsometry.from_matrix(M, "eta")


def clifford_helicoidal_at(q):
    """η⁻¹ ∘ ξ ∘ η: fixes q, preserves the torus, swaps its two sides."""
    q = np.asarray(q, dtype=float)
    xi = xi_swap(q.size // 2 - 1)
    return xi.conjugated_by(eta_conjugator(q))


def torus_candidate_isometries(q):
    """Natural candidate isometries at a point q = (a, b) of a product of spheres.

    Identity, the aligned block swap, and the reflection of each block across
    the line through its component. Used to show non-minimal tori admit none.
    """
    a, b = _blocks(q)
    N = q.size
    out = [identity_isometry(N)]
    R = matlib.rotation_taking(b / np.linalg.norm(b), a / np.linalg.norm(a))
    eta = AmbientIsometry.from_matrix(scipy.linalg.block_diag(np.eye(a.size), R))
    out.append(xi_swap(a.size - 1).conjugated_by(eta))

    def line_reflection(c):
        c = c / np.linalg.norm(c)
        return 2.0 * np.outer(c, c) - np.eye(c.size)

    out.append(
        AmbientIsometry.from_matrix(
            scipy.linalg.block_diag(line_reflection(a), line_reflection(b)), "line-reflect"
        )
    )
    return out


# --- determinant cone -----------------------------------------------------


def left_multiplication(A):
    """Y -> AY on row-major flattened n x n matrices."""
    A = np.asarray(A, dtype=float)
    return np.kron(A, np.eye(A.shape[0]))


def det_helicoidal_at(X):
    """Reflection A across the column space of a corank-1 X, acting by Y -> AY."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        n = int(round(np.sqrt(X.size)))
        X = X.reshape(n, n)
    v = matlib.left_null_vector(X)
    A = matlib.householder_reflection(v)
    return AmbientIsometry.from_matrix(left_multiplication(A), "phi_A", factor=A)


# --- Pfaffian cone --------------------------------------------------------


def conjugation_map(B):
    """Matrix of Y -> BᵀYB on the upper-triangle coordinates of skew Y."""
    B = np.asarray(B, dtype=float)
    m = B.shape[0]
    L = m * (m - 1) // 2
    iu = np.triu_indices(m, 1)
    cols = np.empty((L, L))
    for j in range(L):
        e = np.zeros(L)
        e[j] = 1.0
        Y = implicit.skew_from_coords(e)
        cols[:, j] = (B.T @ Y @ B)[iu]
    return cols


def _as_skew(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        return implicit.skew_from_coords(X)
    return X


def _kernel_pair(X):
    _, s, V = matlib.svd(X)
    delta = matlib.default_delta(s)
    if s[-1] > delta or s[-2] > delta or (len(s) > 2 and s[-3] <= delta):
        raise NonRegularPointError("kernel of the skew matrix is not 2-dimensional")
    return V[:, -2], V[:, -1]


def kernel_swap(X):
    """B = I − uuᵀ − wwᵀ + uwᵀ + wuᵀ for an orthonormal kernel basis {u, w}."""
    u, w = _kernel_pair(_as_skew(X))
    m = u.size
    return np.eye(m) - np.outer(u, u) - np.outer(w, w) + np.outer(u, w) + np.outer(w, u)


def canonical_swap(X):
    """B = QJQᵀ where QᵀXQ = Λ has its zero block last and J swaps the last two axes."""
    X = _as_skew(X)
    _kernel_pair(X)
    cf = matlib.skew_canonical_form(X)
    m = X.shape[0]
    Jm = np.eye(m)
    Jm[[m - 2, m - 1]] = Jm[[m - 1, m - 2]]
    return cf.Q @ Jm @ cf.Q.T


def pf_helicoidal_at(X, construction="kernel"):
    """Y -> BᵀYB with B a reflection fixing X and of determinant −1.

    ``X`` is a skew matrix or its coordinate vector; the returned map acts on
    coordinates.
    """
    B = kernel_swap(X) if construction == "kernel" else canonical_swap(X)
    return AmbientIsometry.from_matrix(conjugation_map(B), f"psi_B[{construction}]", factor=B)


# --- helicoidal => minimal cross-check ------------------------------------


@dataclass
class CrosscheckEntry:
    helicoidal: bool
    residual: float
    error: str = ""


@dataclass
class CrosscheckReport:
    tol: float
    entries: List[CrosscheckEntry] = field(default_factory=list)

    @property
    def n_helicoidal(self):
        return sum(e.helicoidal for e in self.entries)

    @property
    def failures(self):
        """Points that verified helicoidal yet carry a residual above tolerance."""
        return sum(e.helicoidal and not e.residual <= self.tol for e in self.entries)

    @property
    def max_residual(self):
        return max((e.residual for e in self.entries), default=0.0)


def theorem2_crosscheck(points, handle, construct, residual, tol, rng, n_samples=20):
    """Pair the helicoidal verdict with the minimality residual at each point.

    ``points`` yields ``(p, token)``; ``construct(p)`` builds the candidate
    isometry and ``residual(token)`` evaluates the curvature engine.
    """
    report = CrosscheckReport(tol)
    for p, token in points:
        try:
            iso = construct(p)
            ok = helicoidal_check(handle, iso, p, n_samples, rng).verdict
            err = ""
        except MinlabError as exc:
            ok, err = False, f"{type(exc).__name__}: {exc}"
        report.entries.append(CrosscheckEntry(ok, float(residual(token)), err))
    return report
