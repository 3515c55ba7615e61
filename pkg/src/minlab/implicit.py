"""Level-set engine for hypersurfaces {f = 0}.

Matrix varieties live in flattened coordinates: an n x n matrix is the
row-major vector in R^{n²}; a 2n x 2n skew matrix is the vector of its strict
upper triangle, read row by row (x₁ = a₁₂, x₂ = a₁₃, ...).
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import matlib
from .errors import DimensionError, SamplingError, SingularPointError
from .jets import jet_of

GRAD_FLOOR = 1e-6
REGULARITY_GAP = 1e-3
MAX_TRIES = 100
# Frobenius-isometric scale of the skew-matrix coordinates (x -> entries x/√2)
MU_SCALE = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class ScalarField:
    ambient_dim: int
    value: Callable
    gradient: Callable
    hessian: Callable
    degree: Optional[int] = None
    name: str = ""

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class VarietyPoint:
    x: np.ndarray
    regularity: float
    attempts: int = 1


def _coords(x):
    return np.asarray(x.x if isinstance(x, VarietyPoint) else x, dtype=float)


def level_residual(field, x):
    """|Δf‖∇f‖² − ∇fᵀ(Hess f)∇f| / ‖∇f‖³, the mean curvature of the level set through x."""
    x = _coords(x)
    g = field.gradient(x)
    ng = float(np.linalg.norm(g))
    if ng < GRAD_FLOOR:
        raise SingularPointError(f"gradient norm {ng:.3e} below {GRAD_FLOOR:g}")
    H = field.hessian(x)
    return abs(np.trace(H) * ng * ng - g @ H @ g) / ng**3


# --- finite-difference helpers -------------------------------------------


def fd_gradient(value, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (value(xp) - value(xm)) / (xp[i] - xm[i])
    return g


def fd_jacobian(func, x, h=1e-5, batched=None):
    """Central-difference Jacobian of a vector map; columns per coordinate.

    ``batched`` optionally evaluates a stack of points at once.
    """
    x = np.asarray(x, dtype=float)
    N = x.size
    P = np.repeat(x[None, :], 2 * N, axis=0)
    idx = np.arange(N)
    P[idx, idx] += h
    P[N + idx, idx] -= h
    # divide by the representable step so affine maps difference exactly
    denom = P[idx, idx] - P[N + idx, idx]
    F = batched(P) if batched is not None else np.array([func(p) for p in P])
    return ((F[:N] - F[N:]) / denom[:, None]).T


def fd_hessian(gradient, x, h=1e-5, batched=None):
    H = fd_jacobian(gradient, x, h, batched)
    return 0.5 * (H + H.T)


def field_fd_check(field, x, h=1e-5):
    """Relative gradient / Hessian mismatch against central differences, and Hessian asymmetry."""
    x = np.asarray(x, dtype=float)
    g = field.gradient(x)
    H = field.hessian(x)
    g_fd = fd_gradient(field.value, x, h)
    H_fd = fd_jacobian(field.gradient, x, h)
    return (
        float(np.linalg.norm(g - g_fd) / max(np.linalg.norm(g), 1e-300)),
        float(np.linalg.norm(H - H_fd) / max(np.linalg.norm(H), 1e-300)),
        float(np.max(np.abs(H - H.T))),
    )


def euler_defect(field, x):
    """Relative violation of x·∇f = d f for a homogeneous field."""
    x = np.asarray(x, dtype=float)
    lhs = float(x @ field.gradient(x))
    rhs = field.degree * float(field.value(x))
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


# --- determinant variety --------------------------------------------------


def det_variety(n, mode="ad"):
    """f(X) = det X on R^{n²}: a degree-n cone whose zero set is the singular matrices."""
    if n < 2:
        raise DimensionError("det_variety needs n >= 2")

    def value(x):
        return matlib.determinant(x.reshape(n, n))

    def cof_batch(P):
        return matlib.cofactor_matrix(P.reshape(-1, n, n)).reshape(len(P), n * n)

    if mode == "ad":

        def gradient(x):
            return matlib.cofactor_matrix(x.reshape(n, n)).ravel()

        def hessian(x):
            return fd_hessian(gradient, x, 1e-5, batched=cof_batch)

    elif mode == "fd":

        def gradient(x):
            return fd_gradient(value, x, 1e-5)

        def hessian(x):
            return fd_hessian(gradient, x, 1e-3)

    else:
        raise ValueError(f"unknown derivative mode {mode!r}")
    return ScalarField(n * n, value, gradient, hessian, n, f"det{n}")


def sample_det_variety(n, rng, max_tries=MAX_TRIES, seed=None):
    """Unit-norm corank-1 matrix: zero the smallest singular value of a Gaussian draw."""
    for attempt in range(1, max_tries + 1):
        U, s, V = matlib.svd(rng.standard_normal((n, n)))
        gap = s[n - 2] / s[0]
        if gap <= REGULARITY_GAP:
            continue
        s[-1] = 0.0
        X = (U * s) @ V.T
        X /= np.linalg.norm(X)
        return VarietyPoint(X.ravel(), float(gap), attempt)
    raise SamplingError(f"no regular det-variety sample in {max_tries} draws", seed)


# --- Pfaffian variety -----------------------------------------------------


def skew_dim(n):
    return 2 * n * n - n


def skew_order(length):
    """Recover n from the coordinate count 2n² − n."""
    n = int(round((1 + np.sqrt(1 + 8 * length)) / 4))
    if skew_dim(n) != length:
        raise DimensionError(f"{length} is not of the form 2n^2 - n")
    return n


def skew_from_coords(x, scale=1.0):
    x = np.asarray(x, dtype=float)
    m = 2 * skew_order(x.size)
    iu = np.triu_indices(m, 1)
    X = np.zeros((m, m))
    X[iu] = scale * x
    return X - X.T


def mu_embed(x):
    """Coordinates -> skew matrix, scaled so tr(XᵀY) equals the dot product."""
    return skew_from_coords(x, MU_SCALE)


def mu_inverse(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % 2:
        raise DimensionError(f"expected an even square matrix, got {X.shape}")
    return X[np.triu_indices(X.shape[0], 1)] / MU_SCALE


def _matching_index(n):
    m = 2 * n
    slot = {pair: k for k, pair in enumerate(zip(*np.triu_indices(m, 1)))}
    terms = matlib.perfect_matchings(m)
    idx = np.array([[slot[p] for p in pairs] for _, pairs in terms], dtype=np.intp)
    signs = np.array([s for s, _ in terms], dtype=float)
    return idx, signs


def pfaffian_polynomial(n):
    """pf of the skew matrix with entries x placed on the upper triangle.

    Written as the signed matching expansion so it can run on jets.
    """
    idx, signs = _matching_index(n)

    def f(x):
        acc = x[idx[:, 0]]
        for c in range(1, n):
            acc = acc * x[idx[:, c]]
        return (acc * signs).sum()

    return f


def pf_variety(n, mode="ad"):
    """f(x) = pf of the skew matrix with upper triangle x; degree n on R^{2n²−n}."""
    if n < 2:
        raise DimensionError("pf_variety needs n >= 2")
    if 2 * n > matlib.MAX_COMBINATORIAL:
        raise DimensionError("size unsupported for derivatives (2n > 8)")
    poly = pfaffian_polynomial(n)

    def value(x):
        return float(poly(np.asarray(x, dtype=float)))

    if mode == "ad":

        def gradient(x):
            return jet_of(poly, x)[1]

        def hessian(x):
            H = jet_of(poly, x)[2]
            return 0.5 * (H + H.T)

    elif mode == "fd":

        def gradient(x):
            return fd_gradient(value, x, 1e-5)

        def hessian(x):
            return fd_hessian(gradient, x, 1e-3)

    else:
        raise ValueError(f"unknown derivative mode {mode!r}")
    return ScalarField(skew_dim(n), value, gradient, hessian, n, f"pf{2 * n}")


def sample_pf_variety(n, rng, max_tries=MAX_TRIES, seed=None):
    """Unit-norm rank-(2n−2) skew matrix in μ-coordinates.

    Zeroes the smallest block of the canonical form of an antisymmetrized
    Gaussian draw.
    """
    if 2 * n > matlib.MAX_COMBINATORIAL:
        raise DimensionError("sample_pf_variety supports 2n <= 8")
    m = 2 * n
    for attempt in range(1, max_tries + 1):
        A = matlib.antisymmetrize(rng.standard_normal((m, m)))
        cf = matlib.skew_canonical_form(A)
        lam = cf.lambdas.copy()
        gap = lam[-2] / lam[0]
        if gap <= REGULARITY_GAP:
            continue
        lam[-1] = 0.0
        X = matlib.antisymmetrize(cf.Q @ matlib.canonical_block_matrix(lam) @ cf.Q.T)
        y = mu_inverse(X)
        return VarietyPoint(y / np.linalg.norm(y), float(gap), attempt)
    raise SamplingError(f"no regular Pfaffian-variety sample in {max_tries} draws", seed)


# --- auxiliary fields -----------------------------------------------------


def sphere_field(N):
    """‖x‖² − 1: the round sphere, used as a non-minimal control."""
    return ScalarField(
        N,
        lambda x: float(x @ x) - 1.0,
        lambda x: 2.0 * np.asarray(x, dtype=float),
        lambda x: 2.0 * np.eye(N),
        None,
        f"sphere{N}",
    )


def quadratic_field(S, name="quadratic"):
    S = np.asarray(S, dtype=float)
    S = 0.5 * (S + S.T)
    return ScalarField(
        S.shape[0],
        lambda x: float(x @ S @ x),
        lambda x: 2.0 * S @ x,
        lambda x: 2.0 * S,
        2,
        name,
    )


def quadratic_form_of(field, N):
    """Symmetric matrix of a degree-2 polynomial field, from its (constant) Hessian."""
    return 0.5 * field.hessian(np.zeros(N))


def congruence_witness(S, tol=1e-12):
    """Orthogonal W with xᵀSx at x = Wu equal to c(‖u₊‖² − ‖u₋‖²).

    Requires a neutral-signature form whose eigenvalues are ±c. Columns of W are
    the eigenvectors of S, positive eigenvalues first. A Clifford torus in the
    u-coordinates is carried onto the zero set of the form.
    """
    S = np.asarray(S, dtype=float)
    S = 0.5 * (S + S.T)
    w, V = np.linalg.eigh(S)
    N = w.size
    c = float(np.max(np.abs(w)))
    if N % 2 or not np.allclose(np.abs(w), c, rtol=0, atol=tol * max(c, 1.0)):
        raise DimensionError("form is not of neutral signature with eigenvalues +-c")
    pos, neg = np.flatnonzero(w > 0), np.flatnonzero(w < 0)
    if pos.size != neg.size:
        raise DimensionError("form is not of neutral signature")
    return V[:, np.concatenate([pos, neg])]


# u₁=(x₁+x₄)/√2, u₂=(x₂−x₃)/√2, u₃=(x₂+x₃)/√2, u₄=(x₁−x₄)/√2
CLIFFORD_DET2_MAP = np.array(
    [[1, 0, 0, 1], [0, 1, -1, 0], [0, 1, 1, 0], [1, 0, 0, -1]], dtype=float
) / np.sqrt(2.0)
