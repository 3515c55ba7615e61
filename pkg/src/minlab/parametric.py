"""Immersion engine: jets, induced metric, Laplace-Beltrami and mean curvature.

An :class:`Immersion` wraps a chart ``phi -> m(phi)`` written with the
dispatching helpers of :mod:`minlab.jets`, so the same function yields exact
second-order jets (``mode="ad"``) or plain values for finite differencing
(``mode="fd"``).
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg
from scipy.optimize import least_squares

from . import jets as J
from .errors import ContractError, NotImmersionError

GRAM_TOL = 1e-12
METRIC_STEP = 1e-5
# second differences of values need a wider step than first differences
FD_STEP_FIRST = 1e-5
FD_STEP_SECOND = 1e-4
POLE_MARGIN = 0.1

DEFAULT_TOL = {"ad": 1e-6, "fd": 1e-4}


@dataclass(frozen=True)
class Immersion:
    chart: Callable
    chart_dim: int
    ambient_dim: int
    sphere_radius: Optional[float]
    domain: np.ndarray  # (chart_dim, 2) sampling box
    name: str = ""

    def __call__(self, phi):
        return np.asarray(self.chart(np.asarray(phi, dtype=float)), dtype=float)

    def jets(self, phi, mode="ad"):
        """Return ``(m, dm, d2m)`` with shapes (N,), (N, k), (N, k, k)."""
        phi = np.asarray(phi, dtype=float)
        if mode == "ad":
            return J.jet_of(self.chart, phi)
        if mode == "fd":
            return fd_jets(self, phi)
        raise ValueError(f"unknown derivative mode {mode!r}")

    def sample(self, rng, size=None):
        lo, hi = self.domain[:, 0], self.domain[:, 1]
        shape = (self.chart_dim,) if size is None else (size, self.chart_dim)
        return lo + (hi - lo) * rng.random(shape)


def fd_jets(imm, phi, h1=FD_STEP_FIRST, h2=FD_STEP_SECOND):
    """Value, first and second partials by central differences of the chart."""
    k = imm.chart_dim
    m = imm(phi)
    E = np.eye(k)
    dm = np.empty((m.size, k))
    for a in range(k):
        dm[:, a] = (imm(phi + h1 * E[a]) - imm(phi - h1 * E[a])) / (2 * h1)
    d2m = np.empty((m.size, k, k))
    for a in range(k):
        d2m[:, a, a] = (imm(phi + h2 * E[a]) - 2 * m + imm(phi - h2 * E[a])) / h2**2
        for b in range(a + 1, k):
            ea, eb = h2 * E[a], h2 * E[b]
            mixed = (
                imm(phi + ea + eb) - imm(phi + ea - eb) - imm(phi - ea + eb) + imm(phi - ea - eb)
            ) / (4 * h2**2)
            d2m[:, a, b] = d2m[:, b, a] = mixed
    return m, dm, d2m


@dataclass(frozen=True)
class MetricJet:
    g: np.ndarray
    g_inv: np.ndarray
    det_g: float


def _metric_from_tangents(dm):
    g = dm.T @ dm
    det_g = float(np.linalg.det(g))
    if not det_g > GRAM_TOL:
        raise NotImmersionError(f"degenerate Gram matrix (det={det_g:.3e})")
    return MetricJet(g, np.linalg.inv(g), det_g)


def metric_at(imm, phi, mode="ad"):
    _, dm, _ = imm.jets(phi, mode)
    return _metric_from_tangents(dm)


def _tangents(imm, phi, mode):
    if mode == "ad":
        return imm.jets(phi, "ad")[1]
    return fd_jets(imm, phi)[1]


def _density_inverse_metric(imm, phi, mode):
    met = _metric_from_tangents(_tangents(imm, phi, mode))
    return np.sqrt(met.det_g) * met.g_inv


def laplace_beltrami_at(imm, phi, mode="ad", h=METRIC_STEP):
    """Δm = (1/√g) ∂_a(√g g^{ab} ∂_b m), applied to each coordinate function.

    The second partials come from the chart jets; the divergence of √g g^{ab}
    is taken by central differences of the (jet-exact) metric.
    """
    phi = np.asarray(phi, dtype=float)
    m, dm, d2m = imm.jets(phi, mode)
    met = _metric_from_tangents(dm)
    k = imm.chart_dim
    div = np.zeros(k)
    for a in range(k):
        step = np.zeros(k)
        step[a] = h
        Wp = _density_inverse_metric(imm, phi + step, mode)
        Wm = _density_inverse_metric(imm, phi - step, mode)
        div += (Wp[a] - Wm[a]) / (2 * h)
    div /= np.sqrt(met.det_g)
    return np.einsum("ab,nab->n", met.g_inv, d2m) + dm @ div


def laplace_beltrami_christoffel(imm, phi):
    """Same operator from exact jets: Δm = g^{ab}(∂_ab m − Γ^c_ab ∂_c m).

    Independent of the divergence-form route above; used to cross-check it.
    """
    m, dm, d2m = imm.jets(phi, "ad")
    met = _metric_from_tangents(dm)
    # ∂_c g_ab = ∂_ca m · ∂_b m + ∂_a m · ∂_cb m
    dg = np.einsum("nca,nb->cab", d2m, dm) + np.einsum("na,ncb->cab", dm, d2m)
    # Γ_{ab}^c = ½ g^{cd} (∂_a g_db + ∂_b g_da − ∂_d g_ab)
    lower = 0.5 * (np.einsum("adb->dab", dg) + np.einsum("bda->dab", dg) - dg)
    gamma = np.einsum("cd,dab->cab", met.g_inv, lower)
    hess = d2m - np.einsum("cab,nc->nab", gamma, dm)
    return np.einsum("ab,nab->n", met.g_inv, hess)


def _project_out(v, basis):
    Q, _ = np.linalg.qr(basis)
    for _ in range(2):
        v = v - Q @ (Q.T @ v)
    return v


def mean_curvature_sphere_at(imm, phi, mode="ad"):
    """Mean curvature vector (trace convention) of the immersion inside its sphere.

    ``g^{ab} ∂_ab m`` projected off the tangent space and the position vector.
    """
    if imm.sphere_radius is None:
        raise ContractError("immersion has no ambient sphere; use mean_curvature_euclidean_at")
    m, dm, d2m = imm.jets(phi, mode)
    met = _metric_from_tangents(dm)
    v = np.einsum("ab,nab->n", met.g_inv, d2m)
    return _project_out(v, np.column_stack([dm, m]))


def mean_curvature_euclidean_at(imm, phi, mode="ad"):
    m, dm, d2m = imm.jets(phi, mode)
    met = _metric_from_tangents(dm)
    return _project_out(np.einsum("ab,nab->n", met.g_inv, d2m), dm)


def sphere_minimality_residual(imm, phi, mode="ad"):
    """‖Δm + k m‖; zero exactly when the immersion is minimal in the unit sphere."""
    if imm.sphere_radius is None or abs(imm.sphere_radius - 1.0) > 1e-12:
        raise ContractError("sphere_minimality_residual needs an immersion into the unit sphere")
    lap = laplace_beltrami_at(imm, phi, mode)
    return float(np.linalg.norm(lap + imm.chart_dim * imm(phi)))


# --- constructions --------------------------------------------------------


def _hyperspherical(theta):
    """Angular chart of the unit k-sphere, k = len(theta)."""
    k = len(theta)
    coords = []
    s = 1.0
    for i in range(k):
        coords.append(s * J.cos(theta[i]))
        s = s * J.sin(theta[i])
    coords.append(s)
    return J.stack(coords)


def _sphere_domain(k):
    box = [(POLE_MARGIN, np.pi - POLE_MARGIN)] * (k - 1) + [(0.0, 2 * np.pi)]
    return np.array(box, dtype=float)


def great_sphere(k):
    """Standard angular chart of the unit S^k ⊂ R^{k+1} (totally geodesic)."""
    if k < 1:
        raise ContractError("sphere dimension must be >= 1")
    return Immersion(_hyperspherical, k, k + 1, 1.0, _sphere_domain(k), f"S^{k}")


def torus_with_radii(r):
    """S¹(r) × S¹(√(1−r²)) ⊂ S³."""
    if not 0.0 < r < 1.0:
        raise ContractError("torus radius must lie in (0, 1)")
    s = float(np.sqrt(1.0 - r * r))

    def chart(phi):
        return J.stack([r * J.cos(phi[0]), r * J.sin(phi[0]), s * J.cos(phi[1]), s * J.sin(phi[1])])

    box = np.array([(0.0, 2 * np.pi)] * 2)
    return Immersion(chart, 2, 4, 1.0, box, f"S1({r:g})xS1({s:g})")


def small_sphere(r=0.6):
    """S²(r) at height √(1−r²) inside S³; minimal only for r = 1."""
    if not 0.0 < r <= 1.0:
        raise ContractError("radius must lie in (0, 1]")
    height = float(np.sqrt(1.0 - r * r))

    def chart(phi):
        th, ph = phi[0], phi[1]
        st = J.sin(th)
        return J.stack([r * st * J.cos(ph), r * st * J.sin(ph), r * J.cos(th), height])

    return Immersion(chart, 2, 4, 1.0, _sphere_domain(2), f"S2({r:g})")


def scaled_product(imm1, imm2):
    """(√(n₁/(n₁+n₂)) m₁, √(n₂/(n₁+n₂)) m₂) on the product chart."""
    for imm in (imm1, imm2):
        if imm.sphere_radius is None or abs(imm.sphere_radius - 1.0) > 1e-12:
            raise ContractError("scaled_product factors must lie in unit spheres")
    n1, n2 = imm1.chart_dim, imm2.chart_dim
    a = float(np.sqrt(n1 / (n1 + n2)))
    b = float(np.sqrt(n2 / (n1 + n2)))

    def chart(phi):
        return J.concatenate([a * imm1.chart(phi[:n1]), b * imm2.chart(phi[n1:])])

    return Immersion(
        chart,
        n1 + n2,
        imm1.ambient_dim + imm2.ambient_dim,
        1.0,
        np.vstack([imm1.domain, imm2.domain]),
        f"{imm1.name}x{imm2.name}",
    )


def generalized_clifford(p, q):
    """S^p(√(p/(p+q))) × S^q(√(q/(p+q))) ⊂ S^{p+q+1}, charted directly."""
    if p < 1 or q < 1:
        raise ContractError("factor dimensions must be >= 1")
    ra = float(np.sqrt(p / (p + q)))
    rb = float(np.sqrt(q / (p + q)))

    def chart(phi):
        return J.concatenate([ra * _hyperspherical(phi[:p]), rb * _hyperspherical(phi[p:])])

    box = np.vstack([_sphere_domain(p), _sphere_domain(q)])
    return Immersion(chart, p + q, p + q + 2, 1.0, box, f"Clifford({p},{q})")


def clifford_torus():
    return generalized_clifford(1, 1)


def block_metric_defect(imm1, imm2, phi, mode="ad"):
    """Max entrywise gap between the product metric and the scaled factor blocks."""
    n1, n2 = imm1.chart_dim, imm2.chart_dim
    phi = np.asarray(phi, dtype=float)
    g = metric_at(scaled_product(imm1, imm2), phi, mode).g
    g1 = metric_at(imm1, phi[:n1], mode).g
    g2 = metric_at(imm2, phi[n1:], mode).g
    expected = scipy.linalg.block_diag(n1 / (n1 + n2) * g1, n2 / (n1 + n2) * g2)
    return float(np.max(np.abs(g - expected)) / np.max(np.abs(expected)))


def det_law_defect(imm1, imm2, phi, mode="ad"):
    """Relative gap in det ĝ = n₁^{n₁} n₂^{n₂} / (n₁+n₂)^{n₁+n₂} · det g · det g′."""
    n1, n2 = imm1.chart_dim, imm2.chart_dim
    phi = np.asarray(phi, dtype=float)
    det_hat = metric_at(scaled_product(imm1, imm2), phi, mode).det_g
    pred = (
        n1**n1
        * n2**n2
        / (n1 + n2) ** (n1 + n2)
        * metric_at(imm1, phi[:n1], mode).det_g
        * metric_at(imm2, phi[n1:], mode).det_g
    )
    return abs(det_hat - pred) / abs(pred)


def chart_distance(imm, x, rng, starts=6):
    """Distance from ``x`` to the image of ``imm`` by multi-start least squares."""
    x = np.asarray(x, dtype=float)

    def fun(phi):
        return imm(phi) - x

    def jac(phi):
        return imm.jets(phi, "ad")[1]

    best = np.inf
    for _ in range(starts):
        sol = least_squares(fun, imm.sample(rng), jac=jac, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        best = min(best, float(np.linalg.norm(sol.fun)))
        if best < 1e-13:
            break
    return best


def check_immersion(imm, phi, mode="ad"):
    """Invariant diagnostics at one chart point."""
    m, dm, d2m = imm.jets(phi, mode)
    out = {
        "hessian_asymmetry": float(np.max(np.abs(d2m - np.swapaxes(d2m, 1, 2)))),
        "gram_det": float(np.linalg.det(dm.T @ dm)),
    }
    if imm.sphere_radius is not None:
        out["radius_error"] = abs(float(np.linalg.norm(m)) - imm.sphere_radius)
    return out


def jet_fd_discrepancy(imm, phi, h=1e-5):
    """Relative mismatch of AD jets against central differences (step ``h``).

    First partials are differenced from values, second partials from the AD
    first partials.
    """
    phi = np.asarray(phi, dtype=float)
    _, dm, d2m = imm.jets(phi, "ad")
    k = imm.chart_dim
    dm_fd = np.empty_like(dm)
    d2m_fd = np.empty_like(d2m)
    for a in range(k):
        e = np.zeros(k)
        e[a] = h
        dm_fd[:, a] = (imm(phi + e) - imm(phi - e)) / (2 * h)
        d2m_fd[:, :, a] = (imm.jets(phi + e)[1] - imm.jets(phi - e)[1]) / (2 * h)
    rel1 = np.linalg.norm(dm_fd - dm) / max(np.linalg.norm(dm), 1e-300)
    rel2 = np.linalg.norm(d2m_fd - d2m) / max(np.linalg.norm(d2m), 1e-300)
    return float(rel1), float(rel2)
