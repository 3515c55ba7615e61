"""Named verification scenarios and the deterministic runner behind the CLI.

Every random draw comes from a stream keyed by ``(seed, check label, sample
index)``, so results do not depend on evaluation order or worker count.
"""

import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import implicit, matlib, parametric, symmetry
from .errors import ConfigError, SamplingError
from .report import ResidualReport, SubCheck

MODES = ("ad", "fd")
INNER_SAMPLES = 20
SEED_LIMIT = 2**64


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    seed: int = 0
    samples: int = 500
    tol: Optional[float] = None
    mode: str = "ad"
    n: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    output_path: Optional[str] = None
    csv_path: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in CATALOG:
            raise ConfigError(f"unknown scenario: {self.scenario}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def effective_tol(self):
        return self.tol if self.tol is not None else parametric.DEFAULT_TOL[self.mode]


def stream_rng(seed, label, index):
    return np.random.default_rng([seed, zlib.crc32(label.encode()), index])


def _map(fn, count, workers):
    if workers <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def _column(rows, i):
    return [r[i] for r in rows]


# --- scenarios ------------------------------------------------------------

PRODUCT_FACTORS = {
    "S1xS1": lambda: (parametric.great_sphere(1), parametric.great_sphere(1)),
    "S1xS2": lambda: (parametric.great_sphere(1), parametric.great_sphere(2)),
    "S2xS3": lambda: (parametric.great_sphere(2), parametric.great_sphere(3)),
    "CliffordxS1": lambda: (parametric.clifford_torus(), parametric.great_sphere(1)),
}


def _product(cfg):
    tol, checks = cfg.effective_tol, []
    for label, factors in PRODUCT_FACTORS.items():
        f1, f2 = factors()
        imm = parametric.scaled_product(f1, f2)

        def one(i, imm=imm, f1=f1, f2=f2, label=label):
            phi = imm.sample(stream_rng(cfg.seed, f"product/{label}", i))
            return (
                parametric.sphere_minimality_residual(imm, phi, cfg.mode),
                parametric.block_metric_defect(f1, f2, phi, cfg.mode),
                parametric.det_law_defect(f1, f2, phi, cfg.mode),
            )

        rows = _map(one, cfg.samples, cfg.workers)
        checks += [
            SubCheck(f"{label}/residual", "upper", tol, _column(rows, 0), residual=True),
            SubCheck(f"{label}/block-metric", "upper", 1e-9, _column(rows, 1)),
            SubCheck(f"{label}/det-law", "upper", 1e-9, _column(rows, 2)),
        ]
    return checks


def _clifford_family(cfg, imm, label):
    tol = cfg.effective_tol

    def one(i):
        phi = imm.sample(stream_rng(cfg.seed, label, i))
        return (
            parametric.sphere_minimality_residual(imm, phi, cfg.mode),
            float(np.linalg.norm(parametric.mean_curvature_sphere_at(imm, phi, cfg.mode))),
        )

    rows = _map(one, cfg.samples, cfg.workers)
    return [
        SubCheck(f"{label}/residual", "upper", tol, _column(rows, 0), residual=True),
        SubCheck(f"{label}/mean-curvature", "upper", 10 * tol, _column(rows, 1)),
    ]


def _clifford(cfg):
    return _clifford_family(cfg, parametric.clifford_torus(), "clifford")


def _generalized_clifford(cfg):
    p, q = cfg.p or 2, cfg.q or 3
    return _clifford_family(cfg, parametric.generalized_clifford(p, q), f"clifford({p},{q})")


def _cone(cfg, field, sampler, label, fd_points=20):
    tol = cfg.effective_tol

    def one(i):
        pt = sampler(stream_rng(cfg.seed, label, i))
        return implicit.level_residual(field, pt), pt.attempts, abs(field(pt.x))

    rows = _map(one, cfg.samples, cfg.workers)
    acceptance = cfg.samples / sum(_column(rows, 1))

    def consistency(i):
        x = stream_rng(cfg.seed, f"{label}/field", i).standard_normal(field.ambient_dim)
        g_err, h_err, asym = implicit.field_fd_check(field, x)
        return g_err, h_err, asym, implicit.euler_defect(field, x)

    frows = _map(consistency, min(fd_points, cfg.samples), cfg.workers)
    return [
        SubCheck(f"{label}/residual", "upper", tol, _column(rows, 0), residual=True),
        SubCheck(f"{label}/on-variety", "upper", 1e-10, _column(rows, 2)),
        SubCheck(f"{label}/acceptance-rate", "lower", 0.99, [acceptance]),
        SubCheck(f"{label}/gradient-fd", "upper", 1e-5, _column(frows, 0)),
        SubCheck(f"{label}/hessian-fd", "upper", 1e-4, _column(frows, 1)),
        SubCheck(f"{label}/hessian-symmetry", "upper", 1e-10, _column(frows, 2)),
        SubCheck(f"{label}/euler", "upper", 1e-9, _column(frows, 3)),
    ]


def _det_cone(cfg):
    n = cfg.n or 3
    field = implicit.det_variety(n, cfg.mode)
    return _cone(cfg, field, lambda rng: implicit.sample_det_variety(n, rng, seed=cfg.seed), f"det{n}")


def _pfaffian_cone(cfg):
    n = cfg.n or 2
    field = implicit.pf_variety(n, cfg.mode)
    return _cone(cfg, field, lambda rng: implicit.sample_pf_variety(n, rng, seed=cfg.seed), f"pf{2 * n}")


def _helicoidal_rows(report):
    return report.fixed_distance, report.preserves_surface, report.swaps_sides


def _helicoidal_checks(label, rows):
    return [
        SubCheck(f"{label}/fixed-distance", "upper", symmetry.FIX_TOL, _column(rows, 0)),
        SubCheck(f"{label}/preserves-surface", "lower", 1.0, _column(rows, 1)),
        SubCheck(f"{label}/swaps-sides", "lower", 1.0, _column(rows, 2)),
    ]


def _helicoidal_clifford(cfg):
    p = cfg.p or 1
    imm = parametric.generalized_clifford(p, p)
    handle = symmetry.torus_handle(p)
    xi = symmetry.xi_swap(p)
    r = 1.0 / np.sqrt(2.0)

    def fixed_form(i):
        rng = stream_rng(cfg.seed, "xi", i)
        a = rng.standard_normal(p + 1)
        pt = np.concatenate([a, a]) * (r / np.linalg.norm(a))
        return _helicoidal_rows(symmetry.helicoidal_check(handle, xi, pt, INNER_SAMPLES, rng))

    def conjugated(i):
        rng = stream_rng(cfg.seed, "eta-xi-eta", i)
        q = imm(imm.sample(rng))
        iso = symmetry.clifford_helicoidal_at(q)
        return _helicoidal_rows(symmetry.helicoidal_check(handle, iso, q, INNER_SAMPLES, rng))

    return _helicoidal_checks(f"xi[p={p}]", _map(fixed_form, cfg.samples, cfg.workers)) + _helicoidal_checks(
        f"eta^-1.xi.eta[p={p}]", _map(conjugated, cfg.samples, cfg.workers)
    )


def _helicoidal_det(cfg):
    n = cfg.n or 3
    handle = symmetry.det_handle(n)

    def one(i):
        rng = stream_rng(cfg.seed, f"helicoidal-det{n}", i)
        X = implicit.sample_det_variety(n, rng, seed=cfg.seed).x
        iso = symmetry.det_helicoidal_at(X)
        A = iso.factor
        fix = float(np.max(np.abs(A @ X.reshape(n, n) - X.reshape(n, n))))
        det_a = matlib.determinant(A)
        return _helicoidal_rows(symmetry.helicoidal_check(handle, iso, X, INNER_SAMPLES, rng)) + (
            fix,
            abs(det_a + 1.0),
        )

    rows = _map(one, cfg.samples, cfg.workers)
    return _helicoidal_checks(f"phi_A[n={n}]", rows) + [
        SubCheck(f"phi_A[n={n}]/AX=X", "upper", 1e-10, _column(rows, 3)),
        SubCheck(f"phi_A[n={n}]/det(A)+1", "upper", 1e-10, _column(rows, 4)),
    ]


def _helicoidal_pfaffian(cfg):
    n = cfg.n or 2
    handle = symmetry.pf_handle(n)

    def one(i, construction):
        rng = stream_rng(cfg.seed, f"helicoidal-pf{2 * n}/{construction}", i)
        y = implicit.sample_pf_variety(n, rng, seed=cfg.seed).x
        iso = symmetry.pf_helicoidal_at(y, construction)
        B = iso.factor
        X = implicit.skew_from_coords(y)
        fix = float(np.max(np.abs(B.T @ X @ B - X)))
        return _helicoidal_rows(symmetry.helicoidal_check(handle, iso, y, INNER_SAMPLES, rng)) + (
            fix,
            abs(matlib.determinant(B) + 1.0),
        )

    checks = []
    for construction in ("kernel", "canonical"):
        rows = _map(lambda i: one(i, construction), cfg.samples, cfg.workers)
        label = f"psi_B[{construction},n={n}]"
        checks += _helicoidal_checks(label, rows) + [
            SubCheck(f"{label}/BtXB=X", "upper", 1e-10, _column(rows, 3)),
            SubCheck(f"{label}/det(B)+1", "upper", 1e-10, _column(rows, 4)),
        ]
    return checks


def _crosscheck_checks(label, report):
    return [
        SubCheck(f"{label}/helicoidal-verified", "lower", 1.0, [float(e.helicoidal) for e in report.entries]),
        SubCheck(
            f"{label}/residual",
            "upper",
            report.tol,
            [e.residual for e in report.entries if e.helicoidal],
            residual=True,
        ),
    ]


def _theorem2(cfg):
    tol = cfg.effective_tol
    checks = []

    imm = parametric.clifford_torus()
    rng = stream_rng(cfg.seed, "t2/clifford", 0)
    phis = [imm.sample(stream_rng(cfg.seed, "t2/clifford/pt", i)) for i in range(cfg.samples)]
    rep = symmetry.theorem2_crosscheck(
        [(imm(phi), phi) for phi in phis],
        symmetry.torus_handle(1),
        symmetry.clifford_helicoidal_at,
        lambda phi: parametric.sphere_minimality_residual(imm, phi, cfg.mode),
        tol,
        rng,
        INNER_SAMPLES,
    )
    checks += _crosscheck_checks("clifford", rep)

    for label, field, sample, construct, handle in (
        ("det3", implicit.det_variety(3, cfg.mode), lambda r: implicit.sample_det_variety(3, r),
         symmetry.det_helicoidal_at, symmetry.det_handle(3)),
        ("pf4", implicit.pf_variety(2, cfg.mode), lambda r: implicit.sample_pf_variety(2, r),
         symmetry.pf_helicoidal_at, symmetry.pf_handle(2)),
    ):
        pts = [sample(stream_rng(cfg.seed, f"t2/{label}/pt", i)) for i in range(cfg.samples)]
        rep = symmetry.theorem2_crosscheck(
            [(pt.x, pt) for pt in pts],
            handle,
            construct,
            lambda pt, field=field: implicit.level_residual(field, pt),
            tol,
            stream_rng(cfg.seed, f"t2/{label}", 0),
            INNER_SAMPLES,
        )
        checks += _crosscheck_checks(label, rep)

    # non-minimal control: no candidate may pass where the residual is nonzero
    ctrl = parametric.torus_with_radii(0.6)
    handle = symmetry.torus_handle(1, 1, 0.6)

    def control(i):
        rng = stream_rng(cfg.seed, "t2/control", i)
        phi = ctrl.sample(rng)
        q = ctrl(phi)
        passed = any(
            symmetry.helicoidal_check(handle, c, q, INNER_SAMPLES, rng).verdict
            for c in symmetry.torus_candidate_isometries(q)
        )
        return float(not passed), parametric.sphere_minimality_residual(ctrl, phi, cfg.mode)

    rows = _map(control, cfg.samples, cfg.workers)
    checks += [
        SubCheck("control-torus(0.6)/no-helicoidal-candidate", "lower", 1.0, _column(rows, 0)),
        SubCheck("control-torus(0.6)/residual", "lower", 0.1, _column(rows, 1)),
    ]
    return checks


def _congruence(cfg):
    checks = []
    cases = (
        ("clifford->det2", 1, implicit.det_variety(2)),
        ("clifford(2,2)->pf4", 2, implicit.pf_variety(2)),
    )
    for label, p, field in cases:
        W = implicit.congruence_witness(implicit.quadratic_form_of(field, field.ambient_dim))
        imm = parametric.generalized_clifford(p, p)
        vals = [
            abs(field(W @ imm(imm.sample(stream_rng(cfg.seed, f"congruence/{label}", i)))))
            for i in range(cfg.samples)
        ]
        checks += [
            SubCheck(f"{label}/witness-orthogonality", "upper", 1e-12,
                     [float(np.max(np.abs(W.T @ W - np.eye(W.shape[0]))))]),
            SubCheck(f"{label}/|f|", "upper", 1e-12, vals),
        ]
    T = implicit.CLIFFORD_DET2_MAP
    det2 = implicit.det_variety(2)
    imm = parametric.clifford_torus()
    vals = [
        abs(det2(T.T @ imm(imm.sample(stream_rng(cfg.seed, "congruence/closed-form", i)))))
        for i in range(cfg.samples)
    ]
    checks.append(SubCheck("clifford->det2[closed-form]/|f|", "upper", 1e-12, vals))
    return checks


PF_SIZES = (2, 4, 6, 8)


def _pfaffian_identities(cfg):
    def one(i):
        m = PF_SIZES[i % len(PF_SIZES)]
        rng = stream_rng(cfg.seed, "pf-identities", i)
        A = matlib.antisymmetrize(rng.standard_normal((m, m)))
        B = rng.standard_normal((m, m))
        pf_c = matlib.pfaffian_combinatorial(A)
        pf_f = matlib.pfaffian_fast(A)
        BtAB = matlib.antisymmetrize(B.T @ A @ B)
        cf = matlib.skew_canonical_form(A)
        return (
            _rel(pf_c**2, matlib.determinant(A)),
            _rel(matlib.pfaffian_fast(BtAB), matlib.determinant(B) * pf_f),
            _rel(pf_c, pf_f),
            float(np.linalg.norm(cf.reconstruct() - A) / np.linalg.norm(A)),
            float(np.max(np.abs(cf.Q.T @ cf.Q - np.eye(m)))),
        )

    rows = _map(one, cfg.samples, cfg.workers)
    return [
        SubCheck("pf^2=det", "upper", 1e-10, _column(rows, 0)),
        SubCheck("pf(BtAB)=det(B)pf(A)", "upper", 1e-8, _column(rows, 1)),
        SubCheck("combinatorial=fast", "upper", 1e-9, _column(rows, 2)),
        SubCheck("canonical-form/reconstruction", "upper", 1e-10, _column(rows, 3)),
        SubCheck("canonical-form/orthogonality", "upper", 1e-12, _column(rows, 4)),
    ]


def _nonminimal_control(cfg):
    torus = parametric.torus_with_radii(0.6)
    cap = parametric.small_sphere(0.6)
    sphere = implicit.sphere_field(4)

    def one(i):
        rng = stream_rng(cfg.seed, "control", i)
        x = rng.standard_normal(4)
        return (
            parametric.sphere_minimality_residual(torus, torus.sample(rng), cfg.mode),
            parametric.sphere_minimality_residual(cap, cap.sample(rng), cfg.mode),
            implicit.level_residual(sphere, x / np.linalg.norm(x)),
        )

    rows = _map(one, cfg.samples, cfg.workers)
    return [
        SubCheck("torus(0.6)/residual", "lower", 0.1, _column(rows, 0)),
        SubCheck("sphere S2(0.6)/residual", "lower", 0.1, _column(rows, 1)),
        SubCheck("|x|^2-1/level-residual", "lower", 1.0, _column(rows, 2)),
    ]


CATALOG = {
    "product": (_product, "scaled products of minimal factors are minimal in the joined sphere"),
    "clifford": (_clifford, "Clifford torus S1(1/sqrt2) x S1(1/sqrt2) is minimal in S3"),
    "generalized-clifford": (_generalized_clifford, "S^p(sqrt(p/(p+q))) x S^q(sqrt(q/(p+q))) minimal in S^{p+q+1}"),
    "det-cone": (_det_cone, "{det X = 0} is a minimal hypercone in R^{n^2}"),
    "pfaffian-cone": (_pfaffian_cone, "{pf X = 0} on skew matrices is a minimal hypercone in R^{2n^2-n}"),
    "helicoidal-clifford": (_helicoidal_clifford, "block swap xi and its eta-conjugates are helicoidal isometries"),
    "helicoidal-det": (_helicoidal_det, "Y -> AY with A a reflection fixing X swaps the sign of det"),
    "helicoidal-pfaffian": (_helicoidal_pfaffian, "Y -> BtYB with B = QJQt fixes X and swaps the sign of pf"),
    "theorem2-crosscheck": (_theorem2, "helicoidal points carry vanishing mean curvature"),
    "congruence": (_congruence, "Clifford tori are congruent to the 2x2 det and 4x4 pf cones' slices"),
    "pfaffian-identities": (_pfaffian_identities, "pf^2 = det and pf(BtAB) = det(B) pf(A)"),
    "nonminimal-control": (_nonminimal_control, "non-minimal controls must fail the residual tests"),
}


def list_scenarios():
    width = max(len(k) for k in CATALOG)
    return "\n".join(f"{name.ljust(width)}  {desc}" for name, (_, desc) in CATALOG.items())


def _params(cfg):
    name = cfg.scenario
    if name in ("det-cone", "helicoidal-det"):
        return {"n": cfg.n or 3}
    if name in ("pfaffian-cone", "helicoidal-pfaffian"):
        return {"n": cfg.n or 2}
    if name == "generalized-clifford":
        return {"p": cfg.p or 2, "q": cfg.q or 3}
    if name == "helicoidal-clifford":
        return {"p": cfg.p or 1}
    return {}


def run(cfg):
    """Execute a scenario; sampling exhaustion is recorded in ``report.error``."""
    report = ResidualReport(cfg.scenario, _params(cfg), cfg.seed, cfg.samples, cfg.effective_tol, cfg.mode)
    fn = CATALOG[cfg.scenario][0]
    try:
        report.checks = fn(cfg)
    except SamplingError as exc:
        report.error = f"SamplingError: {exc}"
    report.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return report
