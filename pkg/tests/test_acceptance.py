"""Acceptance criteria, one test each, at their stated tolerances and sample counts.

A PASS/FAIL line per criterion is printed in the terminal summary (see conftest).
"""

import json

import numpy as np
import pytest

from minlab import implicit, matlib, parametric
from minlab.scenarios import CATALOG, PRODUCT_FACTORS, ScenarioConfig, run, stream_rng

SEED = 0
criterion = pytest.mark.criterion


def _run(name, **kwargs):
    rep = run(ScenarioConfig(name, seed=SEED, **kwargs))
    failing = [c.summary_line() for c in rep.checks if c.failures]
    return rep, failing


def _check(rep, name):
    return next(c for c in rep.checks if c.name == name)


@criterion("products: residual <= 1e-6 at 100 points per factor pair; block and det laws <= 1e-9")
def test_product_minimality():
    rep, failing = _run("product", samples=100, tol=1e-6)
    assert rep.verdict == "pass", failing
    assert {c.name.split("/")[0] for c in rep.checks} == set(PRODUCT_FACTORS)
    for c in rep.checks:
        assert len(c.values) == 100
        assert c.tol == (1e-6 if c.residual else 1e-9)


@criterion("product metric identity: det g_hat law at 100 points, relative error <= 1e-9")
def test_product_metric_identity():
    worst = 0.0
    for label, factors in PRODUCT_FACTORS.items():
        f1, f2 = factors()
        imm = parametric.scaled_product(f1, f2)
        n1, n2 = f1.chart_dim, f2.chart_dim
        c = n1**n1 * n2**n2 / (n1 + n2) ** (n1 + n2)
        for i in range(100):
            phi = imm.sample(stream_rng(SEED, f"accept/det-law/{label}", i))
            measured = parametric.metric_at(imm, phi).det_g
            predicted = c * parametric.metric_at(f1, phi[:n1]).det_g * parametric.metric_at(f2, phi[n1:]).det_g
            worst = max(worst, abs(measured - predicted) / abs(predicted))
    assert worst <= 1e-9


@criterion("negative controls: torus(0.6) and S2(0.6) residual >= 0.1; |x|^2-1 level residual > 1")
def test_negative_controls():
    rep, failing = _run("nonminimal-control", samples=200)
    assert rep.verdict == "pass", failing
    sphere = _check(rep, "|x|^2-1/level-residual")
    assert min(sphere.values) > 1.0


@criterion("det cone: residual <= 1e-12 (n=2) and <= 1e-8 (n=3,4) at 1000 regular unit-norm points")
@pytest.mark.parametrize("n,tol", [(2, 1e-12), (3, 1e-8), (4, 1e-8)])
def test_det_cone(n, tol):
    rep, failing = _run("det-cone", n=n, samples=1000, tol=tol)
    assert rep.verdict == "pass", failing
    assert rep.max_residual <= tol
    assert len(_check(rep, f"det{n}/residual").values) == 1000


@criterion("Pfaffian cone: residual <= 1e-7 (n=2,3) at 500 points; sampler acceptance >= 99%")
@pytest.mark.parametrize("n", [2, 3])
def test_pfaffian_cone(n):
    rep, failing = _run("pfaffian-cone", n=n, samples=500, tol=1e-7)
    assert rep.verdict == "pass", failing
    assert rep.max_residual <= 1e-7
    assert _check(rep, f"pf{2 * n}/acceptance-rate").values[0] >= 0.99


@criterion("Pfaffian identities: pf^2=det (1e-10), pf(BtAB)=det(B)pf(A) (1e-8), fast=combinatorial (1e-9), 200 pairs")
def test_pfaffian_identities():
    rep, failing = _run("pfaffian-identities", samples=200)
    assert rep.verdict == "pass", failing
    assert _check(rep, "pf^2=det").tol == 1e-10
    assert _check(rep, "pf(BtAB)=det(B)pf(A)").tol == 1e-8
    assert _check(rep, "combinatorial=fast").tol == 1e-9


@criterion("canonical form: reconstruction <= 1e-10 relative, Q orthogonality <= 1e-12, 200 matrices up to 8x8")
def test_canonical_form():
    recon, ortho = [], []
    for i in range(200):
        rng = stream_rng(SEED, "accept/canonical", i)
        m = 2 * int(rng.integers(1, 5))
        X = matlib.antisymmetrize(rng.standard_normal((m, m)))
        cf = matlib.skew_canonical_form(X)
        recon.append(np.linalg.norm(cf.reconstruct() - X) / np.linalg.norm(X))
        ortho.append(np.max(np.abs(cf.Q.T @ cf.Q - np.eye(m))))
        assert np.all(cf.lambdas >= 0)
    assert max(recon) <= 1e-10
    assert max(ortho) <= 1e-12


@criterion("Clifford helicoidal: xi at fixed-form points and eta^-1.xi.eta at 20 points, p in {1,2}")
@pytest.mark.parametrize("p", [1, 2])
def test_clifford_helicoidal(p):
    rep, failing = _run("helicoidal-clifford", p=p, samples=20)
    assert rep.verdict == "pass", failing
    for c in rep.checks:
        if c.name.endswith("fixed-distance"):
            assert max(c.values) <= 1e-10
        else:
            assert min(c.values) == 1.0


@criterion("det and Pfaffian helicoidal isometries pass at 200 points each with exact sign flips")
@pytest.mark.parametrize("scenario,n", [("helicoidal-det", 3), ("helicoidal-det", 4), ("helicoidal-pfaffian", 2), ("helicoidal-pfaffian", 3)])
def test_cone_helicoidal(scenario, n):
    rep, failing = _run(scenario, n=n, samples=200)
    assert rep.verdict == "pass", failing
    for c in rep.checks:
        if c.name.endswith("swaps-sides"):
            assert len(c.values) == 200 and min(c.values) == 1.0


@criterion("helicoidal => minimal: residual <= 1e-6 (parametric) and <= 1e-7 (implicit) at every verified point")
def test_helicoidal_crosscheck():
    rep, failing = _run("theorem2-crosscheck", samples=100, tol=1e-6)
    assert rep.verdict == "pass", failing
    for label, tol in (("clifford", 1e-6), ("det3", 1e-7), ("pf4", 1e-7)):
        verified = _check(rep, f"{label}/helicoidal-verified")
        residual = _check(rep, f"{label}/residual")
        assert min(verified.values) == 1.0
        assert len(residual.values) == 100
        assert max(residual.values) <= tol
    assert min(_check(rep, "control-torus(0.6)/no-helicoidal-candidate").values) == 1.0


@criterion("congruences: 500 Clifford points into det2=0 and 500 S2xS2 points into pf4=0, |f| <= 1e-12")
def test_congruences():
    rep, failing = _run("congruence", samples=500)
    assert rep.verdict == "pass", failing
    for name in ("clifford->det2/|f|", "clifford(2,2)->pf4/|f|"):
        c = _check(rep, name)
        assert len(c.values) == 500 and max(c.values) <= 1e-12


CONSTRUCTIONS = {
    "clifford": parametric.clifford_torus,
    "clifford(2,3)": lambda: parametric.generalized_clifford(2, 3),
    "S3": lambda: parametric.great_sphere(3),
    "S1xS2": lambda: parametric.scaled_product(parametric.great_sphere(1), parametric.great_sphere(2)),
    "torus(0.6)": lambda: parametric.torus_with_radii(0.6),
    "S2(0.6)": lambda: parametric.small_sphere(0.6),
}

FIELDS = {
    "det2": lambda: implicit.det_variety(2),
    "det3": lambda: implicit.det_variety(3),
    "det4": lambda: implicit.det_variety(4),
    "pf4": lambda: implicit.pf_variety(2),
    "pf6": lambda: implicit.pf_variety(3),
}


@criterion("engine cross-validation: AD jets vs finite differences <= 1e-5 relative at 50 points; field invariants")
def test_engine_cross_validation():
    for label, make in CONSTRUCTIONS.items():
        imm = make()
        for i in range(50):
            rel1, rel2 = parametric.jet_fd_discrepancy(imm, imm.sample(stream_rng(SEED, f"accept/jets/{label}", i)))
            assert rel1 <= 1e-5 and rel2 <= 1e-5, (label, rel1, rel2)
    for label, make in FIELDS.items():
        field = make()
        for i in range(50):
            x = stream_rng(SEED, f"accept/field/{label}", i).standard_normal(field.ambient_dim)
            g_err, h_err, asym = implicit.field_fd_check(field, x)
            assert g_err <= 1e-5 and h_err <= 1e-5, (label, g_err, h_err)
            assert asym <= 1e-10
            assert implicit.euler_defect(field, x) <= 1e-9


@criterion("determinism: identical configs give identical JSON reports modulo timestamp")
def test_determinism():
    for name in CATALOG:
        a = json.loads(run(ScenarioConfig(name, seed=11, samples=5)).to_json())
        b = json.loads(run(ScenarioConfig(name, seed=11, samples=5, workers=3)).to_json())
        a.pop("timestamp")
        b.pop("timestamp")
        assert a == b, name


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
