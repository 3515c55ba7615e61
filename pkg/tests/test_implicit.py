import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import pf4, random_skew
from minlab import implicit as I
from minlab import matlib
from minlab.errors import DimensionError, SamplingError, SingularPointError

seeds = st.integers(0, 2**32 - 1)


# --- level residual -------------------------------------------------------


def test_det2_residual_vanishes_identically(rng):
    # Hess f is constant and trace-free and ∇fᵀ(Hess f)∇f = 2 det X
    field = I.det_variety(2)
    for _ in range(50):
        assert I.level_residual(field, I.sample_det_variety(2, rng)) <= 1e-12
    x = rng.standard_normal(4)
    g = field.gradient(x)
    assert g @ field.hessian(x) @ g == pytest.approx(2 * field(x))


@pytest.mark.parametrize("N", [3, 4, 7])
def test_sphere_field_residual(rng, N):
    field = I.sphere_field(N)
    for _ in range(5):
        x = rng.standard_normal(N)
        x /= np.linalg.norm(x)
        assert I.level_residual(field, x) == pytest.approx(N - 1)


def test_residual_scales_inversely_off_variety(rng):
    # level sets of a degree-d cone are homothetic, so curvature scales like 1/|x|
    field = I.det_variety(3)
    for _ in range(5):
        x = rng.standard_normal(9)
        assert I.level_residual(field, 2 * x) == pytest.approx(I.level_residual(field, x) / 2, rel=1e-6)


def test_singular_point_raises():
    with pytest.raises(SingularPointError):
        I.level_residual(I.det_variety(3), np.zeros(9))
    with pytest.raises(SingularPointError):
        # corank 2: every cofactor vanishes
        I.level_residual(I.det_variety(3), np.diag([1.0, 0.0, 0.0]).ravel())


def test_residual_accepts_variety_point(rng):
    pt = I.sample_det_variety(3, rng)
    assert I.level_residual(I.det_variety(3), pt) == I.level_residual(I.det_variety(3), pt.x)


# --- determinant variety --------------------------------------------------


def test_det_gradient_is_cofactor():
    field = I.det_variety(2)
    np.testing.assert_array_equal(field.gradient(np.diag([1.0, 0.0]).ravel()), [0.0, 0.0, 0.0, 1.0])


def test_det_hessian_n2_is_constant():
    H = I.det_variety(2).hessian(np.array([0.3, -1.2, 2.0, 0.5]))
    np.testing.assert_allclose(H, [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], atol=1e-12)


@pytest.mark.parametrize("mode", ["ad", "fd"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_det_field_consistency(rng, n, mode):
    field = I.det_variety(n, mode)
    for _ in range(3):
        x = rng.standard_normal(n * n)
        g_err, h_err, asym = I.field_fd_check(field, x)
        assert g_err <= 1e-6
        assert h_err <= 1e-4
        assert asym <= 1e-10
        assert I.euler_defect(field, x) <= 1e-8


def test_det_modes_agree(rng):
    ad, fd = I.det_variety(3, "ad"), I.det_variety(3, "fd")
    x = rng.standard_normal(9)
    np.testing.assert_allclose(fd.hessian(x), ad.hessian(x), atol=1e-6)


def test_det_variety_rejects_small_n():
    with pytest.raises(DimensionError):
        I.det_variety(1)


def test_det_sampler_invariants(rng):
    for _ in range(200):
        pt = I.sample_det_variety(4, rng)
        X = pt.x.reshape(4, 4)
        s = np.linalg.svd(X, compute_uv=False)
        assert np.linalg.norm(X) == pytest.approx(1.0)
        assert s[-1] <= 1e-12
        assert s[-2] / s[0] > I.REGULARITY_GAP
        assert pt.attempts >= 1


def test_det_sampler_exhaustion():
    class Degenerate:
        # rank-one draws never clear the regularity gap
        def standard_normal(self, shape):
            return np.ones(shape)

    with pytest.raises(SamplingError) as exc:
        I.sample_det_variety(3, Degenerate(), max_tries=3, seed=42)
    assert exc.value.seed == 42


# --- Pfaffian variety and coordinates -------------------------------------


def test_pf4_polynomial_expansion(rng):
    poly = I.pfaffian_polynomial(2)
    for _ in range(10):
        x = rng.standard_normal(6)
        x1, x2, x3, x4, x5, x6 = x
        assert poly(x) == pytest.approx(x1 * x6 - x2 * x5 + x3 * x4)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pfaffian_polynomial_matches_fast(rng, n):
    poly = I.pfaffian_polynomial(n)
    for _ in range(5):
        x = rng.standard_normal(I.skew_dim(n))
        assert poly(x) == pytest.approx(matlib.pfaffian_fast(I.skew_from_coords(x)), rel=1e-10)


def test_skew_coords_layout():
    X = I.skew_from_coords(np.arange(1.0, 7.0))
    assert pf4(X) == 1 * 6 - 2 * 5 + 3 * 4
    assert (X[0, 1], X[0, 2], X[0, 3], X[1, 2], X[1, 3], X[2, 3]) == (1, 2, 3, 4, 5, 6)
    assert np.array_equal(X, -X.T)


def test_skew_order():
    assert [I.skew_order(I.skew_dim(n)) for n in (1, 2, 3, 4)] == [1, 2, 3, 4]
    with pytest.raises(DimensionError):
        I.skew_order(5)


def test_mu_first_coordinate():
    X = I.mu_embed(np.eye(6)[0])
    assert X[0, 1] == pytest.approx(1 / np.sqrt(2))
    assert X[1, 0] == pytest.approx(-1 / np.sqrt(2))


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1, 2, 3]))
def test_mu_is_an_isometry(seed, n):
    r = np.random.default_rng(seed)
    x, y = r.standard_normal((2, I.skew_dim(n)))
    assert matlib.frobenius_inner(I.mu_embed(x), I.mu_embed(y)) == pytest.approx(x @ y, rel=1e-12, abs=1e-12)
    np.testing.assert_allclose(I.mu_inverse(I.mu_embed(x)), x, rtol=1e-14, atol=1e-14)


def test_mu_inverse_rejects_odd(rng):
    with pytest.raises(DimensionError):
        I.mu_inverse(random_skew(rng, 3))


@pytest.mark.parametrize("n", [2, 3])
def test_pf_sampler_invariants(rng, n):
    for _ in range(100):
        pt = I.sample_pf_variety(n, rng)
        X = I.skew_from_coords(pt.x)
        assert np.linalg.norm(pt.x) == pytest.approx(1.0)
        assert abs(matlib.pfaffian_fast(X)) <= 1e-12
        assert abs(np.linalg.det(X)) <= 1e-14
        s = np.linalg.svd(X, compute_uv=False)
        assert s[-3] > 1e-6


@pytest.mark.parametrize("mode", ["ad", "fd"])
@pytest.mark.parametrize("n", [2, 3])
def test_pf_field_consistency(rng, n, mode):
    field = I.pf_variety(n, mode)
    for _ in range(3):
        x = rng.standard_normal(field.ambient_dim)
        g_err, h_err, asym = I.field_fd_check(field, x)
        assert g_err <= 1e-6
        assert h_err <= 1e-4
        assert asym <= 1e-10
        assert I.euler_defect(field, x) <= 1e-8


def test_pf_residual_on_variety(rng):
    field = I.pf_variety(3)
    for _ in range(10):
        assert I.level_residual(field, I.sample_pf_variety(3, rng)) <= 1e-7


def test_pf_variety_size_limit():
    with pytest.raises(DimensionError):
        I.pf_variety(5)
    with pytest.raises(DimensionError):
        I.sample_pf_variety(5, np.random.default_rng(0))


# --- quadratic forms and congruences ---------------------------------------


def test_closed_form_clifford_map(rng):
    det2 = I.det_variety(2)
    T = I.CLIFFORD_DET2_MAP
    np.testing.assert_allclose(T @ T.T, np.eye(4), atol=1e-15)
    for _ in range(20):
        a, b = rng.uniform(0, 2 * np.pi, 2)
        u = np.array([np.cos(a), np.sin(a), np.cos(b), np.sin(b)]) / np.sqrt(2)
        assert abs(det2(T.T @ u)) <= 1e-15


def test_quadratic_form_of_det2():
    S = I.quadratic_form_of(I.det_variety(2), 4)
    np.testing.assert_allclose(S, 0.5 * np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]), atol=1e-12)


@pytest.mark.parametrize("field,p", [(I.det_variety(2), 1), (I.pf_variety(2), 2)], ids=["det2", "pf4"])
def test_congruence_witness(rng, field, p):
    N = field.ambient_dim
    W = I.congruence_witness(I.quadratic_form_of(field, N))
    np.testing.assert_allclose(W.T @ W, np.eye(N), atol=1e-12)
    for _ in range(20):
        a, b = rng.standard_normal((2, p + 1))
        u = np.concatenate([a / np.linalg.norm(a), b / np.linalg.norm(b)]) / np.sqrt(2)
        assert abs(field(W @ u)) <= 1e-12


def test_congruence_witness_rejects_wrong_signature():
    with pytest.raises(DimensionError):
        I.congruence_witness(np.diag([1.0, 1.0, -1.0, 2.0]))
    with pytest.raises(DimensionError):
        I.congruence_witness(np.diag([1.0, 1.0, 1.0, -1.0]))


def test_quadratic_field_derivatives(rng):
    S = rng.standard_normal((5, 5))
    field = I.quadratic_field(S)
    x = rng.standard_normal(5)
    g_err, h_err, _ = I.field_fd_check(field, x)
    assert g_err <= 1e-8 and h_err <= 1e-8
    assert I.euler_defect(field, x) <= 1e-12
