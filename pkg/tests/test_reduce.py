import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import covariance_eigen
from skillassess.reduce import PcaModel, Scaler, fit_pca, fit_scaler, transform


def _data(rng, n=40, d=17):
    # correlated columns with a spread of scales
    return rng.normal(size=(n, d)) @ rng.normal(size=(d, d)) + rng.normal(size=d) * 10


# -- scaler ----------------------------------------------------------------

def test_scaler_two_values():
    sc = fit_scaler([[1.0], [3.0]])
    assert sc.means[0] == 2.0
    assert sc.stds[0] == pytest.approx(np.sqrt(2.0))


def test_constant_column_maps_to_zero():
    X = np.column_stack([np.arange(5.0), np.full(5, 7.0)])
    sc = fit_scaler(X)
    assert sc.constant.tolist() == [False, True]
    out = sc.transform(np.array([[2.0, 123.0]]))
    assert out[0, 1] == 0.0 and np.isfinite(out).all()


def test_standardized_moments(rng):
    X = _data(rng)
    Z = fit_scaler(X).transform(X)
    np.testing.assert_allclose(Z.mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(Z.std(axis=0, ddof=1), 1.0, atol=1e-9)


def test_scaler_roundtrip_and_shape(rng):
    sc = fit_scaler(_data(rng))
    again = Scaler.from_dict(sc.to_dict())
    x = rng.normal(size=17)
    np.testing.assert_array_equal(sc.transform(x), again.transform(x))
    with pytest.raises(ValueError):
        sc.transform(np.zeros(16))
    with pytest.raises(ValueError):
        fit_scaler(np.zeros((1, 3)))


# -- pca -------------------------------------------------------------------

def test_collinear_gives_one_component(rng):
    t = rng.normal(size=30)
    X = np.outer(t, [1.0, -2.0, 0.5])
    model = fit_pca(X)
    assert model.k == 1
    assert model.explained_variance_ratio[0] == pytest.approx(1.0)


def test_isotropic_full_target_keeps_both(rng):
    X = rng.normal(size=(200, 2))
    assert fit_pca(X, variance_target=1.0).k == 2


def test_eigenpairs_match_oracle(rng):
    X = fit_scaler(_data(rng)).transform(_data(rng))
    model = fit_pca(X, variance_target=1.0)
    vals, vecs = covariance_eigen(X)
    np.testing.assert_allclose(model.explained_variance, vals, atol=1e-8)
    for row, ref in zip(model.basis, vecs[: model.k]):
        assert min(np.abs(row - ref).max(), np.abs(row + ref).max()) <= 1e-8
    assert model.total_variance == pytest.approx(vals.sum(), abs=1e-8)


def test_sign_convention(rng):
    model = fit_pca(_data(rng), variance_target=1.0)
    for row in model.basis:
        assert row[np.argmax(np.abs(row))] > 0


def test_training_mean_maps_to_origin(rng):
    X = _data(rng)
    model = fit_pca(X)
    np.testing.assert_allclose(model.transform(X.mean(axis=0)), 0.0, atol=1e-9)


def test_full_rank_reconstruction(rng):
    X = _data(rng, n=40)
    model = fit_pca(X, variance_target=1.0)
    assert model.k == 17
    Y = model.transform(X)
    np.testing.assert_allclose(Y @ model.basis + model.mean, X, atol=1e-8)


def test_components_uncorrelated(rng):
    X = _data(rng)
    Y = fit_pca(X, variance_target=1.0).transform(X)
    cov = np.cov(Y, rowvar=False)
    off = cov - np.diag(np.diag(cov))
    assert np.abs(off).max() <= 1e-8 * np.abs(cov).max()


@given(st.integers(0, 2**32 - 1), st.floats(0.5, 1.0))
def test_ratio_properties(seed, target):
    X = _data(np.random.default_rng(seed), n=25, d=6)
    model = fit_pca(X, target)
    r = model.explained_variance_ratio
    assert np.all(np.diff(r) <= 1e-12)
    assert r.sum() <= 1 + 1e-12
    assert r[: model.k].sum() >= target - 1e-9
    if model.k > 1:
        assert r[: model.k - 1].sum() < target


@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_transform_is_affine(seed, a, b):
    r = np.random.default_rng(seed)
    X = _data(r, n=20, d=5)
    model = fit_pca(X)
    u, v = r.normal(size=5), r.normal(size=5)
    lhs = model.transform(a * u + b * v)
    rhs = a * model.transform(u) + b * model.transform(v) + (1 - a - b) * model.transform(np.zeros(5))
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_no_leakage(rng):
    X = _data(rng)
    train = X[:30]
    sc = fit_scaler(train)
    model = fit_pca(sc.transform(train))
    held = X[30:] + rng.normal(size=(10, 17)) * 1000
    sc2 = fit_scaler(train)
    model2 = fit_pca(sc2.transform(train))
    x = held[0]
    np.testing.assert_array_equal(transform(model, sc, x), transform(model2, sc2, x))
    # held-out rows never change the fitted statistics
    assert np.array_equal(sc.means, fit_scaler(X[:30]).means)


def test_zero_variance_rejected():
    with pytest.raises(ValueError):
        fit_pca(np.zeros((10, 4)))
    with pytest.raises(ValueError):
        fit_pca(np.eye(3), variance_target=0.0)


def test_pca_roundtrip(rng):
    model = fit_pca(_data(rng))
    again = PcaModel.from_dict(model.to_dict())
    x = rng.normal(size=17)
    np.testing.assert_array_equal(model.transform(x), again.transform(x))
    assert again.k == model.k


def test_transform_without_pca(rng):
    X = _data(rng)
    sc = fit_scaler(X)
    np.testing.assert_array_equal(transform(None, sc, X[0]), sc.transform(X[0]))
