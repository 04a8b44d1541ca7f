from __future__ import annotations

import numpy as np
import pytest

from oracles import hinge_primal, svm_dual_enumeration, svm_dual_lbfgsb

from padbench import (
    BONA_FIDE,
    ScalerStats,
    SvmConfig,
    SvmError,
    decision_scores,
    load_model,
    save_model,
    standardize_fit,
    train_linear_svm,
)

TIGHT = SvmConfig(c=10.0, tol=1e-10, max_iter=100000, seed=3)


def _random_fixture(rng, n, dim, separable=False):
    x = rng.normal(size=(n, dim))
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    if np.all(y > 0) or np.all(y < 0):
        y[0] = -y[0]
    if separable:
        x[y > 0, 0] += 4.0
    return x, y


# ---------------------------------------------------------------------------
# standardize_fit


def test_standardize_two_rows():
    stats = standardize_fit(np.array([[0.0], [2.0]]))
    assert stats.mean.tolist() == [1.0]
    assert stats.std.tolist() == [1.0]  # population std


def test_standardize_constant_column_clamped():
    stats = standardize_fit(np.array([[3.0, 1.0], [3.0, 2.0]]))
    assert stats.std[0] == 1e-12
    z = stats.apply(np.array([[3.0, 1.5]]))
    assert z[0, 0] == 0.0


def test_standardize_identity_matrix():
    stats = standardize_fit(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert stats.mean.tolist() == [0.5, 0.5]
    assert stats.std.tolist() == [0.5, 0.5]


def test_standardize_needs_two_rows():
    with pytest.raises(SvmError, match=">= 2 rows"):
        standardize_fit(np.array([[1.0, 2.0]]))


# ---------------------------------------------------------------------------
# training


def test_analytic_one_dimensional_separator():
    # Max-margin separator of x=+1 / x=-1 is w=1, b=0 with functional margin 1.
    model = train_linear_svm(np.array([[1.0], [-1.0]]), np.array([1.0, -1.0]),
                             SvmConfig(c=10.0, tol=1e-10, max_iter=10000, seed=0))
    assert model.converged
    assert model.weights[0] == pytest.approx(1.0, abs=1e-8)
    assert model.bias == pytest.approx(0.0, abs=1e-8)


def test_six_point_fixture_matches_qp_oracle():
    x = np.array([[1.0, 1.0], [2.0, 0.5], [1.5, 2.0], [-1.0, -1.0], [-2.0, -0.5], [-1.0, -2.0]])
    y = np.array([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])
    model = train_linear_svm(x, y, TIGHT)
    _, w_oracle, b_oracle = svm_dual_lbfgsb(x, y, TIGHT.c)
    mine = hinge_primal(model.weights, model.bias, x, y, TIGHT.c)
    oracle = hinge_primal(w_oracle, b_oracle, x, y, TIGHT.c)
    assert abs(mine - oracle) / abs(oracle) <= 1e-6


def test_single_class_input_rejected():
    with pytest.raises(SvmError, match="single class"):
        train_linear_svm(np.array([[1.0], [2.0]]), np.array([1.0, 1.0]), SvmConfig())


def test_label_value_validation():
    with pytest.raises(SvmError, match=r"\+1.*-1"):
        train_linear_svm(np.array([[1.0], [2.0]]), np.array([1.0, 0.0]), SvmConfig())


def test_length_mismatch_rejected():
    with pytest.raises(SvmError, match="labels"):
        train_linear_svm(np.zeros((3, 2)), np.array([1.0, -1.0]), SvmConfig())


def test_config_validation():
    with pytest.raises(SvmError):
        SvmConfig(c=0.0)
    with pytest.raises(SvmError):
        SvmConfig(tol=-1.0)
    with pytest.raises(SvmError):
        SvmConfig(max_iter=0)


def test_oracles_agree_with_each_other(rng):
    for _ in range(4):
        x, y = _random_fixture(rng, int(rng.integers(4, 9)), 2)
        _, w1, b1 = svm_dual_lbfgsb(x, y, 1.0)
        _, w2, b2 = svm_dual_enumeration(x, y, 1.0)
        p1 = hinge_primal(w1, b1, x, y, 1.0)
        p2 = hinge_primal(w2, b2, x, y, 1.0)
        assert abs(p1 - p2) <= 1e-7 * max(1.0, abs(p2))


def test_dual_feasibility_throughout_training(rng):
    x, y = _random_fixture(rng, 40, 3)
    c = 2.0
    snapshots = []
    train_linear_svm(x, y, SvmConfig(c=c, tol=1e-9, max_iter=300, seed=5),
                     callback=lambda k, alpha, v: snapshots.append(alpha))
    assert snapshots
    for alpha in snapshots:
        assert (alpha >= -1e-15).all()
        assert (alpha <= c + 1e-15).all()


def test_dual_objective_monotone_across_passes(rng):
    x, y = _random_fixture(rng, 60, 4)
    c = 1.0
    z = np.hstack([x, np.ones((len(y), 1))])
    yz = y[:, None] * z
    objectives = []

    def record(_, alpha, __):
        w_aug = yz.T @ alpha
        objectives.append(0.5 * w_aug @ w_aug - alpha.sum())

    train_linear_svm(x, y, SvmConfig(c=c, tol=1e-9, max_iter=200, seed=6), callback=record)
    diffs = np.diff(objectives)
    assert (diffs <= 1e-10).all()


def test_separable_data_reaches_zero_training_error(rng):
    x, y = _random_fixture(rng, 30, 3, separable=True)
    model = train_linear_svm(x, y, SvmConfig(c=100.0, tol=1e-6, max_iter=20000, seed=7))
    predictions = np.sign(x @ model.weights + model.bias)
    assert (predictions == y).all()


def test_training_is_deterministic(rng):
    x, y = _random_fixture(rng, 25, 4)
    cfg = SvmConfig(c=1.0, tol=1e-8, max_iter=5000, seed=11)
    m1 = train_linear_svm(x, y, cfg)
    m2 = train_linear_svm(x, y, cfg)
    assert m1.weights.tobytes() == m2.weights.tobytes()
    assert m1.bias == m2.bias


def test_unconverged_run_reports_flag():
    rng = np.random.default_rng(0)
    x, y = _random_fixture(rng, 50, 3)
    model = train_linear_svm(x, y, SvmConfig(c=1.0, tol=1e-12, max_iter=1, seed=0))
    assert not model.converged
    assert model.iterations_used == 1


def test_prediction_signs_invariant_under_feature_rescaling(rng):
    x_raw, y = _random_fixture(rng, 30, 4, separable=True)
    probes = rng.normal(size=(20, 4))
    probes[:10, 0] += 4.0
    cfg = SvmConfig(c=10.0, tol=1e-9, max_iter=20000, seed=9)

    def fit_and_score(x, p):
        scaler = standardize_fit(x)
        model = train_linear_svm(scaler.apply(x), y, cfg, scaler=scaler)
        ids = [f"p{i}" for i in range(len(p))]
        labels = [BONA_FIDE] * len(p)
        return np.array([e.score for e in decision_scores(model, p, ids, labels).entries])

    scale = np.array([3.0, 0.25, 10.0, 1.5])
    offset = np.array([-2.0, 5.0, 0.0, 100.0])
    s_base = fit_and_score(x_raw, probes)
    s_scaled = fit_and_score(x_raw * scale + offset, probes * scale + offset)
    assert (np.sign(s_base) == np.sign(s_scaled)).all()


# ---------------------------------------------------------------------------
# scoring


def _fitted_model(rng):
    x_raw = rng.normal(loc=3.0, size=(20, 3))
    y = np.where(np.arange(20) < 10, 1.0, -1.0)
    x_raw[y > 0, 1] += 5.0
    scaler = standardize_fit(x_raw)
    model = train_linear_svm(scaler.apply(x_raw), y,
                             SvmConfig(c=1.0, tol=1e-8, max_iter=5000, seed=1),
                             scaler=scaler)
    return model, x_raw


def test_score_of_support_vector_is_plus_one():
    model = train_linear_svm(np.array([[1.0], [-1.0]]), np.array([1.0, -1.0]),
                             SvmConfig(c=10.0, tol=1e-10, max_iter=10000, seed=0))
    scores = decision_scores(model, np.array([[1.0]]), ["sv"], [BONA_FIDE])
    assert scores.entries[0].score == pytest.approx(1.0, abs=1e-8)


def test_score_at_scaler_mean_is_bias(rng):
    model, _ = _fitted_model(rng)
    scores = decision_scores(model, model.scaler.mean[None, :], ["m"], [BONA_FIDE])
    assert scores.entries[0].score == model.bias


def test_score_dim_mismatch_rejected(rng):
    model, _ = _fitted_model(rng)
    with pytest.raises(SvmError, match="expected shape"):
        decision_scores(model, np.zeros((1, 5)), ["x"], [BONA_FIDE])


def test_model_persistence_round_trip(tmp_path, rng):
    model, _ = _fitted_model(rng)
    path = tmp_path / "model.pdsv"
    save_model(model, path)
    back = load_model(path)
    assert back.weights.tobytes() == model.weights.tobytes()
    assert back.bias == model.bias
    assert back.scaler.mean.tolist() == model.scaler.mean.tolist()
    assert back.scaler.std.tolist() == model.scaler.std.tolist()
    assert back.config == model.config
    assert back.iterations_used == model.iterations_used
    assert back.converged == model.converged


def test_scaler_validation():
    with pytest.raises(SvmError, match="shape mismatch"):
        ScalerStats(mean=np.zeros(3), std=np.ones(2))
    with pytest.raises(SvmError, match="below epsilon"):
        ScalerStats(mean=np.zeros(2), std=np.array([1.0, 0.0]))
