import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from oracles import axis_travel_loop, path_length_loop
from skillassess.features import (FEATURE_NAMES, FeatureConfig, FeatureVector, curvature_series,
                                  depth_perception, extract_features, features_from_csv,
                                  features_to_csv, jerk_series, path_length, speed_series,
                                  time_to_complete)
from skillassess.ingest import Trajectory
from skillassess.preprocess import Series3, derivative, loess_smooth
from skillassess.synth import (EXPERT_ARCHETYPE, NOVICE_ARCHETYPE, MotionProfile, generate,
                               gen_trajectory)

DT = 1 / 30


def _s(values, dt=DT):
    return Series3(np.asarray(values, dtype=float), dt)


def _traj(n, rng=None, rate=30.0):
    rng = rng or np.random.default_rng(0)
    walk = np.cumsum(rng.normal(0, 0.1, (n, 6)), axis=0)
    return Trajectory(walk[:, :3], walk[:, 3:], rate)


# -- time to complete ------------------------------------------------------

def test_ttc_values():
    assert time_to_complete(_traj(301)) == pytest.approx(10.0)
    assert time_to_complete(_traj(4)) == pytest.approx(0.1)


def test_ttc_two_minute_synthetic():
    # 10 cm straight line at 1/12 cm/s lasts 120 s
    profile = MotionProfile(base_path=((0, 0, 0), (10, 0, 0)), pace=10 / 120,
                            tremor_amp=0, jerkiness=0, pause_rate=0)
    traj, info = generate(profile)
    assert info["nominal_duration_s"] == pytest.approx(120.0)
    assert abs(time_to_complete(traj) - 120.0) <= DT
    assert time_to_complete(traj) == info["duration_s"]


@given(st.integers(4, 500), st.floats(1, 1000))
def test_ttc_formula(n, rate):
    assert time_to_complete(_traj(n, rate=rate)) == pytest.approx((n - 1) / rate)


# -- path length / depth ---------------------------------------------------

def test_path_length_345():
    assert path_length([[0, 0, 0], [3, 4, 0]]) == 5.0
    assert path_length([[1, 2, 3]]) == 0.0


def test_path_length_matches_oracle(rng):
    pts = rng.normal(size=(100, 3))
    assert path_length(pts) == pytest.approx(path_length_loop(pts.tolist()), abs=1e-12)


def test_depth_along_axis_equals_path_length():
    pts = np.outer(np.sin(np.linspace(0, 3, 50)), [0, 0, 1.0])
    assert depth_perception(pts, (0, 0, 1)) == pytest.approx(path_length(pts), abs=1e-12)


def test_depth_orthogonal_plane_is_zero(rng):
    pts = rng.normal(size=(50, 3))
    pts[:, 2] = 4.0
    assert depth_perception(pts, (0, 0, 1)) == 0.0


def test_depth_random_walk_matches_oracle(rng):
    pts = np.cumsum(rng.normal(size=(200, 3)), axis=0)
    assert depth_perception(pts, (0, 0, 1)) == pytest.approx(
        axis_travel_loop(pts.tolist(), 2), abs=1e-12)


def test_depth_rejects_non_unit_axis():
    with pytest.raises(ValueError):
        depth_perception(np.zeros((3, 3)), (0, 0, 2))
    with pytest.raises(ValueError):
        FeatureConfig(depth_axis=(1, 1, 0))


@given(st.integers(0, 2**32 - 1))
def test_depth_never_exceeds_path_length(seed):
    r = np.random.default_rng(seed)
    pts = r.normal(size=(20, 3))
    axis = r.normal(size=3)
    axis /= np.linalg.norm(axis)
    assert depth_perception(pts, axis) <= path_length(pts) * (1 + 1e-12)


# -- speed -----------------------------------------------------------------

def test_speed_unit_steps():
    pts = np.outer(np.arange(10.0), [1, 0, 0])
    sp = speed_series(_s(pts))
    assert sp.shape == (9,)
    np.testing.assert_allclose(sp, 30.0)


def test_speed_stationary():
    np.testing.assert_array_equal(speed_series(_s(np.ones((5, 3)))), 0.0)


def test_speed_sinusoid_matches_analytic():
    # p(t) = (A sin wt, A cos wt, c t): |dp/dt| = sqrt(A^2 w^2 + c^2), constant
    t = np.arange(300) * DT
    A, w, c = 2.0, 1.5, 0.7
    pts = np.column_stack([A * np.sin(w * t), A * np.cos(w * t), c * t])
    analytic = np.sqrt((A * w) ** 2 + c**2)
    np.testing.assert_allclose(speed_series(_s(pts)), analytic, rtol=0.02)


def test_speed_1d_sinusoid_matches_midpoint_derivative():
    t = np.arange(300) * DT
    pts = np.column_stack([np.sin(2 * t), 0 * t, 0 * t])
    mid = t[1:] - DT / 2
    analytic = np.abs(2 * np.cos(2 * mid))
    np.testing.assert_allclose(speed_series(_s(pts)), analytic, atol=0.02 * 2)


# -- jerk ------------------------------------------------------------------

def test_jerk_constant_velocity_zero():
    t = np.arange(50) * DT
    pts = np.column_stack([3 * t, -t + 1, 0.5 * t])
    assert jerk_series(_s(pts)).max() <= 1e-9


def test_jerk_cubic():
    t = np.arange(60) * DT
    pts = np.column_stack([t**3, 0 * t, 0 * t])
    np.testing.assert_allclose(jerk_series(_s(pts))[3:-3], 6.0, atol=1e-6)


def test_jerk_too_short():
    with pytest.raises(ValueError):
        jerk_series(_s(np.zeros((3, 3))))


def test_smoothing_lowers_jerk(rng):
    t = np.arange(600) * DT
    clean = np.column_stack([np.sin(t), np.cos(0.5 * t), 0.1 * t])
    noisy = _s(clean + rng.normal(0, 0.05, clean.shape))
    smoothed = loess_smooth(noisy, 0.05, 5)
    assert jerk_series(smoothed).mean() < jerk_series(noisy).mean()


# -- curvature -------------------------------------------------------------

def _curvature_of(pts, dt):
    p = _s(pts, dt)
    v = derivative(p)
    return curvature_series(v, derivative(v))


def test_circle_curvature():
    dt = 1 / 30
    t = np.arange(600) * dt
    r, w = 2.0, 1.0
    pts = np.column_stack([r * np.cos(w * t), r * np.sin(w * t), 0 * t])
    np.testing.assert_allclose(_curvature_of(pts, dt)[2:-2], 1 / r, rtol=0.01)


def test_helix_curvature():
    dt = 1 / 30
    t = np.arange(600) * dt
    r, c = 1.0, 1.0
    pts = np.column_stack([r * np.cos(t), r * np.sin(t), c * t])
    np.testing.assert_allclose(_curvature_of(pts, dt)[2:-2], r / (r**2 + c**2), rtol=0.01)


def test_straight_line_curvature_zero():
    t = np.arange(100) * DT
    pts = np.column_stack([2 * t, -t, 0.5 * t + 3])
    assert _curvature_of(pts, DT).max() <= 1e-9


def test_curvature_non_negative_and_guarded():
    still = _s(np.zeros((5, 3)))
    kappa = curvature_series(derivative(still), derivative(derivative(still)))
    np.testing.assert_array_equal(kappa, 0.0)


def test_curvature_length_mismatch():
    with pytest.raises(ValueError):
        curvature_series(_s(np.ones((4, 3))), _s(np.ones((5, 3))))


# -- feature vector --------------------------------------------------------

def test_vector_has_17_entries(rng):
    fv = extract_features(_traj(200, rng))
    assert len(fv.to_array()) == 17 == len(FEATURE_NAMES)
    assert FEATURE_NAMES[0] == "ttc_s"
    assert FEATURE_NAMES[1:9] == ["pl_left", "dp_left", "speed_mean_left", "speed_std_left",
                                  "jerk_mean_left", "jerk_std_left", "curv_mean_left",
                                  "curv_std_left"]


def test_stationary_trial():
    fv = extract_features(Trajectory(np.ones((4, 3)), np.zeros((4, 3))))
    assert fv.ttc_s == pytest.approx(0.1)
    np.testing.assert_array_equal(fv.to_array()[1:], 0.0)


def test_features_use_smoothed_positions(rng):
    traj = _traj(300, rng)
    cfg = FeatureConfig()
    smoothed = loess_smooth(Series3(traj.right, traj.dt), cfg.span, cfg.min_window)
    fv = extract_features(traj, cfg)
    assert fv.pl_right == pytest.approx(path_length(smoothed))
    sp = speed_series(smoothed)
    assert fv.speed_std_right == pytest.approx(np.std(sp, ddof=1))


def test_expert_lower_jerk_and_curvature():
    expert, novice = MotionProfile(**EXPERT_ARCHETYPE), MotionProfile(**NOVICE_ARCHETYPE)
    jerk_wins = curv_wins = 0
    for seed in range(30):
        fe = extract_features(gen_trajectory(expert.replace(seed=seed)))
        fn = extract_features(gen_trajectory(novice.replace(seed=seed)))
        jerk_wins += fe.jerk_mean_left < fn.jerk_mean_left and fe.jerk_mean_right < fn.jerk_mean_right
        curv_wins += fe.curv_mean_left < fn.curv_mean_left and fe.curv_mean_right < fn.curv_mean_right
    assert jerk_wins > 15 and curv_wins > 15


def _rigid(traj, R, offset):
    return Trajectory(traj.left @ R.T + offset, traj.right @ R.T + offset, traj.sample_rate_hz)


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=3))
def test_translation_invariance(offset):
    traj = _traj(120)
    a = extract_features(traj).to_array()
    b = extract_features(_rigid(traj, np.eye(3), np.array(offset))).to_array()
    np.testing.assert_allclose(a, b, rtol=1e-6, atol=1e-6)


@given(st.integers(0, 2**32 - 1))
def test_rotation_invariance(seed):
    traj = _traj(120)
    R = Rotation.random(random_state=seed).as_matrix()
    rotated = _rigid(traj, R, 0.0)
    axis = tuple(R @ np.array([0, 0, 1.0]))
    a = extract_features(traj).to_array()
    b = extract_features(rotated, FeatureConfig(depth_axis=axis)).to_array()
    np.testing.assert_allclose(a, b, rtol=1e-6, atol=1e-8)


def test_ttc_halves_when_rate_doubles():
    traj = _traj(121)
    fast = Trajectory(traj.left, traj.right, 60.0)
    assert extract_features(fast).ttc_s == pytest.approx(extract_features(traj).ttc_s / 2)


def test_vector_invariants_enforced():
    vals = np.ones(17)
    vals[2] = 2.0  # dp_left > pl_left
    with pytest.raises(ValueError):
        FeatureVector.from_array(vals)
    with pytest.raises(ValueError):
        FeatureVector.from_array(np.ones(16))
    with pytest.raises(ValueError):
        FeatureVector.from_array(np.r_[0.0, np.ones(16)])


def test_csv_roundtrip(rng):
    rows = [(("S1", "1"), extract_features(_traj(50, rng))),
            (("S2", "4"), extract_features(_traj(60, rng)))]
    text = features_to_csv(rows, ("surgeon", "trial"))
    assert text.splitlines()[0].split(",")[2:] == FEATURE_NAMES
    back = features_from_csv(text, n_meta=2)
    assert [m for m, _ in back] == [["S1", "1"], ["S2", "4"]]
    assert all(a == b for (_, a), (_, b) in zip(back, rows))
