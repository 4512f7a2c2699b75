"""Filter-core tests: weights, sigma points, propagate/update, full runs.

The linear-model expectations come from the textbook Kalman filter in
oracles.py; scalar expected values are frozen from its closed forms.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manifold_ukf import lie_groups as lie
from manifold_ukf.errors import (
    CholeskyFailure,
    FilterStepError,
    InvalidAlpha,
    SingularInnovationCovariance,
)
from manifold_ukf.models import ModelSpec
from manifold_ukf.retraction import additive_retraction, left_retraction
from manifold_ukf.sigma_core import (
    Belief,
    filter_run,
    propagate,
    set_weights,
    sigma_points,
    update,
)

from oracles import kf_run, kf_update

RNG = np.random.Generator(np.random.Philox(key=99))


def linear_model(F, Q, H, R, x0, P0, controls=None, name="linear"):
    """A plain linear-Gaussian problem wrapped as a ModelSpec."""
    F = np.asarray(F, dtype=float)
    H = np.asarray(H, dtype=float)
    d = F.shape[0]
    retr = additive_retraction(d)

    def f(state, omega, w):
        return F @ state + omega + w

    def h(state):
        return H @ state

    def profile(step):
        if controls is None:
            return np.zeros(d)
        return controls[step - 1]

    return ModelSpec(
        name=name, f=f, h=h, Q=np.asarray(Q, dtype=float),
        R=np.asarray(R, dtype=float), dt=1.0,
        retractions={"additive": retr}, default_retraction="additive",
        initial_truth=np.asarray(x0, dtype=float),
        initial_mean=np.asarray(x0, dtype=float),
        initial_cov=np.asarray(P0, dtype=float),
        input_profile=profile,
        state_labels=tuple(f"x{i}" for i in range(d)),
        state_to_vector=lambda s: s,
    )


# ---------------------------------------------------------------------------
# Weights


def test_weights_unit_alpha_n3():
    w = set_weights(3, 1.0)
    assert w.lam == 0.0
    assert w.w_m == 0.0
    assert w.w_j == pytest.approx(1.0 / 6.0, abs=1e-15)
    assert w.w_0c == 2.0


def test_weights_small_alpha_n2():
    w = set_weights(2, 1e-3)
    assert w.lam == pytest.approx(2.0 * (1e-6 - 1.0), rel=1e-12)
    assert w.w_j == pytest.approx(1.0 / 4e-6, rel=1e-9)
    assert w.w_0c == pytest.approx(w.w_m + 3.0 - 1e-6, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 12), st.floats(1e-3, 1.0))
def test_weights_mean_normalization(n, alpha):
    # the identity is exact in real arithmetic; in floats the achievable
    # absolute error grows with |w_m| (small alpha makes the weights huge)
    w = set_weights(n, alpha)
    assert abs(w.w_m + 2 * n * w.w_j - 1.0) <= 1e-12 * max(1.0, abs(w.w_m))
    assert w.w_j > 0.0


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.floats(0.3, 1.0))
def test_weights_mean_normalization_is_tight_for_moderate_alpha(n, alpha):
    w = set_weights(n, alpha)
    assert abs(w.w_m + 2 * n * w.w_j - 1.0) <= 1e-12


def test_weights_rejects_bad_alpha():
    for alpha in (0.0, -0.5, 1.5, 2.0):
        with pytest.raises(InvalidAlpha):
            set_weights(3, alpha)
    with pytest.raises(ValueError):
        set_weights(0, 0.5)


# ---------------------------------------------------------------------------
# Sigma points


def test_sigma_points_identity_cov():
    pts = sigma_points(np.eye(2), 0.0)
    s = np.sqrt(2.0)
    expected = np.array([[s, 0.0], [0.0, s], [-s, 0.0], [0.0, -s]])
    assert np.abs(pts - expected).max() < 1e-15


def test_sigma_points_zero_cov_uses_jitter():
    pts = sigma_points(np.zeros((3, 3)), 0.0)
    assert pts.shape == (6, 3)
    assert np.abs(pts).max() < 1e-4  # jitter-scale points, not a failure
    assert np.abs(pts).max() > 0.0


def test_sigma_points_reconstruction():
    for n in (1, 2, 5, 9):
        A = RNG.standard_normal((n, n))
        P = A @ A.T + 0.1 * np.eye(n)
        w = set_weights(n, 0.7)
        pts = sigma_points(P, w.lam)
        assert np.abs(w.w_j * (pts.T @ pts) - P).max() < 1e-10
        assert np.array_equal(pts[:n], -pts[n:])  # exact +/- pairs
        assert np.array_equal(pts[:n] + pts[n:], np.zeros((n, n)))


def test_sigma_points_failure_after_jitter():
    with pytest.raises(CholeskyFailure):
        sigma_points(np.diag([1.0, -1.0]), 0.0)


def test_sigma_points_scale_check():
    with pytest.raises(ValueError):
        sigma_points(np.eye(2), -2.0)


# ---------------------------------------------------------------------------
# update


def test_update_scalar_kalman():
    # frozen scalar oracle: K = P/(P+R) = 1/2, mean = K*y = 1, P+ = 0.5
    retr = additive_retraction(1)
    belief = Belief(np.zeros(1), np.eye(1))
    out = update(belief, np.array([2.0]), lambda s: s, np.eye(1), retr, 1.0)
    assert out.mean == pytest.approx(np.array([1.0]), abs=1e-10)
    assert out.cov == pytest.approx(np.array([[0.5]]), abs=1e-10)


def test_update_zero_innovation_keeps_mean():
    retr = additive_retraction(2)
    H = np.array([[1.0, 0.5], [0.0, 2.0]])
    x = np.array([0.3, -0.7])
    belief = Belief(x, np.diag([0.5, 2.0]))
    out = update(belief, H @ x, lambda s: H @ s, 0.1 * np.eye(2), retr, 0.9)
    assert np.abs(out.mean - x).max() < 1e-10


def test_update_matches_closed_form_linear():
    H = np.array([[1.0, 2.0], [0.0, 1.0]])
    R = np.diag([0.5, 0.2])
    P = np.array([[2.0, 0.3], [0.3, 1.0]])
    x = np.array([1.0, -1.0])
    y = np.array([0.7, 0.1])
    out = update(Belief(x, P), y, lambda s: H @ s, R, additive_retraction(2), 0.8)
    ex, eP, _ = kf_update(x, P, y, H, R)
    assert np.abs(out.mean - ex).max() < 1e-10
    assert np.abs(out.cov - eP).max() < 1e-10


def test_update_never_grows_covariance():
    for _ in range(20):
        d, p = 3, 2
        A = RNG.standard_normal((d, d))
        P = A @ A.T + 0.1 * np.eye(d)
        H = RNG.standard_normal((p, d))
        R = np.diag(RNG.uniform(0.1, 1.0, p))
        y = RNG.standard_normal(p)
        out = update(Belief(RNG.standard_normal(d), P), y,
                     lambda s, H=H: H @ s, R, additive_retraction(d), 1.0)
        assert np.linalg.eigvalsh(P - out.cov).min() > -1e-10
        assert np.abs(out.cov - out.cov.T).max() <= 1e-12


def test_update_singular_innovation():
    retr = additive_retraction(2)
    belief = Belief(np.zeros(2), np.eye(2))
    with pytest.raises(SingularInnovationCovariance):
        update(belief, np.zeros(1), lambda s: np.zeros(1), np.zeros((1, 1)),
               retr, 1.0)


def test_update_on_group_state():
    # correction vector retracts onto the group; mean stays a valid element
    retr = left_retraction(3, 0)
    C = lie.exp_so3(np.array([0.2, -0.1, 0.3]))
    belief = Belief(C, 0.05 * np.eye(3))
    y = np.array([0.25, -0.05, 0.35])

    def h(state):
        return lie.log_so3(state)

    out = update(belief, y, h, 0.01 * np.eye(3), retr, 1.0)
    assert np.abs(out.mean.T @ out.mean - np.eye(3)).max() < 1e-12
    # posterior mean moved toward the measurement
    assert np.linalg.norm(lie.log_so3(out.mean) - y) < np.linalg.norm(
        lie.log_so3(C) - y)


# ---------------------------------------------------------------------------
# propagate


def test_propagate_scalar_additive_noise():
    retr = additive_retraction(1)
    belief = Belief(np.array([0.7]), np.eye(1))
    out = propagate(belief, np.zeros(1), lambda s, o, w: s + w, np.eye(1),
                    retr, 1.0)
    assert np.array_equal(out.mean, np.array([0.7]))
    assert out.cov == pytest.approx(np.array([[2.0]]), abs=1e-10)


def test_propagate_identity_no_noise():
    retr = additive_retraction(2)
    P = np.array([[1.5, 0.2], [0.2, 0.8]])
    belief = Belief(np.array([1.0, -2.0]), P)
    out = propagate(belief, np.zeros(2), lambda s, o, w: s, np.zeros((2, 2)),
                    retr, 1.0)
    assert np.array_equal(out.mean, belief.mean)
    assert np.abs(out.cov - P).max() < 1e-12


def test_propagate_identity_no_noise_group_state():
    retr = left_retraction(3, 1)
    X = lie.exp_sek(np.array([0.3, -0.5, 0.2, 1.0, 2.0, -0.7]), 3, 1)
    P = 0.04 * np.eye(6)
    out = propagate(Belief(X, P), None, lambda s, o, w: s, np.zeros((6, 6)),
                    retr, 1.0)
    assert np.array_equal(out.mean, X)
    assert np.abs(out.cov - P).max() < 1e-12


def test_propagate_linear_matches_oracle():
    for _ in range(10):
        F = RNG.standard_normal((2, 2))
        A = RNG.standard_normal((2, 2))
        P = A @ A.T + 0.2 * np.eye(2)
        Q = np.diag(RNG.uniform(0.1, 1.0, 2))
        x = RNG.standard_normal(2)
        out = propagate(Belief(x, P), np.zeros(2),
                        lambda s, o, w, F=F: F @ s + w, Q,
                        additive_retraction(2), 0.6)
        assert np.abs(out.mean - F @ x).max() < 1e-12
        assert np.abs(out.cov - (F @ P @ F.T + Q)).max() < 1e-8


# ---------------------------------------------------------------------------
# filter_run


def test_filter_run_dead_reckoning():
    F = np.array([[1.0, 0.1], [0.0, 1.0]])
    Q = np.diag([0.01, 0.02])
    model = linear_model(F, Q, np.eye(2), np.eye(2), np.zeros(2), np.eye(2))
    beliefs = filter_run(model, [np.zeros(2)] * 10, None)
    x, P = np.zeros(2), np.eye(2)
    for b in beliefs:
        x, P = F @ x, F @ P @ F.T + Q
        assert np.abs(b.mean - x).max() < 1e-10
        assert np.abs(b.cov - P).max() < 1e-8


def test_filter_run_matches_kalman_trace():
    rng = np.random.Generator(np.random.Philox(key=4))
    F = np.array([[1.0, 0.1], [0.0, 0.95]])
    Q = np.diag([0.02, 0.05])
    H = np.array([[1.0, 0.0]])
    R = np.array([[0.25]])
    P0 = np.diag([0.5, 0.3])
    x0 = np.array([0.2, -0.1])
    steps = 40
    controls = [rng.standard_normal(2) * 0.1 for _ in range(steps)]
    measurements = {n: rng.standard_normal(1) for n in range(1, steps + 1)}

    model = linear_model(F, Q, H, R, x0, P0, controls=controls)
    beliefs = filter_run(model, controls, measurements)
    expected = kf_run(x0, P0, F, Q, H, R, controls, measurements)
    for b, (ex, eP) in zip(beliefs, expected):
        assert np.abs(b.mean - ex).max() < 1e-8
        assert np.abs(b.cov - eP).max() < 1e-8


def test_filter_run_deterministic():
    model = linear_model(np.eye(2), 0.1 * np.eye(2), np.eye(2),
                         0.2 * np.eye(2), np.zeros(2), np.eye(2))
    inputs = [np.array([0.1, -0.2])] * 15
    meas = {5: np.array([1.0, 2.0]), 10: np.array([0.5, -0.5])}
    a = filter_run(model, inputs, meas)
    b = filter_run(model, inputs, meas)
    for ba, bb in zip(a, b):
        assert np.array_equal(ba.mean, bb.mean)
        assert np.array_equal(ba.cov, bb.cov)


def test_filter_run_reports_failing_step():
    model = linear_model(np.eye(1), np.zeros((1, 1)), np.zeros((1, 1)),
                         np.zeros((1, 1)), np.zeros(1), np.eye(1))
    # constant h with R = 0 makes the innovation covariance singular
    meas = {3: np.array([0.0])}
    with pytest.raises(FilterStepError) as exc_info:
        filter_run(model, [np.zeros(1)] * 5, meas)
    assert exc_info.value.step == 3
    assert isinstance(exc_info.value.cause, SingularInnovationCovariance)


def test_filter_run_measurement_pairs_accepted():
    model = linear_model(np.eye(1), 0.1 * np.eye(1), np.eye(1),
                         0.1 * np.eye(1), np.zeros(1), np.eye(1))
    inputs = [np.zeros(1)] * 4
    from_pairs = filter_run(model, inputs, [(2, np.array([1.0]))])
    from_map = filter_run(model, inputs, {2: np.array([1.0])})
    for a, b in zip(from_pairs, from_map):
        assert np.array_equal(a.mean, b.mean)


def test_belief_validate():
    Belief(np.zeros(2), np.eye(2)).validate()
    with pytest.raises(Exception):
        Belief(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]])).validate()
    with pytest.raises(Exception):
        Belief(np.zeros(2), -np.eye(2)).validate()


def test_update_intermediate_quantities_match_formulas():
    # fixed instance: recompute the gain by hand from the same moments
    H = np.array([[2.0, 0.0], [0.0, 0.5]])
    P = np.diag([1.0, 4.0])
    R = 0.5 * np.eye(2)
    x = np.zeros(2)
    y = np.array([1.0, -2.0])
    out = update(Belief(x, P), y, lambda s: H @ s, R, additive_retraction(2), 1.0)
    S = H @ P @ H.T + R          # exact for linear h under the UT
    K = P @ H.T @ np.linalg.inv(S)
    assert np.abs(out.mean - K @ y).max() < 1e-10
    assert np.abs(out.cov - (P - K @ S @ K.T)).max() < 1e-10
