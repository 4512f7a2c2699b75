"""Example estimation problems, each packaged as a ModelSpec.

A ModelSpec bundles dynamics f(state, input, noise), observation h(state),
noise covariances, the candidate retractions, an input profile defining the
nominal trajectory, and the initial truth / belief.  Everything inside is
immutable and built from module-level callables, so specs pickle into
worker processes unchanged.

Noise magnitudes, trajectory shapes and initial covariances below are
configuration defaults, not physical constants; factories take keyword
overrides for all of them.

Conventions shared by the inertial problems: world frame with gravity
along -z, body-frame inputs, states stored as extended-pose embeddings
with columns (rotation, velocity, position).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional, Tuple

import numpy as np

from . import lie_groups as lie
from .errors import DimensionMismatch, UnknownLandmarkId
from .retraction import (
    MixedState,
    Retraction,
    componentwise_so3_r6,
    group_retraction,
    mixed_retraction,
)
from .sigma_core import Belief

GRAVITY = np.array([0.0, 0.0, -9.81])


@dataclass(frozen=True)
class ModelSpec:
    """One estimation problem: dynamics, observation, noise, retractions."""

    name: str
    f: Callable[[Any, np.ndarray, np.ndarray], Any]
    h: Callable[[Any], np.ndarray]
    Q: np.ndarray
    R: np.ndarray
    dt: float
    retractions: Mapping[str, Retraction]
    default_retraction: str
    initial_truth: Any
    initial_mean: Any
    initial_cov: np.ndarray
    input_profile: Callable[[int], np.ndarray]
    measure_every: int = 1
    alpha: float = 1.0
    state_labels: Tuple[str, ...] = ()
    state_to_vector: Optional[Callable[[Any], np.ndarray]] = None
    renormalize: Callable[[Any], Any] = None  # identity when None

    def __post_init__(self):
        if self.renormalize is None:
            object.__setattr__(self, "renormalize", _identity_renorm)

    def retraction(self, name: Optional[str] = None) -> Retraction:
        key = name or self.default_retraction
        try:
            return self.retractions[key]
        except KeyError:
            known = ", ".join(sorted(self.retractions))
            raise ValueError(
                f"unknown retraction {key!r} for {self.name}; choose from: {known}"
            ) from None


def _identity_renorm(state):
    return state


@dataclass(frozen=True)
class _RenormalizeRotationBlock:
    """Project the d x d rotation block back onto SO(d)."""

    d: int

    def __call__(self, state):
        if isinstance(state, MixedState):
            return MixedState(self._fix(state.group), state.euclid)
        return self._fix(state)

    def _fix(self, X):
        out = X.copy()
        out[: self.d, : self.d] = lie.polar_project(X[: self.d, : self.d])
        return out


@dataclass(frozen=True)
class LandmarkSet:
    """Known landmark positions, one per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] == 0:
            raise ValueError("landmark set must not be empty")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


# ---------------------------------------------------------------------------
# 2D localization: SE(2) pose from odometry increments and position fixes


@dataclass(frozen=True)
class _OdometryDynamics:
    """Pose composed with the exponential of the noisy body increment."""

    def __call__(self, state, omega, w):
        return state @ lie.exp_sek(np.asarray(omega, dtype=float) + w, 2, 1)


@dataclass(frozen=True)
class _Se2Position:
    def __call__(self, state):
        return state[:2, 2].copy()


@dataclass(frozen=True)
class _ConstantTurnOdometry:
    """Constant forward speed and yaw rate, expressed as per-step increments."""

    dt: float
    speed: float
    yaw_rate: float

    def __call__(self, step):
        return np.array([self.yaw_rate * self.dt, self.speed * self.dt, 0.0])


@dataclass(frozen=True)
class _Se2StateVector:
    def __call__(self, state):
        return np.array(
            [math.atan2(state[1, 0], state[0, 0]), state[0, 2], state[1, 2]]
        )


def localization2d(dt: float = 0.1, speed: float = 1.0, yaw_rate: float = 0.3,
                   odo_std=(0.01, 0.02, 0.01), gnss_std: float = 0.1,
                   measure_every: int = 10, alpha: float = 1.0) -> ModelSpec:
    """Planar unicycle with odometry increments and sparse position fixes.

    odo_std is the per-step standard deviation of the (heading, along-track,
    cross-track) increment noise.
    """
    odo_std = np.asarray(odo_std, dtype=float)
    pose_blocks = (("rot", 1), ("pos", 2))
    return ModelSpec(
        name="localization2d",
        f=_OdometryDynamics(),
        h=_Se2Position(),
        Q=np.diag(odo_std ** 2),
        R=gnss_std ** 2 * np.eye(2),
        dt=dt,
        retractions={
            "se2_left": group_retraction(2, 1, "left", "se2_left", pose_blocks),
            "se2_right": group_retraction(2, 1, "right", "se2_right", pose_blocks),
        },
        default_retraction="se2_left",
        initial_truth=np.eye(3),
        initial_mean=np.eye(3),
        initial_cov=np.diag([0.05 ** 2, 0.1 ** 2, 0.1 ** 2]),
        input_profile=_ConstantTurnOdometry(dt, speed, yaw_rate),
        measure_every=measure_every,
        alpha=alpha,
        state_labels=("theta", "x", "y"),
        state_to_vector=_Se2StateVector(),
        renormalize=_RenormalizeRotationBlock(2),
    )


# ---------------------------------------------------------------------------
# 3D attitude: SO(3) from gyro rates and gravity + magnetometer directions


@dataclass(frozen=True)
class _GyroDynamics:
    dt: float

    def __call__(self, state, omega, w):
        return state @ lie.exp_so3((np.asarray(omega, dtype=float) + w) * self.dt)


@dataclass(frozen=True)
class _BodyFieldObservation:
    """World-fixed reference vectors observed in the body frame."""

    gravity: np.ndarray
    mag_field: np.ndarray

    def __call__(self, state):
        return np.concatenate([state.T @ self.gravity, state.T @ self.mag_field])


@dataclass(frozen=True)
class _TumbleRateProfile:
    """Smooth rates exercising all three axes."""

    dt: float
    amplitude: float = 0.4

    def __call__(self, step):
        t = step * self.dt
        a = self.amplitude
        return np.array(
            [a * math.sin(0.9 * t), 0.7 * a * math.cos(0.6 * t),
             0.5 * a * math.sin(0.4 * t + 1.0)]
        )


def _euler_zyx(C):
    pitch = -math.asin(max(-1.0, min(1.0, C[2, 0])))
    return np.array(
        [math.atan2(C[2, 1], C[2, 2]), pitch, math.atan2(C[1, 0], C[0, 0])]
    )


@dataclass(frozen=True)
class _RotationStateVector:
    def __call__(self, state):
        return _euler_zyx(state)


def attitude3d(dt: float = 0.01, gyro_std: float = 0.01,
               accel_obs_std: float = 0.3, mag_obs_std: float = 0.05,
               measure_every: int = 20, alpha: float = 1.0) -> ModelSpec:
    """Attitude from integrated gyro rates with vector-direction updates.

    gyro_std is the continuous-time rate noise density (rad/s/sqrt(Hz)); the
    per-sample rate variance is gyro_std^2 / dt.
    """
    mag_field = np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0)
    rot_blocks = (("rot", 3),)
    return ModelSpec(
        name="attitude3d",
        f=_GyroDynamics(dt),
        h=_BodyFieldObservation(GRAVITY, mag_field),
        Q=(gyro_std ** 2 / dt) * np.eye(3),
        R=np.diag([accel_obs_std ** 2] * 3 + [mag_obs_std ** 2] * 3),
        dt=dt,
        retractions={
            "so3_left": group_retraction(3, 0, "left", "so3_left", rot_blocks),
            "so3_right": group_retraction(3, 0, "right", "so3_right", rot_blocks),
        },
        default_retraction="so3_left",
        initial_truth=np.eye(3),
        initial_mean=np.eye(3),
        initial_cov=0.1 ** 2 * np.eye(3),
        input_profile=_TumbleRateProfile(dt),
        measure_every=measure_every,
        alpha=alpha,
        state_labels=("roll", "pitch", "yaw"),
        state_to_vector=_RotationStateVector(),
        renormalize=_RenormalizeRotationBlock(3),
    )


# ---------------------------------------------------------------------------
# 3D inertial navigation: extended pose from IMU and body-frame landmarks


@dataclass(frozen=True)
class _InertialNavDynamics:
    """Strapdown propagation of (rotation, velocity, position).

    Inputs stack gyro rates and specific force, both body frame; noise adds
    to the rates the same way.
    """

    dt: float
    gravity: np.ndarray

    def __call__(self, state, omega, w):
        omega = np.asarray(omega, dtype=float)
        gyro = omega[:3] + w[:3]
        acc = omega[3:6] + w[3:6]
        C = state[:3, :3]
        v = state[:3, 3]
        out = np.eye(5)
        out[:3, :3] = C @ lie.exp_so3(gyro * self.dt)
        out[:3, 3] = v + (C @ acc + self.gravity) * self.dt
        out[:3, 4] = state[:3, 4] + v * self.dt
        return out


@dataclass(frozen=True)
class _BodyLandmarkObservation:
    """Known world landmarks seen in the body frame, stacked."""

    landmarks: np.ndarray  # (m, 3)

    def __call__(self, state):
        C = state[:3, :3]
        p = state[:3, 4]
        return ((self.landmarks - p) @ C).reshape(-1)


@dataclass(frozen=True)
class _CoordinatedTurnImuProfile:
    """IMU inputs whose noise-free integration is an exact level circle.

    The accelerometer term compensates gravity and supplies the centripetal
    acceleration of the discrete-time turn, so f reproduces the trajectory
    with zero noise.
    """

    dt: float
    speed: float
    yaw_rate: float
    gravity: np.ndarray

    def __call__(self, step):
        c = math.cos(self.yaw_rate * self.dt)
        s = math.sin(self.yaw_rate * self.dt)
        acc = np.array(
            [(c - 1.0) * self.speed / self.dt, s * self.speed / self.dt, 0.0]
        ) - self.gravity
        return np.array([0.0, 0.0, self.yaw_rate, acc[0], acc[1], acc[2]])


@dataclass(frozen=True)
class _ExtendedPoseStateVector:
    def __call__(self, state):
        return np.concatenate([_euler_zyx(state[:3, :3]), state[:3, 3], state[:3, 4]])


_DEFAULT_NAV_LANDMARKS = LandmarkSet(
    np.array([[15.0, 5.0, 2.0], [-12.0, 15.0, -3.0], [5.0, 25.0, 1.0]])
)


def inertial_nav(dt: float = 0.1, speed: float = 4.0, yaw_rate: float = 0.3,
                 gyro_std: float = 0.01, accel_std: float = 0.05,
                 obs_std: float = 0.1, landmarks: LandmarkSet = _DEFAULT_NAV_LANDMARKS,
                 measure_every: int = 5, alpha: float = 1.0,
                 heading_error: float = math.pi / 4,
                 position_error=(1.0, 0.0, 0.0)) -> ModelSpec:
    """IMU dead reckoning with body-frame landmark fixes on a level turn.

    The initial belief is deliberately wrong by heading_error about z and
    position_error in the world frame, with an initial covariance sized to
    cover both; this makes the large-error transient the interesting part.
    """
    m = len(landmarks)
    initial_truth = np.eye(5)
    initial_truth[:3, 3] = np.array([speed, 0.0, 0.0])
    initial_mean = initial_truth.copy()
    initial_mean[:3, :3] = lie.exp_so3(np.array([0.0, 0.0, heading_error]))
    initial_mean[:3, 4] = initial_truth[:3, 4] + np.asarray(position_error, dtype=float)
    pose_blocks = (("rot", 3), ("vel", 3), ("pos", 3))
    return ModelSpec(
        name="inertial_nav",
        f=_InertialNavDynamics(dt, GRAVITY),
        h=_BodyLandmarkObservation(landmarks.points),
        Q=np.diag([gyro_std ** 2 / dt] * 3 + [accel_std ** 2 / dt] * 3),
        R=obs_std ** 2 * np.eye(3 * m),
        dt=dt,
        retractions={
            "se23_left": group_retraction(3, 2, "left", "se23_left", pose_blocks),
            "se23_right": group_retraction(3, 2, "right", "se23_right", pose_blocks),
            "so3xr6": componentwise_so3_r6(),
        },
        default_retraction="se23_right",
        initial_truth=initial_truth,
        initial_mean=initial_mean,
        initial_cov=np.diag(
            [0.1 ** 2, 0.1 ** 2, heading_error ** 2,
             0.3 ** 2, 0.3 ** 2, 0.1 ** 2,
             1.0, 1.0, 0.1 ** 2]
        ),
        input_profile=_CoordinatedTurnImuProfile(dt, speed, yaw_rate, GRAVITY),
        measure_every=measure_every,
        alpha=alpha,
        state_labels=("roll", "pitch", "yaw", "vx", "vy", "vz", "px", "py", "pz"),
        state_to_vector=_ExtendedPoseStateVector(),
        renormalize=_RenormalizeRotationBlock(3),
    )


# ---------------------------------------------------------------------------
# 2D SLAM: SE(2) pose plus landmark estimates in one state


@dataclass(frozen=True)
class _SlamDynamics:
    """Odometry on the pose block; landmarks are static."""

    def __call__(self, state, omega, w):
        return MixedState(
            state.group @ lie.exp_sek(np.asarray(omega, dtype=float) + w, 2, 1),
            state.euclid,
        )


@dataclass(frozen=True)
class _SlamObservation:
    """All landmark estimates observed in the body frame, stacked."""

    def __call__(self, state):
        C = state.group[:2, :2]
        p = state.group[:2, 2]
        return ((state.euclid.reshape(-1, 2) - p) @ C).reshape(-1)


def landmark_observation(state: MixedState, landmark_ids) -> np.ndarray:
    """Body-frame observation of selected landmarks of a SLAM state."""
    n = state.euclid.shape[0] // 2
    C = state.group[:2, :2]
    p = state.group[:2, 2]
    out = np.empty(2 * len(landmark_ids))
    for i, lid in enumerate(landmark_ids):
        if not 0 <= lid < n:
            raise UnknownLandmarkId(f"landmark {lid} not in state (have {n})")
        out[2 * i : 2 * i + 2] = C.T @ (state.euclid[2 * lid : 2 * lid + 2] - p)
    return out


_DEFAULT_SLAM_LANDMARKS = LandmarkSet(
    np.array([[2.0, 1.0], [4.0, 4.0], [0.0, 5.0], [-2.0, 2.0]])
)


def _slam_retractions(n_landmarks: int):
    blocks = (("rot", 1), ("pos", 2), ("landmarks", 2 * n_landmarks))
    return {
        "mixed_left": mixed_retraction(2, 1, 2 * n_landmarks, "left",
                                       "mixed_left", blocks),
        "mixed_right": mixed_retraction(2, 1, 2 * n_landmarks, "right",
                                        "mixed_right", blocks),
    }


@dataclass(frozen=True)
class _SlamStateVector:
    def __call__(self, state):
        pose = np.array(
            [math.atan2(state.group[1, 0], state.group[0, 0]),
             state.group[0, 2], state.group[1, 2]]
        )
        return np.concatenate([pose, state.euclid])


def slam2d(dt: float = 0.1, speed: float = 1.0, yaw_rate: float = 0.3,
           odo_std=(0.01, 0.02, 0.01), obs_std: float = 0.05,
           landmarks: LandmarkSet = _DEFAULT_SLAM_LANDMARKS,
           measure_every: int = 5, alpha: float = 1.0) -> ModelSpec:
    """Planar SLAM with all landmarks in the state and relative observations."""
    if landmarks.points.shape[1] != 2:
        raise DimensionMismatch("slam2d landmarks must be 2D")
    m = len(landmarks)
    flat = landmarks.points.reshape(-1)
    initial_truth = MixedState(np.eye(3), flat)
    labels = ("theta", "x", "y") + tuple(
        f"l{i}{ax}" for i in range(m) for ax in ("x", "y")
    )
    return ModelSpec(
        name="slam2d",
        f=_SlamDynamics(),
        h=_SlamObservation(),
        Q=np.diag(np.asarray(odo_std, dtype=float) ** 2),
        R=obs_std ** 2 * np.eye(2 * m),
        dt=dt,
        retractions=_slam_retractions(m),
        default_retraction="mixed_right",
        initial_truth=initial_truth,
        initial_mean=MixedState(np.eye(3), flat.copy()),
        initial_cov=np.diag([0.05 ** 2, 0.1 ** 2, 0.1 ** 2] + [0.1 ** 2] * (2 * m)),
        input_profile=_ConstantTurnOdometry(dt, speed, yaw_rate),
        measure_every=measure_every,
        alpha=alpha,
        state_labels=labels,
        state_to_vector=_SlamStateVector(),
        renormalize=_RenormalizeRotationBlock(2),
    )


def augment_landmark(belief: Belief, y_new, retraction: Retraction,
                     obs_cov) -> Belief:
    """Append a newly observed landmark to a SLAM belief.

    The landmark mean comes from the inverse observation at the current pose
    estimate; the covariance gains a row/column from the linearized pose
    dependence (finite differences through the belief's own retraction, so
    left and right conventions are both handled) plus the rotated
    measurement noise.  Existing covariance entries are copied unchanged.
    """
    y_new = np.asarray(y_new, dtype=float)
    obs_cov = np.asarray(obs_cov, dtype=float)
    state = belief.mean
    C = state.group[:2, :2]
    p = state.group[:2, 2]
    l_new = p + C @ y_new

    # size from the belief, not the retraction: repeated augmentation grows
    # the state past the dimension the retraction was built for, and the
    # mixed-retraction maps adapt to whatever euclid block the state carries
    d_old = belief.cov.shape[0]
    G = np.zeros((2, d_old))
    eps = 1e-6
    for j in range(3):  # only the pose coordinates move the new landmark
        e = np.zeros(d_old)
        e[j] = eps
        sp = retraction.phi(state, e)
        sm = retraction.phi(state, -e)
        lp = sp.group[:2, 2] + sp.group[:2, :2] @ y_new
        lm = sm.group[:2, 2] + sm.group[:2, :2] @ y_new
        G[:, j] = (lp - lm) / (2.0 * eps)

    P = belief.cov
    cross = G @ P  # (2, d_old)
    block = G @ P @ G.T + C @ obs_cov @ C.T
    P_aug = np.empty((d_old + 2, d_old + 2))
    P_aug[:d_old, :d_old] = P
    P_aug[:d_old, d_old:] = cross.T
    P_aug[d_old:, :d_old] = cross
    P_aug[d_old:, d_old:] = 0.5 * (block + block.T)

    mean = MixedState(state.group, np.concatenate([state.euclid, l_new]))
    return Belief(mean, P_aug)


# ---------------------------------------------------------------------------
# IMU + GNSS fusion: extended pose plus gyro and accelerometer biases


@dataclass(frozen=True)
class _BiasedImuDynamics:
    """Inertial kinematics with bias-corrected inputs; biases random-walk.

    Noise vector: (gyro white, accel white, gyro bias walk, accel bias walk).
    """

    dt: float
    gravity: np.ndarray

    def __call__(self, state, omega, w):
        omega = np.asarray(omega, dtype=float)
        bg = state.euclid[:3]
        ba = state.euclid[3:6]
        gyro = omega[:3] - bg + w[:3]
        acc = omega[3:6] - ba + w[3:6]
        C = state.group[:3, :3]
        v = state.group[:3, 3]
        pose = np.eye(5)
        pose[:3, :3] = C @ lie.exp_so3(gyro * self.dt)
        pose[:3, 3] = v + (C @ acc + self.gravity) * self.dt
        pose[:3, 4] = state.group[:3, 4] + v * self.dt
        return MixedState(pose, state.euclid + w[6:12])


@dataclass(frozen=True)
class _MixedPosition:
    def __call__(self, state):
        return state.group[:3, 4].copy()


@dataclass(frozen=True)
class _BiasedStateVector:
    def __call__(self, state):
        return np.concatenate(
            [_euler_zyx(state.group[:3, :3]), state.group[:3, 3],
             state.group[:3, 4], state.euclid]
        )


def imu_gnss(dt: float = 0.05, speed: float = 4.0, yaw_rate: float = 0.3,
             gyro_std: float = 0.01, accel_std: float = 0.05,
             gyro_walk: float = 1e-4, accel_walk: float = 1e-3,
             gnss_std: float = 0.3, measure_every: int = 20,
             alpha: float = 1.0,
             true_gyro_bias=(0.02, -0.01, 0.015),
             true_accel_bias=(0.05, -0.1, 0.08)) -> ModelSpec:
    """GNSS-aided inertial navigation with IMU biases in the state.

    The truth starts with nonzero biases while the belief starts at zero
    bias, so the filter has to estimate them from position fixes alone.
    """
    pose0 = np.eye(5)
    pose0[:3, 3] = np.array([speed, 0.0, 0.0])
    truth = MixedState(
        pose0, np.concatenate([np.asarray(true_gyro_bias, dtype=float),
                               np.asarray(true_accel_bias, dtype=float)])
    )
    mean = MixedState(pose0.copy(), np.zeros(6))
    blocks = (("rot", 3), ("vel", 3), ("pos", 3), ("bias", 6))
    return ModelSpec(
        name="imu_gnss",
        f=_BiasedImuDynamics(dt, GRAVITY),
        h=_MixedPosition(),
        Q=np.diag(
            [gyro_std ** 2 / dt] * 3 + [accel_std ** 2 / dt] * 3
            + [gyro_walk ** 2 * dt] * 3 + [accel_walk ** 2 * dt] * 3
        ),
        R=gnss_std ** 2 * np.eye(3),
        dt=dt,
        retractions={
            "mixed_left": mixed_retraction(3, 2, 6, "left", "mixed_left", blocks),
            "mixed_right": mixed_retraction(3, 2, 6, "right", "mixed_right", blocks),
        },
        default_retraction="mixed_right",
        initial_truth=truth,
        initial_mean=mean,
        initial_cov=np.diag(
            [0.05 ** 2] * 3 + [0.1 ** 2] * 3 + [0.5 ** 2] * 3
            + [0.05 ** 2] * 3 + [0.2 ** 2] * 3
        ),
        input_profile=_CoordinatedTurnImuProfile(dt, speed, yaw_rate, GRAVITY),
        measure_every=measure_every,
        alpha=alpha,
        state_labels=(
            "roll", "pitch", "yaw", "vx", "vy", "vz", "px", "py", "pz",
            "bgx", "bgy", "bgz", "bax", "bay", "baz",
        ),
        state_to_vector=_BiasedStateVector(),
        renormalize=_RenormalizeRotationBlock(3),
    )


# ---------------------------------------------------------------------------
# Spherical pendulum: a unit vector tracked through its rotation lift


@dataclass(frozen=True)
class _LiftedSphereDynamics:
    """World-frame rotation increment with a rotation-vector noise factor."""

    dt: float

    def __call__(self, state, omega, w):
        return lie.exp_so3(np.asarray(omega, dtype=float) * self.dt) @ lie.exp_so3(w) @ state


@dataclass(frozen=True)
class _SpherePlaneObservation:
    """First two world coordinates of the sphere point."""

    lever: np.ndarray

    def __call__(self, state):
        x = state @ self.lever
        return x[:2]


@dataclass(frozen=True)
class _SphereStateVector:
    lever: np.ndarray

    def __call__(self, state):
        return state @ self.lever


@dataclass(frozen=True)
class _TabulatedProfile:
    """Inputs precomputed at construction; step n reads row n-1."""

    table: np.ndarray

    def __call__(self, step):
        if not 1 <= step <= self.table.shape[0]:
            raise ValueError(
                f"step {step} outside the tabulated horizon "
                f"{self.table.shape[0]}; rebuild with a larger input_horizon"
            )
        return self.table[step - 1]


def _pendulum_rate_table(dt, steps, tilt, length, gravity_mag):
    """Semi-implicit integration of a spherical pendulum about its rest point.

    The frame is chosen with gravity along +z so the rest direction is +e3
    (the lever default); the tilt is applied about the x axis.
    """
    g_over_l = gravity_mag / length
    e3 = np.array([0.0, 0.0, 1.0])
    x = lie.exp_so3(np.array([tilt, 0.0, 0.0])) @ e3
    omega = np.zeros(3)
    table = np.empty((steps, 3))
    for n in range(steps):
        omega = omega + dt * g_over_l * np.cross(x, e3)
        x = lie.exp_so3(omega * dt) @ x
        table[n] = omega
    return table


def pendulum_s2(dt: float = 0.01, tilt: float = 0.7, length: float = 1.0,
                gravity_mag: float = 9.81, step_noise_std: float = 0.005,
                obs_std: float = 0.02, measure_every: int = 10,
                input_horizon: int = 20000, alpha: float = 1.0) -> ModelSpec:
    """Spherical pendulum direction estimated through its rotation lift.

    The state is the lifting rotation R with the pendulum direction R @ e3;
    observations are the two horizontal coordinates of the direction.
    """
    lever = np.array([0.0, 0.0, 1.0])
    R0 = lie.exp_so3(np.array([tilt, 0.0, 0.0]))
    rot_blocks = (("rot", 3),)
    return ModelSpec(
        name="pendulum_s2",
        f=_LiftedSphereDynamics(dt),
        h=_SpherePlaneObservation(lever),
        Q=step_noise_std ** 2 * np.eye(3),
        R=obs_std ** 2 * np.eye(2),
        dt=dt,
        retractions={
            "so3_left": group_retraction(3, 0, "left", "so3_left", rot_blocks),
            "so3_right": group_retraction(3, 0, "right", "so3_right", rot_blocks),
        },
        default_retraction="so3_right",
        initial_truth=R0,
        initial_mean=R0.copy(),
        initial_cov=0.1 ** 2 * np.eye(3),
        input_profile=_TabulatedProfile(
            _pendulum_rate_table(dt, input_horizon, tilt, length, gravity_mag)
        ),
        measure_every=measure_every,
        alpha=alpha,
        state_labels=("x", "y", "z"),
        state_to_vector=_SphereStateVector(lever),
        renormalize=_RenormalizeRotationBlock(3),
    )


# ---------------------------------------------------------------------------
# Registry


_FACTORIES = {
    "localization2d": localization2d,
    "attitude3d": attitude3d,
    "inertial_nav": inertial_nav,
    "slam2d": slam2d,
    "imu_gnss": imu_gnss,
    "pendulum_s2": pendulum_s2,
}


def example_names():
    return tuple(sorted(_FACTORIES))


def make(name: str, **params) -> ModelSpec:
    """Build a registered example by name with keyword overrides."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        known = ", ".join(example_names())
        raise ValueError(f"unknown example {name!r}; choose from: {known}") from None
    return factory(**params)
