"""Sigma-point filter core, generic over a retraction.

The belief is (mean, P) with P a covariance over tangent coordinates at the
mean.  Propagation pushes sigma points through the dynamics and maps them
back through phi_inv at the new mean; process noise gets its own, separate
set of sigma points so the state and noise dimensions never have to be
stacked.  The update applies a standard unscented correction to the
measurement moments and retracts the correction vector onto the state.

Weights follow the scaled unscented transform with kappa = 0 and beta = 2;
alpha in (0, 1] is the only exposed knob.  The mean point reuses the plain
mean weight while its covariance term uses w_m + (1 - alpha^2 + beta).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Optional, Union

import numpy as np
import scipy.linalg

from .errors import (
    CholeskyFailure,
    FilterStepError,
    InvalidAlpha,
    ManifoldUkfError,
    NonPSDState,
    SingularInnovationCovariance,
)
from .retraction import Retraction

_JITTER_REL = 1e-9
_JITTER_ABS = 1e-12
_RENORM_EVERY = 1000


@dataclass(frozen=True)
class SigmaWeights:
    """Scaled unscented-transform weights for dimension n and spread alpha."""

    n: int
    alpha: float
    lam: float
    w_m: float
    w_0c: float
    w_j: float


def set_weights(n: int, alpha: float) -> SigmaWeights:
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlpha(f"alpha must lie in (0, 1], got {alpha}")
    lam = alpha * alpha * n - n
    denom = n + lam
    w_m = lam / denom
    w_j = 0.5 / denom
    w_0c = w_m + 3.0 - alpha * alpha  # + (1 - alpha^2 + beta) with beta = 2
    return SigmaWeights(n, alpha, lam, w_m, w_0c, w_j)


def sigma_points(P, lam: float) -> np.ndarray:
    """Rows are the 2n symmetric sigma points +-col_i(sqrt((lam + n) P)).

    A failed Cholesky gets one retry with diagonal jitter scaled to
    trace(P); if that also fails the covariance is declared broken.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    scale = lam + n
    if scale <= 0.0:
        raise ValueError(f"lam + n must be positive, got {scale}")
    try:
        L = np.linalg.cholesky(scale * P)
    except np.linalg.LinAlgError:
        delta = _JITTER_REL * float(np.trace(P)) / n
        if delta <= 0.0:
            delta = _JITTER_ABS
        try:
            L = np.linalg.cholesky(scale * (P + delta * np.eye(n)))
        except np.linalg.LinAlgError as exc:
            raise CholeskyFailure(
                f"covariance not factorizable even with jitter {delta:.3e}"
            ) from exc
    return np.concatenate([L.T, -L.T], axis=0)


@dataclass(frozen=True)
class Belief:
    """State estimate: a mean point and a tangent-space covariance."""

    mean: Any
    cov: np.ndarray

    @property
    def dim(self) -> int:
        return self.cov.shape[0]

    def validate(self, sym_tol: float = 1e-9, eig_tol: float = 1e-9) -> None:
        P = np.asarray(self.cov, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise NonPSDState(f"covariance must be square, got {P.shape}")
        if np.abs(P - P.T).max(initial=0.0) > sym_tol:
            raise NonPSDState("covariance is not symmetric within 1e-9")
        if float(np.linalg.eigvalsh(P).min()) < -eig_tol:
            raise NonPSDState("covariance has an eigenvalue below -1e-9")


def propagate(belief: Belief, omega, f: Callable, Q, retraction: Retraction,
              alpha: float) -> Belief:
    """One prediction step.

    The new mean is the unnoisy image of the old mean.  State uncertainty is
    re-expressed at the new mean by pushing the 2d state sigma points through
    f with zero noise; process noise contributes through its own 2q sigma
    points drawn from Q and pushed through f at the old mean.  The mean
    sigma point maps to zero by construction and drops out of both sums.
    """
    Q = np.asarray(Q, dtype=float)
    d = retraction.dim
    q = Q.shape[0]
    zero_w = np.zeros(q)
    mean_new = f(belief.mean, omega, zero_w)

    w_d = set_weights(d, alpha)
    xis = sigma_points(belief.cov, w_d.lam)
    imgs = np.empty((2 * d, d))
    for j, xi in enumerate(xis):
        imgs[j] = retraction.phi_inv(
            mean_new, f(retraction.phi(belief.mean, xi), omega, zero_w)
        )
    cov = w_d.w_j * (imgs.T @ imgs)

    if Q.any():
        w_q = set_weights(q, alpha)
        ws = sigma_points(Q, w_q.lam)
        noise_imgs = np.empty((2 * q, d))
        for j, w in enumerate(ws):
            noise_imgs[j] = retraction.phi_inv(mean_new, f(belief.mean, omega, w))
        cov = cov + w_q.w_j * (noise_imgs.T @ noise_imgs)

    return Belief(mean_new, 0.5 * (cov + cov.T))


def update(belief: Belief, y, h: Callable, R, retraction: Retraction,
           alpha: float) -> Belief:
    """One measurement update.

    Sigma points live in the tangent space at the current mean; the Kalman
    gain maps innovation to a tangent correction which is retracted onto the
    state.  The covariance update P - K S K^T keeps the existing tangent
    coordinates.
    """
    y = np.asarray(y, dtype=float)
    R = np.asarray(R, dtype=float)
    d = retraction.dim
    w = set_weights(d, alpha)
    xis = sigma_points(belief.cov, w.lam)

    y0 = np.asarray(h(belief.mean), dtype=float)
    ys = np.empty((2 * d, y0.shape[0]))
    for j, xi in enumerate(xis):
        ys[j] = h(retraction.phi(belief.mean, xi))

    y_bar = w.w_m * y0 + w.w_j * ys.sum(axis=0)
    dy0 = y0 - y_bar
    dys = ys - y_bar
    S = w.w_0c * np.outer(dy0, dy0) + w.w_j * (dys.T @ dys) + R
    P_xy = w.w_j * (xis.T @ dys)

    try:
        factor = scipy.linalg.cho_factor(S)
    except np.linalg.LinAlgError as exc:
        raise SingularInnovationCovariance(
            "innovation covariance is not positive definite"
        ) from exc
    K = scipy.linalg.cho_solve(factor, P_xy.T).T

    mean_new = retraction.phi(belief.mean, K @ (y - y_bar))
    cov = belief.cov - K @ S @ K.T
    return Belief(mean_new, 0.5 * (cov + cov.T))


MeasurementSchedule = Union[None, Mapping[int, Any], Iterable]


def _as_schedule(measurements: MeasurementSchedule) -> dict:
    if measurements is None:
        return {}
    if isinstance(measurements, Mapping):
        return {int(k): v for k, v in measurements.items()}
    return {int(step): y for step, y in measurements}


def filter_run(model, inputs, measurements: MeasurementSchedule = None, *,
               retraction=None, alpha: Optional[float] = None,
               initial: Optional[Belief] = None,
               renorm_every: int = _RENORM_EVERY):
    """Run the full recursion over an input sequence.

    inputs[n-1] drives step n (1-based); measurements map step indices to
    measurement vectors and trigger an update right after that step's
    prediction.  Returns one Belief per step.  Any numerical failure is
    re-raised as FilterStepError carrying the step index.

    The rotation block of the mean is re-orthonormalized every renorm_every
    steps; this guards long runs against drift and never moves the mean by
    more than floating-point dust.
    """
    if isinstance(retraction, Retraction):
        retr = retraction
    else:
        retr = model.retraction(retraction)
    if alpha is None:
        alpha = model.alpha
    belief = initial if initial is not None else Belief(model.initial_mean,
                                                        model.initial_cov)
    schedule = _as_schedule(measurements)
    out = []
    step = 0
    try:
        for step, omega in enumerate(inputs, start=1):
            belief = propagate(belief, omega, model.f, model.Q, retr, alpha)
            if step in schedule:
                belief = update(belief, schedule[step], model.h, model.R,
                                retr, alpha)
            if renorm_every and step % renorm_every == 0:
                belief = Belief(model.renormalize(belief.mean), belief.cov)
            out.append(belief)
    except ManifoldUkfError as exc:
        raise FilterStepError(step, exc) from exc
    return out
