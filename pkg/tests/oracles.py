"""Independent reference implementations used to pin expected test values.

Everything here is deliberately naive: truncated power series instead of
closed forms, an explicit textbook Kalman filter instead of sigma points.
Where a test asserts a specific number, that number was computed from these
and frozen as a literal.
"""

import numpy as np


def matrix_exp_series(A, terms: int = 30) -> np.ndarray:
    """Truncated power series sum_{i<=terms} A^i / i!."""
    A = np.asarray(A, dtype=float)
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for i in range(1, terms + 1):
        term = term @ A / i
        out = out + term
    return out


def kf_predict(x, P, F, Q, u=None):
    x = F @ x if u is None else F @ x + u
    return x, F @ P @ F.T + Q


def kf_update(x, P, y, H, R):
    S = H @ P @ H.T + R
    K = P @ H.T @ np.linalg.inv(S)
    x = x + K @ (y - H @ x)
    P = P - K @ S @ K.T
    return x, P, S


def kf_run(x0, P0, F, Q, H, R, controls, measurements):
    """Plain linear Kalman filter over a fixed schedule.

    controls[n-1] is the additive input of step n; measurements maps 1-based
    step indices to observations.  Returns the list of (x, P) after each step.
    """
    x, P = np.asarray(x0, dtype=float), np.asarray(P0, dtype=float)
    out = []
    for n, u in enumerate(controls, start=1):
        x, P = kf_predict(x, P, F, Q, u)
        if n in measurements:
            x, P, _ = kf_update(x, P, measurements[n], H, R)
        out.append((x.copy(), P.copy()))
    return out


def numerical_jacobian(fun, x, eps: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a vector function of a vector."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(fun(x), dtype=float)
    J = np.empty((f0.shape[0], x.shape[0]))
    for j in range(x.shape[0]):
        dx = np.zeros_like(x)
        dx[j] = eps
        J[:, j] = (np.asarray(fun(x + dx)) - np.asarray(fun(x - dx))) / (2 * eps)
    return J
