"""Fixed-step RK4 for the linear system dy/dt = A(t) y.

``A`` holds the coefficient matrix on the half-step grid t = j h / 2,
j = 0..2N, so step k uses A[2k], A[2k+1] and A[2k+2].  The numba kernel is
a plain loop with a compensated state update; the numpy fallback builds
every step propagator I + D at once and multiplies them by pairwise
reduction on the D parts.  Both keep round-off well below the truncation
error at a few thousand steps.  Set WEYLDIRAC_DISABLE_NUMBA=1 to force the
fallback.
"""

from __future__ import annotations

import os

import numpy as np

DISABLE_ENV = "WEYLDIRAC_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None


def _numba_requested() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes", "on")


def rk4_linear_loop(A, y0, h):
    n_steps = (A.shape[0] - 1) // 2
    d = y0.shape[0]
    y = y0.copy()
    k1 = np.empty(d)
    k2 = np.empty(d)
    k3 = np.empty(d)
    k4 = np.empty(d)
    tmp = np.empty(d)
    comp = np.zeros(d)  # Kahan compensation for y
    for k in range(n_steps):
        a0 = A[2 * k]
        am = A[2 * k + 1]
        a1 = A[2 * k + 2]
        for i in range(d):
            s = 0.0
            for j in range(d):
                s += a0[i, j] * y[j]
            k1[i] = s
        for i in range(d):
            tmp[i] = y[i] + 0.5 * h * k1[i]
        for i in range(d):
            s = 0.0
            for j in range(d):
                s += am[i, j] * tmp[j]
            k2[i] = s
        for i in range(d):
            tmp[i] = y[i] + 0.5 * h * k2[i]
        for i in range(d):
            s = 0.0
            for j in range(d):
                s += am[i, j] * tmp[j]
            k3[i] = s
        for i in range(d):
            tmp[i] = y[i] + h * k3[i]
        for i in range(d):
            s = 0.0
            for j in range(d):
                s += a1[i, j] * tmp[j]
            k4[i] = s
        for i in range(d):
            inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) - comp[i]
            new = y[i] + inc
            comp[i] = (new - y[i]) - inc
            y[i] = new
    return y


def step_increments(A: np.ndarray, h: float) -> np.ndarray:
    """D with I + D the RK4 update matrix of each step, shape (N, d, d)."""
    a0, am, a1 = A[0:-1:2], A[1::2], A[2::2]
    eye = np.eye(A.shape[1])
    k1 = a0
    k2 = am @ (eye + 0.5 * h * k1)
    k3 = am @ (eye + 0.5 * h * k2)
    k4 = a1 @ (eye + h * k3)
    return h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_linear_numpy(A, y0, h):
    D = step_increments(np.asarray(A, dtype=float), h)
    d = D.shape[1]
    while D.shape[0] > 1:
        if D.shape[0] % 2:
            D = np.concatenate([D, np.zeros((1, d, d))], axis=0)
        first, later = D[0::2], D[1::2]
        # (I + later)(I + first) = I + (first + later + later @ first)
        D = first + later + later @ first
    y0 = np.asarray(y0, dtype=float)
    return y0 + D[0] @ y0


if numba is not None:
    rk4_linear_numba = numba.njit(cache=False)(rk4_linear_loop)
else:  # pragma: no cover
    rk4_linear_numba = None

BACKEND = "numba" if rk4_linear_numba is not None and _numba_requested() else "numpy"


def get_kernel(backend: str | None = None):
    backend = backend or BACKEND
    if backend == "numba":
        if rk4_linear_numba is None:
            raise RuntimeError("numba is not available")
        return rk4_linear_numba
    if backend == "numpy":
        return rk4_linear_numpy
    raise ValueError(f"unknown backend {backend!r}")


def rk4_linear(A, y0, h, backend: str | None = None) -> np.ndarray:
    """Integrate dy/dt = A(t) y over N = (len(A) - 1) / 2 steps of size h."""
    A = np.ascontiguousarray(A, dtype=float)
    y0 = np.ascontiguousarray(y0, dtype=float)
    if A.ndim != 3 or A.shape[0] % 2 != 1 or A.shape[1] != A.shape[2] or A.shape[1] != y0.shape[0]:
        raise ValueError("A must have shape (2N+1, d, d) matching y0")
    return get_kernel(backend)(A, y0, float(h))
