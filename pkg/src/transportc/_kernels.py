"""RK4 kernels for the linear matrix ODE ``U' = M(t) U``, ``U(0) = I``.

Both backends take the coefficient matrix sampled at the RK4 nodes
``t0, t0 + h/2, t0 + h, ...`` (``2 * steps + 1`` samples).

``TRANSPORTC_BACKEND=numpy`` forces the pure numpy path; otherwise numba is
used when it imports.
"""
import functools
import os

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover
    nb = None


def rk4_numpy(ms: np.ndarray, h: float) -> np.ndarray:
    """Batched one-step propagators, multiplied together as a balanced tree."""
    n = ms.shape[1]
    eye = np.eye(n, dtype=np.complex128)
    m0, m1, m2 = ms[0:-1:2], ms[1::2], ms[2::2]
    k1 = m0
    k2 = m1 @ (eye + 0.5 * h * k1)
    k3 = m1 @ (eye + 0.5 * h * k2)
    k4 = m2 @ (eye + h * k3)
    props = eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    # later steps act on the left
    while props.shape[0] > 1:
        if props.shape[0] % 2:
            props = np.concatenate([props, eye[None]], axis=0)
        props = props[1::2] @ props[0::2]
    return props[0]


if nb is not None:
    _jit = functools.partial(nb.njit, cache=True, nogil=True)

    @_jit
    def _matmul(a, b, out):
        n = a.shape[0]
        for i in range(n):
            for j in range(n):
                acc = 0j
                for k in range(n):
                    acc += a[i, k] * b[k, j]
                out[i, j] = acc

    @_jit
    def rk4_numba(ms, h):
        n = ms.shape[1]
        steps = (ms.shape[0] - 1) // 2
        u = np.eye(n, dtype=np.complex128)
        k1 = np.empty((n, n), dtype=np.complex128)
        k2 = np.empty_like(k1)
        k3 = np.empty_like(k1)
        k4 = np.empty_like(k1)
        tmp = np.empty_like(k1)
        for s in range(steps):
            _matmul(ms[2 * s], u, k1)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = u[i, j] + 0.5 * h * k1[i, j]
            _matmul(ms[2 * s + 1], tmp, k2)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = u[i, j] + 0.5 * h * k2[i, j]
            _matmul(ms[2 * s + 1], tmp, k3)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = u[i, j] + h * k3[i, j]
            _matmul(ms[2 * s + 2], tmp, k4)
            for i in range(n):
                for j in range(n):
                    u[i, j] += (h / 6.0) * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        return u
else:  # pragma: no cover
    rk4_numba = None


def backend() -> str:
    if os.environ.get("TRANSPORTC_BACKEND", "").lower() == "numpy" or rk4_numba is None:
        return "numpy"
    return "numba"


def rk4(ms: np.ndarray, h: float, which: str | None = None) -> np.ndarray:
    ms = np.ascontiguousarray(ms, dtype=np.complex128)
    if (which or backend()) == "numba":
        return rk4_numba(ms, float(h))
    return rk4_numpy(ms, float(h))
