"""Pure-Python/numpy versions of the compiled kernels (same signatures)."""

import numpy as np


def rk4_flow(H, p0, h, nsteps):
    H = np.ascontiguousarray(H, dtype=np.complex128)
    p = np.array(p0, dtype=np.complex128)
    out = np.empty((nsteps + 1,) + p.shape, dtype=np.complex128)
    out[0] = p

    def rhs(q):
        return -1j * (H @ q - q @ H)

    for s in range(nsteps):
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * h * k1)
        k3 = rhs(p + 0.5 * h * k2)
        k4 = rhs(p + h * k3)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[s + 1] = p
    return out


def mgs_residual(Q, m, x):
    for _ in range(2):
        for k in range(m):
            q = Q[k]
            x -= np.dot(q, x) * q
    return float(np.sqrt(np.dot(x, x)))
