"""Dense complex matrix algebra shared by every analysis.

Operators are plain ``numpy`` arrays of dtype ``complex128``. The
``as_*`` helpers validate shape, finiteness and (anti-)Hermiticity and
return read-only copies, so values handed around the package are
effectively immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

__all__ = [
    "DimensionError",
    "NotHermitianError",
    "InvalidStateError",
    "Tolerances",
    "DEFAULT_TOL",
    "as_operator",
    "as_hermitian",
    "as_antihermitian",
    "is_hermitian",
    "is_antihermitian",
    "commutator",
    "hs_inner",
    "matrix_exp",
    "realvec",
    "from_realvec",
    "real_span_rank",
    "pauli",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
]


class DimensionError(ValueError):
    """Operands do not share a common Hilbert-space dimension."""


class NotHermitianError(ValueError):
    """A matrix required to be Hermitian (or anti-Hermitian) is not."""


class InvalidStateError(ValueError):
    """A matrix does not represent a valid pure or mixed state."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical cutoffs.

    herm_tol
        Relative Hermiticity tolerance, ``||A - A^H||_F <= herm_tol * max(1, ||A||_F)``.
    rank_tol
        Singular values (or residual norms) below ``rank_tol`` times the
        reference scale count as zero.
    ode_tol
        Acceptable Frobenius deviation between exactly propagated and
        numerically integrated trajectories.
    """

    herm_tol: float = 1e-10
    rank_tol: float = 1e-9
    ode_tol: float = 1e-8

    def __post_init__(self):
        for name in ("herm_tol", "rank_tol", "ode_tol"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be strictly positive, got {val!r}")


DEFAULT_TOL = Tolerances()


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_operator(a, dim: int | None = None) -> np.ndarray:
    """Validate ``a`` as a finite square complex matrix and return a frozen copy."""
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return _frozen(arr)


def _herm_defect(a: np.ndarray, sign: int) -> float:
    return float(np.linalg.norm(a - sign * a.conj().T))


def is_hermitian(a, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return _herm_defect(a, 1) <= tol.herm_tol * max(1.0, float(np.linalg.norm(a)))


def is_antihermitian(a, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return _herm_defect(a, -1) <= tol.herm_tol * max(1.0, float(np.linalg.norm(a)))


def as_hermitian(a, dim: int | None = None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    arr = as_operator(a, dim)
    if not is_hermitian(arr, tol):
        raise NotHermitianError(
            f"matrix is not Hermitian (||A - A^H||_F = {_herm_defect(arr, 1):.3e})"
        )
    return arr


def as_antihermitian(a, dim: int | None = None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    arr = as_operator(a, dim)
    if not is_antihermitian(arr, tol):
        raise NotHermitianError(
            f"matrix is not anti-Hermitian (||A + A^H||_F = {_herm_defect(arr, -1):.3e})"
        )
    return arr


def _check_pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def commutator(a, b) -> np.ndarray:
    """Return ``AB - BA``."""
    a, b = _check_pair(a, b)
    return a @ b - b @ a


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``tr(A^H B)``."""
    a, b = _check_pair(a, b)
    return complex(np.vdot(a.ravel(), b.ravel()))


def matrix_exp(a, t: float = 1.0) -> np.ndarray:
    """Return ``exp(t A)``.

    Hermitian and anti-Hermitian inputs go through a unitary eigendecomposition,
    which keeps ``exp(t A)`` unitary to rounding for anti-Hermitian ``A``.
    Anything else falls back to scaling-and-squaring with a Pade approximant.
    """
    a = np.asarray(a, dtype=np.complex128)
    if not (np.all(np.isfinite(a)) and np.isfinite(t)):
        raise ValueError("matrix_exp requires finite input")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.linalg.norm(a)))
    if _herm_defect(a, -1) <= 1e-12 * scale:
        w, v = np.linalg.eigh(-1j * a)
        return (v * np.exp(1j * t * w)) @ v.conj().T
    if _herm_defect(a, 1) <= 1e-12 * scale:
        w, v = np.linalg.eigh(a)
        return (v * np.exp(t * w)) @ v.conj().T
    return scipy.linalg.expm(t * a)


def realvec(a) -> np.ndarray:
    """Flatten an operator to a real vector: real parts, then imaginary parts.

    The Euclidean dot product of two such vectors equals ``Re tr(A^H B)``.
    """
    a = np.asarray(a)
    return np.concatenate([a.real.ravel(), a.imag.ravel()]).astype(np.float64)


def from_realvec(x: np.ndarray, n: int) -> np.ndarray:
    nn = n * n
    return (x[:nn] + 1j * x[nn:]).reshape(n, n)


def real_span_rank(ops: Sequence, tol: Tolerances = DEFAULT_TOL) -> int:
    """Dimension of the real-linear span of ``ops``.

    Singular values at or below ``tol.rank_tol`` times the largest one are dropped.
    """
    ops = list(ops)
    if not ops:
        return 0
    shapes = {np.shape(o) for o in ops}
    if len(shapes) != 1:
        raise DimensionError(f"operators have differing shapes: {sorted(shapes)}")
    mat = np.stack([realvec(o) for o in ops])
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_tol * s[0]))


PAULI_X = _frozen(np.array([[0, 1], [1, 0]], dtype=np.complex128))
PAULI_Y = _frozen(np.array([[0, -1j], [1j, 0]], dtype=np.complex128))
PAULI_Z = _frozen(np.array([[1, 0], [0, -1]], dtype=np.complex128))


def pauli(name: str) -> np.ndarray:
    """Return a Pauli matrix (``"I"``, ``"X"``, ``"Y"`` or ``"Z"``)."""
    table = {"I": np.eye(2, dtype=np.complex128), "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
    return np.array(table[name.upper()])
