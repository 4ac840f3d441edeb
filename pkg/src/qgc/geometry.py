"""Projective Hilbert space as a classical-like phase space.

Points are rank-1 orthogonal projectors ``p``. A tangent vector at ``p`` is
``v = -i[A, p]`` for a Hermitian generator ``A``; generators differing by
an operator that commutes with ``p`` give the same vector.

Sign convention
---------------
The symplectic form is evaluated as ``omega_p(u, v) = -i kappa tr(p [A_u, A_v])``.
With Hamiltonian fields ``X_{f_A}(p) = -i[A, p]`` this ordering makes
Hamilton's equation ``omega_p(X_f, w) = df_p(w)`` and the Poisson bracket
``{f_A, f_B} = omega(X_A, X_B) = f_{-i[A,B]}`` hold with a plus sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .operators import (
    DEFAULT_TOL,
    DimensionError,
    InvalidStateError,
    Tolerances,
    as_hermitian,
    as_operator,
    commutator,
    matrix_exp,
)

__all__ = [
    "BasePointMismatch",
    "GeometryContext",
    "PureState",
    "MixedState",
    "TangentVector",
    "pure_state_from_ket",
    "basis_state",
    "tangent_from_generator",
    "hamiltonian_field",
    "symplectic_form",
    "fubini_study_metric",
    "observable_function",
    "state_density",
    "poisson_bracket_generator",
    "evolve_state",
    "haar_kets",
    "haar_sample",
    "mc_expectation",
    "isometry_check",
    "HAAR_CHUNK",
]

STATE_TOL = 1e-10
# Monte-Carlo chunk size; fixed so serial and threaded runs draw identical samples.
HAAR_CHUNK = 8192


class BasePointMismatch(ValueError):
    """Two tangent vectors live at different points of projective space."""


@dataclass(frozen=True)
class GeometryContext:
    """Dimension and inverse-quantization parameter ``kappa``."""

    n: int
    kappa: float = 1.0
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n!r}")
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be > 0, got {self.kappa!r}")

    @property
    def kappa_prime(self) -> float:
        return self.n * (self.n + 1) / self.kappa


@dataclass(frozen=True, eq=False)
class PureState:
    """A point of projective space, stored as its rank-1 projector."""

    projector: np.ndarray

    def __post_init__(self):
        p = as_operator(self.projector)
        object.__setattr__(self, "projector", p)
        if abs(np.trace(p) - 1.0) > STATE_TOL:
            raise InvalidStateError(f"projector trace is {np.trace(p).real:.12g}, expected 1")
        if np.linalg.norm(p - p.conj().T) > STATE_TOL:
            raise InvalidStateError("projector is not Hermitian")
        if np.linalg.norm(p @ p - p) > STATE_TOL:
            raise InvalidStateError("projector is not idempotent")

    @property
    def n(self) -> int:
        return self.projector.shape[0]

    @classmethod
    def from_ket(cls, psi) -> "PureState":
        return pure_state_from_ket(psi)

    @classmethod
    def nearest(cls, m) -> "PureState":
        """Projector onto the dominant eigenvector of the Hermitian part of ``m``."""
        m = np.asarray(m, dtype=np.complex128)
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
        return pure_state_from_ket(v[:, -1])

    def ket(self) -> np.ndarray:
        """A unit vector spanning the range of the projector (phase arbitrary)."""
        w, v = np.linalg.eigh(self.projector)
        return v[:, -1]

    def same_point(self, other: "PureState", tol: float = STATE_TOL) -> bool:
        return self.n == other.n and np.linalg.norm(self.projector - other.projector) <= tol


def pure_state_from_ket(psi) -> PureState:
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    nrm2 = float(np.vdot(psi, psi).real)
    if psi.size == 0 or not np.isfinite(nrm2) or nrm2 == 0.0:
        raise InvalidStateError("ket must be a finite non-zero vector")
    p = np.outer(psi, psi.conj()) / nrm2
    # exact Hermitian symmetrization; outer() is Hermitian up to rounding only
    return PureState(0.5 * (p + p.conj().T))


def basis_state(n: int, k: int = 0) -> PureState:
    """Computational basis projector ``|k><k|``; ``k = 0`` gives ``diag(1, 0, ..., 0)``."""
    psi = np.zeros(n, dtype=np.complex128)
    psi[k] = 1.0
    return pure_state_from_ket(psi)


@dataclass(frozen=True, eq=False)
class MixedState:
    """Density matrix: Hermitian, unit trace, positive semidefinite."""

    density: np.ndarray

    def __post_init__(self):
        s = as_hermitian(self.density)
        object.__setattr__(self, "density", s)
        if abs(np.trace(s) - 1.0) > STATE_TOL:
            raise InvalidStateError(f"density trace is {np.trace(s).real:.12g}, expected 1")
        lo = float(np.linalg.eigvalsh(s)[0])
        if lo < -STATE_TOL:
            raise InvalidStateError(f"density has negative eigenvalue {lo:.3e}")

    @property
    def n(self) -> int:
        return self.density.shape[0]


@dataclass(frozen=True, eq=False)
class TangentVector:
    """``matrix = -i[generator, base.projector]``.

    Equality compares canonical generators, so two representatives of the
    same tangent vector compare equal.
    """

    base: PureState
    matrix: np.ndarray
    generator: np.ndarray

    def canonical_generator(self) -> np.ndarray:
        """Component of the generator orthogonal to the commutant of ``p``.

        For ``p = |psi><psi|`` that component is ``p A (1-p) + (1-p) A p``.
        """
        p = self.base.projector
        q = np.eye(p.shape[0]) - p
        a = self.generator
        return p @ a @ q + q @ a @ p

    def __eq__(self, other):
        if not isinstance(other, TangentVector):
            return NotImplemented
        if not self.base.same_point(other.base):
            return False
        return bool(
            np.linalg.norm(self.canonical_generator() - other.canonical_generator()) <= STATE_TOL
        )

    __hash__ = None


def _check_dims(a: np.ndarray, p: PureState):
    if a.shape != p.projector.shape:
        raise DimensionError(f"operator shape {a.shape} does not match state dimension {p.n}")


def tangent_from_generator(a, p: PureState) -> TangentVector:
    """Tangent vector ``-i[A, p]`` at ``p`` generated by Hermitian ``A``."""
    a = as_hermitian(a)
    _check_dims(a, p)
    v = -1j * commutator(a, p.projector)
    v.setflags(write=False)
    return TangentVector(p, v, a)


def hamiltonian_field(a, p: PureState) -> TangentVector:
    """Hamiltonian vector field of ``f_A`` evaluated at ``p``: ``-i[A, p]``."""
    return tangent_from_generator(a, p)


def _same_base(u: TangentVector, v: TangentVector) -> np.ndarray:
    if not u.base.same_point(v.base):
        raise BasePointMismatch("tangent vectors are based at different points")
    return u.base.projector


def symplectic_form(u: TangentVector, v: TangentVector, ctx: GeometryContext) -> float:
    p = _same_base(u, v)
    val = -1j * ctx.kappa * np.trace(p @ commutator(u.generator, v.generator))
    return float(val.real)


def fubini_study_metric(u: TangentVector, v: TangentVector, ctx: GeometryContext) -> float:
    p = _same_base(u, v)
    cu = commutator(u.generator, p)
    cv = commutator(v.generator, p)
    val = -ctx.kappa * np.trace(p @ (cu @ cv + cv @ cu))
    return float(val.real)


def observable_function(a, p: PureState, ctx: GeometryContext) -> float:
    """Phase-space function ``f_A(p) = kappa tr(A p) + (1 - kappa)/n tr(A)``."""
    a = as_hermitian(a)
    _check_dims(a, p)
    n = p.n
    val = ctx.kappa * np.trace(a @ p.projector) + (1.0 - ctx.kappa) / n * np.trace(a)
    return float(val.real)


def state_density(sigma: MixedState, p: PureState, ctx: GeometryContext) -> float:
    """Liouville density ``rho_sigma(p) = kappa' tr(sigma p) + (kappa - (n+1))/kappa``.

    No clamping: for small ``kappa`` the value can be negative.
    """
    _check_dims(sigma.density, p)
    n = p.n
    kp = n * (n + 1) / ctx.kappa
    val = kp * np.trace(sigma.density @ p.projector) + (ctx.kappa - (n + 1)) / ctx.kappa
    return float(val.real)


def poisson_bracket_generator(a, b) -> np.ndarray:
    """Generator of ``{f_A, f_B}``: the Hermitian operator ``-i[A, B]``."""
    a = as_hermitian(a)
    b = as_hermitian(b)
    out = -1j * commutator(a, b)
    return 0.5 * (out + out.conj().T)


def evolve_state(h, p: PureState, t: float) -> PureState:
    """Schrodinger evolution ``U p U^H`` with ``U = exp(-i H t)``."""
    u = matrix_exp(-1j * np.asarray(h, dtype=np.complex128), t)
    q = u @ p.projector @ u.conj().T
    return PureState(0.5 * (q + q.conj().T))


# --- Haar sampling ----------------------------------------------------------


def _chunk_sizes(count: int) -> list[int]:
    full, rest = divmod(count, HAAR_CHUNK)
    return [HAAR_CHUNK] * full + ([rest] if rest else [])


def _chunk_seeds(seed: int, nchunks: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(nchunks)


def _draw_kets(ss: np.random.SeedSequence, n: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(ss)
    z = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_kets(n: int, seed: int, count: int) -> np.ndarray:
    """Unit kets of Haar-random pure states, shape ``(count, n)``.

    Drawn in fixed-size chunks with seeds spawned from ``seed``, so the
    result does not depend on how many worker threads are used.
    """
    if n < 2:
        raise ValueError(f"Haar sampling needs n >= 2, got {n}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    sizes = _chunk_sizes(count)
    seeds = _chunk_seeds(seed, len(sizes))
    parts = ordered_map(lambda job: _draw_kets(job[0], n, job[1]), list(zip(seeds, sizes)))
    return np.concatenate(parts, axis=0)


def haar_sample(n: int, seed: int, count: int) -> list[PureState]:
    """``count`` Haar-random pure states, reproducible from ``seed``."""
    return [pure_state_from_ket(psi) for psi in haar_kets(n, seed, count)]


def _expectation_values(kets: np.ndarray, a: np.ndarray) -> np.ndarray:
    # <psi|A|psi> for each row; real for Hermitian A
    return np.einsum("si,ij,sj->s", kets.conj(), a, kets).real


def mc_expectation(
    a, sigma: MixedState, ctx: GeometryContext, samples: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo estimate of the phase-space integral of ``f_A * rho_sigma``.

    Returns ``(estimate, standard_error)``. The integral equals ``tr(A sigma)``
    for every ``kappa``.
    """
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    a = as_hermitian(a)
    if a.shape != sigma.density.shape:
        raise DimensionError("observable and state dimensions differ")
    n = a.shape[0]
    k = ctx.kappa
    kp = n * (n + 1) / k
    f_const = (1.0 - k) / n * float(np.trace(a).real)
    rho_const = (k - (n + 1)) / k
    sizes = _chunk_sizes(samples)
    seeds = _chunk_seeds(seed, len(sizes))

    def chunk(job):
        kets = _draw_kets(job[0], n, job[1])
        f = k * _expectation_values(kets, a) + f_const
        rho = kp * _expectation_values(kets, sigma.density) + rho_const
        return f * rho

    vals = np.concatenate(ordered_map(chunk, list(zip(seeds, sizes))))
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(vals.size))
    return est, se


def isometry_check(
    a,
    p: PureState,
    u: TangentVector,
    v: TangentVector,
    t: float,
    ctx: GeometryContext,
) -> float:
    """``|g_{p(t)}(u(t), v(t)) - g_p(u, v)|`` along the flow generated by ``A``.

    The flow ``p -> U p U^H``, ``U = exp(-i A t)``, pushes tangent vectors
    forward by conjugating their generators.
    """
    a = as_hermitian(a)
    _check_dims(a, p)
    _same_base(u, v)
    if not u.base.same_point(p):
        raise BasePointMismatch("tangent vectors are not based at p")
    U = matrix_exp(-1j * a, t)
    Uh = U.conj().T
    pt = U @ p.projector @ Uh
    pt = PureState(0.5 * (pt + pt.conj().T))

    def push(w: TangentVector) -> TangentVector:
        g = U @ w.generator @ Uh
        return tangent_from_generator(0.5 * (g + g.conj().T), pt)

    before = fubini_study_metric(u, v, ctx)
    after = fubini_study_metric(push(u), push(v), ctx)
    return abs(after - before)


def tangent_span_gram(vectors: Sequence[TangentVector], ctx: GeometryContext):
    """Gram matrices of the metric and of the symplectic form over ``vectors``."""
    k = len(vectors)
    g = np.empty((k, k))
    w = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            g[i, j] = fubini_study_metric(vectors[i], vectors[j], ctx)
            w[i, j] = symplectic_form(vectors[i], vectors[j], ctx)
    return g, w
