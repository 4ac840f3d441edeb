"""Dynamical Lie algebras inside u(n) and the controllability verdicts built on them.

Subspaces of u(n) are carried as orthonormal bases under ``Re tr(A^H B)``,
i.e. as orthonormal rows of a real matrix acting on :func:`realvec`
vectorizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import mgs_residual
from .geometry import GeometryContext, PureState, basis_state
from .operators import (
    DEFAULT_TOL,
    DimensionError,
    Tolerances,
    as_antihermitian,
    from_realvec,
    real_span_rank,
    realvec,
)
from .systems import ControlSystem

__all__ = [
    "LieAlgebraBasis",
    "ControllabilityReport",
    "UnclosedBasisError",
    "lie_closure",
    "contains",
    "centralizer",
    "unitary_algebra",
    "identity_line",
    "intersection",
    "subspace_intersection_dim",
    "phi_dim",
    "killing_pure_state_verdict",
    "closure_defect",
    "analyze",
]


class UnclosedBasisError(ValueError):
    """An operation needs a bracket-closed basis."""


@dataclass(frozen=True, eq=False)
class LieAlgebraBasis:
    """Orthonormal real basis of a subspace of u(n).

    ``closed`` is true when the span is known to be closed under commutators.
    """

    dim_hilbert: int
    rows: np.ndarray  # (k, 2 n^2) orthonormal real vectorizations
    closed: bool = False
    diagnostics: tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64).reshape(-1, 2 * self.dim_hilbert**2)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def __len__(self) -> int:
        return self.dim

    @property
    def elements(self) -> list[np.ndarray]:
        return [from_realvec(r, self.dim_hilbert) for r in self.rows]

    @classmethod
    def from_operators(
        cls, ops: Sequence, n: int, closed: bool = False, tol: Tolerances = DEFAULT_TOL
    ) -> "LieAlgebraBasis":
        """Orthonormalize ``ops`` (dropping dependent ones) into a basis."""
        rows = _Orthonormalizer(n)
        for op in ops:
            x = realvec(op)
            rows.try_add(x, tol.rank_tol * max(1.0, float(np.linalg.norm(x))))
        return cls(n, rows.view(), closed=closed)


@dataclass(frozen=True)
class ControllabilityReport:
    n: int
    dim_L: int
    contains_identity_direction: bool
    dim_centralizer_intersection: int
    operator_controllable: bool
    pure_state_controllable: bool
    killing_criterion_value: int
    killing_pure_state_controllable: bool
    rank_condition_holds: bool
    corollary_holds: bool
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dim_L": self.dim_L,
            "contains_identity_direction": self.contains_identity_direction,
            "dim_centralizer_intersection": self.dim_centralizer_intersection,
            "operator_controllable": self.operator_controllable,
            "pure_state_controllable": self.pure_state_controllable,
            "killing_criterion_value": self.killing_criterion_value,
            "killing_pure_state_controllable": self.killing_pure_state_controllable,
            "rank_condition_holds": self.rank_condition_holds,
            "corollary_holds": self.corollary_holds,
            "diagnostics": list(self.diagnostics),
        }


class _Orthonormalizer:
    """Growing orthonormal row set with MGS (two passes) acceptance."""

    def __init__(self, n: int):
        self.n = n
        self.d = 2 * n * n
        self.cap = n * n
        self.buf = np.zeros((self.cap, self.d))
        self.k = 0

    def residual(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        r = np.array(x, dtype=np.float64)
        nrm = mgs_residual(self.buf, self.k, r)
        return r, nrm

    def try_add(self, x: np.ndarray, thresh: float) -> tuple[bool, float]:
        if self.k >= self.cap:
            return False, 0.0
        r, nrm = self.residual(x)
        if nrm <= thresh:
            return False, nrm
        r /= nrm
        # one extra pass keeps orthonormality at machine precision
        nrm2 = mgs_residual(self.buf, self.k, r)
        self.buf[self.k] = r / nrm2
        self.k += 1
        return True, nrm

    def view(self) -> np.ndarray:
        return self.buf[: self.k].copy()


def _bracket_vec(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    a = from_realvec(x, n)
    b = from_realvec(y, n)
    return realvec(a @ b - b @ a)


def lie_closure(
    generators: Sequence,
    tol: Tolerances = DEFAULT_TOL,
    max_dim: int | None = None,
) -> LieAlgebraBasis:
    """Smallest Lie subalgebra of u(n) containing the anti-Hermitian ``generators``.

    Breadth-first: each sweep brackets every new element with every older and
    every other new element, keeps normalized residuals above the cutoff, and
    stops when a sweep adds nothing or the dimension reaches ``max_dim``
    (default ``n**2``).
    """
    gens = list(generators)
    if not gens:
        raise ValueError("lie_closure needs at least one generator")
    first = as_antihermitian(gens[0], tol=tol)
    n = first.shape[0]
    mats = [first] + [as_antihermitian(g, dim=n, tol=tol) for g in gens[1:]]
    cap = n * n if max_dim is None else min(int(max_dim), n * n)

    onb = _Orthonormalizer(n)
    gnorm = max(float(np.linalg.norm(m)) for m in mats)
    seed_thresh = tol.rank_tol * max(gnorm, np.finfo(float).tiny)
    # basis elements are unit vectors, so brackets live on unit scale
    bracket_thresh = tol.rank_tol
    diagnostics: list[str] = []

    def note(nrm: float, thresh: float, what: str):
        if thresh / 10 < nrm <= 10 * thresh:
            diagnostics.append(
                f"near-threshold residual {nrm:.3e} (cutoff {thresh:.3e}) while adding {what}"
            )

    for idx, m in enumerate(mats):
        if onb.k >= cap:
            break
        _, nrm = onb.try_add(realvec(m), seed_thresh)
        note(nrm, seed_thresh, f"generator {idx}")

    start = 0
    while onb.k < cap:
        stop = onb.k
        if stop == start:
            break
        for j in range(start, stop):
            for i in range(j):
                if onb.k >= cap:
                    break
                c = _bracket_vec(onb.buf[i], onb.buf[j], n)
                _, nrm = onb.try_add(c, bracket_thresh)
                note(nrm, bracket_thresh, f"bracket ({i},{j})")
        start = stop

    closed = onb.k < cap or cap == n * n
    if not closed:
        diagnostics.append(f"closure stopped at max_dim={cap} before closing")
    return LieAlgebraBasis(n, onb.view(), closed=closed, diagnostics=tuple(diagnostics))


def _coerce_dim(basis: LieAlgebraBasis, t: np.ndarray):
    if t.shape != (basis.dim_hilbert, basis.dim_hilbert):
        raise DimensionError(f"operator shape {t.shape} does not match n={basis.dim_hilbert}")


def projection_residual(basis: LieAlgebraBasis, t) -> float:
    t = np.asarray(t, dtype=np.complex128)
    _coerce_dim(basis, t)
    x = realvec(t)
    q = np.ascontiguousarray(basis.rows)
    return mgs_residual(q, q.shape[0], x)


def contains(basis: LieAlgebraBasis, t, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``t`` lies in the real span of ``basis`` (relative residual test)."""
    t = as_antihermitian(t, tol=tol)
    res = projection_residual(basis, t)
    return res <= tol.rank_tol * float(np.linalg.norm(t))


def unitary_algebra(n: int) -> LieAlgebraBasis:
    """Orthonormal basis of all of u(n)."""
    ops = []
    for j in range(n):
        e = np.zeros((n, n), dtype=np.complex128)
        e[j, j] = 1j
        ops.append(e)
    s = 1.0 / np.sqrt(2.0)
    for j in range(n):
        for k in range(j + 1, n):
            a = np.zeros((n, n), dtype=np.complex128)
            a[j, k], a[k, j] = s, -s
            b = np.zeros((n, n), dtype=np.complex128)
            b[j, k], b[k, j] = 1j * s, 1j * s
            ops.extend([a, b])
    rows = np.stack([realvec(o) for o in ops])
    return LieAlgebraBasis(n, rows, closed=True)


def identity_line(n: int) -> LieAlgebraBasis:
    """span{iI}, the kernel of T -> (p -> [T, p])."""
    return LieAlgebraBasis(n, realvec(1j * np.eye(n) / np.sqrt(n))[None, :], closed=True)


def _null_space(m: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical null space of ``m``."""
    ncols = m.shape[1]
    if m.size == 0:
        return np.eye(ncols)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    scale = max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.count_nonzero(s > rel_tol * scale))
    return vh[rank:].conj().T


def centralizer(p: PureState, tol: Tolerances = DEFAULT_TOL) -> LieAlgebraBasis:
    """Basis of ``{T in u(n) : [T, iP] = 0}``, from the null space of ``T -> [T, P]``."""
    n = p.n
    full = unitary_algebra(n)
    P = p.projector
    cols = []
    for e in full.elements:
        cols.append(realvec(e @ P - P @ e))
    m = np.stack(cols, axis=1)
    null = _null_space(m, tol.rank_tol)
    rows = null.T @ full.rows  # orthonormal because full.rows is orthonormal
    return LieAlgebraBasis(n, rows, closed=True)


def _check_same_n(b1: LieAlgebraBasis, b2: LieAlgebraBasis):
    if b1.dim_hilbert != b2.dim_hilbert:
        raise DimensionError(f"Hilbert dimensions differ: {b1.dim_hilbert} vs {b2.dim_hilbert}")


def subspace_intersection_dim(
    b1: LieAlgebraBasis, b2: LieAlgebraBasis, tol: Tolerances = DEFAULT_TOL
) -> int:
    """``dim B1 + dim B2 - dim(B1 + B2)``."""
    _check_same_n(b1, b2)
    union = list(b1.rows) + list(b2.rows)
    if not union:
        return 0
    s = np.linalg.svd(np.stack(union), compute_uv=False)
    # rows are unit vectors, so the absolute cutoff is also relative
    rank = int(np.count_nonzero(s > tol.rank_tol))
    return b1.dim + b2.dim - rank


def intersection(
    b1: LieAlgebraBasis, b2: LieAlgebraBasis, tol: Tolerances = DEFAULT_TOL
) -> LieAlgebraBasis:
    """Orthonormal basis of ``span B1 ∩ span B2``.

    Solves ``a . B1 = b . B2`` via the null space of ``[B1; -B2]``, with the
    same singular-value cutoff as :func:`subspace_intersection_dim`.
    """
    _check_same_n(b1, b2)
    n = b1.dim_hilbert
    closed = b1.closed and b2.closed
    if b1.dim == 0 or b2.dim == 0:
        return LieAlgebraBasis(n, np.zeros((0, 2 * n * n)), closed=closed)
    stacked = np.concatenate([b1.rows, -b2.rows])
    _, s, vh = np.linalg.svd(stacked.T, full_matrices=True)
    s_full = np.zeros(stacked.shape[0])
    s_full[: s.size] = s
    null = vh[s_full <= tol.rank_tol]
    if null.shape[0] == 0:
        return LieAlgebraBasis(n, np.zeros((0, 2 * n * n)), closed=closed)
    rows = null[:, : b1.dim] @ b1.rows
    rows = np.linalg.qr(rows.T)[0].T
    return LieAlgebraBasis(n, rows, closed=closed)


def phi_dim(basis: LieAlgebraBasis, tol: Tolerances = DEFAULT_TOL) -> int:
    """Dimension of the image of ``T -> X_T``, where ``X_T(p) = [T, p]``.

    ``X_T`` vanishes identically exactly when ``T`` is a multiple of ``iI``,
    so the image is isomorphic to the traceless parts of the span.
    """
    n = basis.dim_hilbert
    eye = np.eye(n)
    traceless = [e - np.trace(e) / n * eye for e in basis.elements]
    return real_span_rank(traceless, tol) if traceless else 0


def _require_closed(basis: LieAlgebraBasis):
    if not basis.closed:
        raise UnclosedBasisError("operation requires a bracket-closed Lie algebra basis")


def killing_pure_state_verdict(
    L: LieAlgebraBasis, p: PureState, tol: Tolerances = DEFAULT_TOL
) -> tuple[int, bool]:
    """Pure-state test phrased in Killing fields.

    Returns ``dim phi(L) - dim phi(L ∩ c_p)`` and whether it equals ``2n - 2``.
    """
    _require_closed(L)
    if p.n != L.dim_hilbert:
        raise DimensionError("state and algebra dimensions differ")
    stab = intersection(L, centralizer(p, tol), tol)
    value = phi_dim(L, tol) - phi_dim(stab, tol)
    return value, value == 2 * p.n - 2


def closure_defect(basis: LieAlgebraBasis) -> float:
    """Largest residual of ``[e_i, e_j]`` outside the span (post-hoc closure check)."""
    worst = 0.0
    n = basis.dim_hilbert
    q = np.ascontiguousarray(basis.rows)
    for j in range(basis.dim):
        for i in range(j):
            c = _bracket_vec(q[i], q[j], n)
            worst = max(worst, mgs_residual(q, q.shape[0], c))
    return worst


def analyze(
    system: ControlSystem,
    p: PureState | None = None,
    ctx: GeometryContext | None = None,
    tol: Tolerances | None = None,
) -> ControllabilityReport:
    """Operator and pure-state controllability of ``system``.

    Pure-state controllability is decided by ``dim L - dim(L ∩ c_P) == 2n - 2``
    and cross-checked against the Killing-field formulation.
    """
    n = system.n
    if tol is None:
        tol = ctx.tol if ctx is not None else DEFAULT_TOL
    if p is None:
        p = basis_state(n)
    if p.n != n:
        raise DimensionError(f"probe state has dimension {p.n}, system has {n}")
    L = lie_closure(system.generators(), tol)
    diags = list(L.diagnostics)
    c_p = centralizer(p, tol)
    dim_int = subspace_intersection_dim(L, c_p, tol)
    has_identity = contains(L, 1j * np.eye(n), tol)
    value, killing_ok = killing_pure_state_verdict(L, p, tol)
    pure_ok = L.dim - dim_int == 2 * n - 2
    if killing_ok != pure_ok or value != L.dim - dim_int:
        diags.append(
            f"criteria disagree: dim L - dim(L∩c_P) = {L.dim - dim_int}, Killing value = {value}"
        )
    extended = real_span_rank(list(L.elements) + [1j * np.eye(n)], tol)
    rank_ok = extended == n * n
    phi = phi_dim(L, tol)
    if n % 2 == 0 and L.dim == n * (n + 1) // 2:
        diags.append(
            f"dim L = {L.dim} equals dim sp({n // 2}); isomorphism not tested"
        )
    return ControllabilityReport(
        n=n,
        dim_L=L.dim,
        contains_identity_direction=bool(has_identity),
        dim_centralizer_intersection=dim_int,
        operator_controllable=L.dim == n * n,
        pure_state_controllable=pure_ok,
        killing_criterion_value=value,
        killing_pure_state_controllable=killing_ok,
        rank_condition_holds=rank_ok,
        corollary_holds=phi == n * n - 1,
        diagnostics=tuple(diags),
    )
