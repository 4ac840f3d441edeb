"""Accessibility distribution ``C(p) = span{[T, p] : T in L}`` and the rank condition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .geometry import PureState, TangentVector, basis_state, haar_sample, tangent_from_generator
from .lie import LieAlgebraBasis, UnclosedBasisError, phi_dim, unitary_algebra
from .operators import DEFAULT_TOL, DimensionError, Tolerances, real_span_rank

__all__ = [
    "TangentSubspace",
    "RankConditionResult",
    "accessibility_distribution",
    "rank_condition",
    "corollary_check",
    "algebraic_rank_condition",
]


@dataclass(frozen=True, eq=False)
class TangentSubspace:
    base: PureState
    spanning_vectors: tuple[TangentVector, ...]
    rank: int


@dataclass(frozen=True, eq=False)
class RankConditionResult:
    holds: bool
    min_rank: int
    witness: PureState | None
    ranks: tuple[int, ...]
    points: tuple[PureState, ...]
    algebraic_holds: bool
    seed: int


def _require_closed(L: LieAlgebraBasis):
    if not L.closed:
        raise UnclosedBasisError("accessibility analysis requires a bracket-closed algebra")


def accessibility_distribution(
    L: LieAlgebraBasis, p: PureState, tol: Tolerances = DEFAULT_TOL
) -> TangentSubspace:
    """Tangent subspace at ``p`` swept out by the fields ``X_T(p) = [T, p]``, ``T in L``."""
    _require_closed(L)
    if p.n != L.dim_hilbert:
        raise DimensionError(f"state dimension {p.n} does not match algebra dimension {L.dim_hilbert}")
    # [T, p] = -i[iT, p]: the Hermitian generator of the tangent vector is iT
    vecs = []
    for t in L.elements:
        g = 1j * t
        vecs.append(tangent_from_generator(0.5 * (g + g.conj().T), p))
    rank = real_span_rank([v.matrix for v in vecs], tol) if vecs else 0
    return TangentSubspace(p, tuple(vecs), rank)


def algebraic_rank_condition(L: LieAlgebraBasis, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``L + span{iI} == u(n)``: the point-free form of the rank condition."""
    n = L.dim_hilbert
    return real_span_rank(list(L.elements) + [1j * np.eye(n)], tol) == n * n


def rank_condition(
    L: LieAlgebraBasis,
    n_samples: int = 32,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> RankConditionResult:
    """Check ``dim C(p) == 2n - 2`` at ``diag(1, 0, ..., 0)`` and ``n_samples`` Haar points.

    The first deficient point (basis point first, then samples in draw
    order) is returned as the witness.
    """
    _require_closed(L)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n = L.dim_hilbert
    full = 2 * n - 2
    points = [basis_state(n)] + (haar_sample(n, seed, n_samples) if n >= 2 else [])
    ranks = ordered_map(lambda q: accessibility_distribution(L, q, tol).rank, points)
    witness = next((q for q, r in zip(points, ranks) if r < full), None)
    return RankConditionResult(
        holds=witness is None,
        min_rank=min(ranks),
        witness=witness,
        ranks=tuple(ranks),
        points=tuple(points),
        algebraic_holds=algebraic_rank_condition(L, tol),
        seed=seed,
    )


def corollary_check(
    L: LieAlgebraBasis, trials: int = 8, seed: int = 0, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """Whether the fields of ``L`` make up every Killing field of projective space.

    Decided by ``dim phi(L) == n^2 - 1``; on ``trials`` random points the tangent
    span of ``L`` is also compared with that of the full unitary algebra.
    """
    _require_closed(L)
    n = L.dim_hilbert
    if phi_dim(L, tol) != n * n - 1:
        return False
    if n < 2:
        return True
    full = unitary_algebra(n)
    for q in haar_sample(n, seed, max(trials, 1)):
        mine = accessibility_distribution(L, q, tol)
        ref = accessibility_distribution(full, q, tol)
        joint = real_span_rank(
            [v.matrix for v in mine.spanning_vectors] + [v.matrix for v in ref.spanning_vectors],
            tol,
        )
        if not (mine.rank == ref.rank == joint):
            return False
    return True
