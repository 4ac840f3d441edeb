import numpy as np
import pytest

from helpers import (
    I2,
    X,
    Y,
    Z,
    exact_closure_dim,
    exact_commutant_dim,
    gell_mann,
    nn_coupling,
    rand_ket,
    random_generator_set,
)
from qgc.geometry import basis_state, haar_sample, pure_state_from_ket
from qgc.lie import (
    LieAlgebraBasis,
    UnclosedBasisError,
    analyze,
    centralizer,
    closure_defect,
    contains,
    identity_line,
    intersection,
    killing_pure_state_verdict,
    lie_closure,
    phi_dim,
    subspace_intersection_dim,
    unitary_algebra,
)
from qgc.operators import DimensionError, NotHermitianError, real_span_rank
from qgc.systems import ControlSystem

SU2 = [-1j * Z, -1j * X]
EMBEDDED = [-1j * gell_mann(1), -1j * gell_mann(3)]
NN3 = [-1j * np.diag([1.0, 2.0, 4.0]), -1j * nn_coupling(3)]


def _orthonormal(basis):
    g = basis.rows @ basis.rows.T
    return np.max(np.abs(g - np.eye(basis.dim))) <= 1e-10


@pytest.mark.parametrize(
    "gens",
    [SU2, SU2 + [-1j * I2], EMBEDDED, NN3, [-1j * np.diag([1.0, 3.0])]],
    ids=["su2", "u2", "embedded-su2", "nn3", "abelian"],
)
def test_closure_matches_exact_oracle(gens):
    basis = lie_closure(gens)
    assert basis.dim == exact_closure_dim(gens)
    assert basis.closed and _orthonormal(basis)
    assert closure_defect(basis) <= 1e-9


def test_closure_spans_pauli_algebra():
    basis = lie_closure(SU2)
    assert basis.dim == 3
    for m in (X, Y, Z):
        assert contains(basis, -1j * m)


def test_closure_single_diagonal_generator():
    assert lie_closure([-1j * np.diag([0.3, -1.2, 2.0])]).dim == 1


def test_closure_errors():
    with pytest.raises(ValueError):
        lie_closure([])
    with pytest.raises(NotHermitianError):
        lie_closure([X])
    with pytest.raises(DimensionError):
        lie_closure([-1j * X, -1j * np.eye(3)])


def test_closure_max_dim_truncates():
    basis = lie_closure(NN3, max_dim=4)
    assert basis.dim == 4 and not basis.closed
    with pytest.raises(UnclosedBasisError):
        killing_pure_state_verdict(basis, basis_state(3))


def test_contains_examples():
    basis = lie_closure(SU2)
    assert contains(basis, -1j * Y)
    assert not contains(basis, -1j * I2)
    assert contains(basis, np.zeros((2, 2)))


def test_closure_idempotent(rng):
    for n in (2, 3, 4):
        gens = random_generator_set(rng, n, 2, "block" if n > 2 else "traceless")
        first = lie_closure(gens)
        again = lie_closure(first.elements)
        assert again.dim == first.dim
        assert all(contains(first, e) for e in again.elements)
        assert all(contains(again, e) for e in first.elements)


def test_closure_order_and_scale_invariance(rng):
    gens = random_generator_set(rng, 4, 3, "symplectic")
    ref = lie_closure(gens).dim
    assert ref == 10
    for _ in range(50):
        perm = rng.permutation(len(gens))
        scaled = [gens[i] * rng.choice([-1, 1]) * rng.uniform(0.1, 10) for i in perm]
        assert lie_closure(scaled).dim == ref


def test_centralizer_examples():
    c2 = centralizer(basis_state(2))
    assert c2.dim == 2 == exact_commutant_dim([[1, 0], [0, 0]])
    assert contains(c2, 1j * np.diag([1.0, 0.0])) and contains(c2, 1j * np.diag([0.0, 1.0]))
    c3 = centralizer(basis_state(3))
    assert c3.dim == 5 == exact_commutant_dim([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert contains(c3, 1j * np.eye(3))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_centralizer_dimension_random(n):
    for p in haar_sample(n, 100 + n, 20):
        c = centralizer(p)
        assert c.dim == (n - 1) ** 2 + 1
        assert contains(c, 1j * np.eye(n))
        for e in c.elements:
            assert np.linalg.norm(e @ p.projector - p.projector @ e) <= 1e-10


def test_intersection_examples():
    su2 = lie_closure(SU2)
    assert subspace_intersection_dim(su2, su2) == 3
    lx = LieAlgebraBasis.from_operators([-1j * X], 2)
    lz = LieAlgebraBasis.from_operators([-1j * Z], 2)
    assert subspace_intersection_dim(lx, lz) == 0
    cap = intersection(su2, centralizer(basis_state(2)))
    assert subspace_intersection_dim(su2, centralizer(basis_state(2))) == cap.dim == 1
    assert contains(cap, -1j * Z)
    with pytest.raises(DimensionError):
        subspace_intersection_dim(su2, unitary_algebra(3))


def test_phi_dim_of_full_algebra():
    for n in range(2, 7):
        full = unitary_algebra(n)
        assert full.dim == n * n
        assert phi_dim(full) == n * n - 1
        assert full.dim - subspace_intersection_dim(full, identity_line(n)) == n * n - 1


def test_killing_verdict_examples():
    p2 = basis_state(2)
    assert killing_pure_state_verdict(lie_closure(SU2), p2) == (2, True)
    assert killing_pure_state_verdict(unitary_algebra(2), p2) == (2, True)
    diag = lie_closure([-1j * np.diag([1.0, 2.0, 5.0]), -1j * np.diag([0.0, 1.0, 0.0])])
    assert killing_pure_state_verdict(diag, basis_state(3)) == (0, False)


def test_analyze_examples():
    r = analyze(ControlSystem(Z, (X,)))
    assert (r.dim_L, r.operator_controllable, r.pure_state_controllable) == (3, False, True)
    assert r.killing_criterion_value == 2 and r.rank_condition_holds
    r = analyze(ControlSystem(Z, (X, I2)))
    assert (r.dim_L, r.operator_controllable) == (4, True)
    assert r.contains_identity_direction
    r = analyze(ControlSystem(gell_mann(1), (gell_mann(3),)))
    assert (r.dim_L, r.pure_state_controllable, r.operator_controllable) == (3, False, False)
    assert r.dim_L - r.dim_centralizer_intersection == 2
    r = analyze(ControlSystem(np.diag([1.0, 2.0, 4.0]), (nn_coupling(3),)))
    assert (r.dim_L, r.operator_controllable, r.pure_state_controllable) == (9, True, True)


def test_analyze_reports_symplectic_dimension(rng):
    gens = random_generator_set(rng, 4, 2, "symplectic")
    system = ControlSystem(1j * gens[0], (1j * gens[1],))
    r = analyze(system)
    assert r.dim_L == 10 and r.pure_state_controllable and not r.operator_controllable
    assert any("sp(2)" in d for d in r.diagnostics)


def test_analyze_probe_independence(rng):
    systems = [
        ControlSystem(Z, (X,)),
        ControlSystem(gell_mann(1), (gell_mann(3),)),
        ControlSystem(np.diag([1.0, 2.0, 4.0]), (nn_coupling(3),)),
    ]
    for s in systems:
        ref = analyze(s).pure_state_controllable
        for _ in range(20):
            p = pure_state_from_ket(rand_ket(rng, s.n))
            assert analyze(s, p).pure_state_controllable == ref


def test_from_operators_drops_dependent():
    b = LieAlgebraBasis.from_operators([-1j * X, -2j * X, -1j * Z], 2)
    assert b.dim == 2
    assert real_span_rank(b.elements) == 2
