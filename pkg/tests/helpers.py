"""Random-instance generators and independent oracles for the test suite.

The oracles here deliberately avoid the package's own numerics: closure
dimensions come from exact Gaussian-integer bracket enumeration in sympy,
Haar moments from deterministic quadrature on the Bloch sphere.
"""

import itertools

import numpy as np
import sympy

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def gell_mann(k: int) -> np.ndarray:
    """Gell-Mann matrix lambda_k, k = 1..8."""
    m = np.zeros((3, 3), dtype=complex)
    if k == 1:
        m[0, 1] = m[1, 0] = 1
    elif k == 2:
        m[0, 1], m[1, 0] = -1j, 1j
    elif k == 3:
        m[0, 0], m[1, 1] = 1, -1
    elif k == 4:
        m[0, 2] = m[2, 0] = 1
    elif k == 5:
        m[0, 2], m[2, 0] = -1j, 1j
    elif k == 6:
        m[1, 2] = m[2, 1] = 1
    elif k == 7:
        m[1, 2], m[2, 1] = -1j, 1j
    elif k == 8:
        m = np.diag([1, 1, -2]).astype(complex) / np.sqrt(3)
    return m


def nn_coupling(n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    for j in range(n - 1):
        m[j, j + 1] = m[j + 1, j] = 1
    return m


def rand_herm(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def rand_antiherm(rng, n):
    return 1j * rand_herm(rng, n)


def rand_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_ket(rng, n):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


def rand_density(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    s = g @ g.conj().T
    return s / np.trace(s).real


def symplectic_J(n):
    k = n // 2
    j = np.zeros((n, n))
    j[:k, k:] = np.eye(k)
    j[k:, :k] = -np.eye(k)
    return j


def random_generator_set(rng, n, size, family):
    """Anti-Hermitian generators drawn from a chosen subalgebra family, randomly conjugated."""
    gens = []
    for _ in range(size):
        if family == "generic":
            g = rand_antiherm(rng, n)
        elif family == "traceless":
            g = rand_antiherm(rng, n)
            g = g - np.trace(g) / n * np.eye(n)
        elif family == "diagonal":
            g = 1j * np.diag(rng.normal(size=n))
        elif family == "block":
            g = np.zeros((n, n), dtype=complex)
            g[:2, :2] = rand_antiherm(rng, 2)
        elif family == "orthogonal":
            a = rng.normal(size=(n, n))
            g = (a - a.T).astype(complex)
        elif family == "symplectic":
            J = symplectic_J(n)
            a = rand_antiherm(rng, n)
            g = 0.5 * (a - J.T @ a.T @ J)
        else:
            raise ValueError(family)
        gens.append(g)
    u = rand_unitary(rng, n)
    return [u @ g @ u.conj().T for g in gens]


# --- exact closure oracle -----------------------------------------------


def _to_sympy(m):
    m = np.asarray(m)
    rows = []
    for row in m:
        out = []
        for z in row:
            re, im = float(z.real), float(z.imag)
            if re != round(re) or im != round(im):
                raise ValueError("oracle needs Gaussian-integer entries")
            out.append(sympy.Integer(int(round(re))) + sympy.I * sympy.Integer(int(round(im))))
        rows.append(out)
    return sympy.Matrix(rows)


def _real_row(m):
    vals = [sympy.expand(z) for z in m]
    return [sympy.re(z) for z in vals] + [sympy.im(z) for z in vals]


def exact_closure_dim(generators, max_depth=12):
    """Dimension of the Lie algebra generated by integer-entry matrices.

    Enumerates left-normed brackets [g_i1, [g_i2, ... g_ik]] by depth with exact
    arithmetic and stops once a whole depth adds no new direction.
    """
    gens = [_to_sympy(g) for g in generators]
    rows = []
    rank = 0
    level = list(gens)
    for _ in range(max_depth):
        rows.extend(_real_row(w) for w in level)
        new_rank = sympy.Matrix(rows).rank()
        if new_rank == rank:
            return rank
        rank = new_rank
        level = [g * w - w * g for g, w in itertools.product(gens, level)]
        level = [w for w in level if any(z != 0 for z in w)]
        if not level:
            return rank
    raise RuntimeError("oracle did not stabilize")


def exact_commutant_dim(p_int):
    """Real dimension of {T anti-Hermitian : [T, P] = 0} for an integer projector."""
    n = len(p_int)
    P = sympy.Matrix(p_int)
    syms = sympy.symbols(f"x0:{n * n}", real=True)
    # parametrize u(n): iD on the diagonal, a+ib / -a+ib off-diagonal
    T = sympy.zeros(n, n)
    k = 0
    for j in range(n):
        T[j, j] = sympy.I * syms[k]
        k += 1
    params = []
    for j in range(n):
        for l in range(j + 1, n):
            a = sympy.Symbol(f"a{j}{l}", real=True)
            b = sympy.Symbol(f"b{j}{l}", real=True)
            params += [a, b]
            T[j, l] = a + sympy.I * b
            T[l, j] = -a + sympy.I * b
    variables = list(syms[:n]) + params
    C = T * P - P * T
    eqs = []
    for z in C:
        eqs += [sympy.re(sympy.expand(z)), sympy.im(sympy.expand(z))]
    A = sympy.Matrix([[sympy.diff(e, v) for v in variables] for e in eqs])
    return len(variables) - A.rank()


# --- Haar second moment on the Bloch sphere -----------------------------


def bloch_quadrature_second_moment(a, b, nodes=24):
    """Mean of tr(A p) tr(B p) over the uniform Bloch sphere (n = 2).

    p = (I + r.sigma)/2; Gauss-Legendre in cos(theta), trapezoid in phi.
    The integrand is a degree-2 polynomial in r, so this is exact to rounding.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    phis = 2 * np.pi * np.arange(2 * nodes) / (2 * nodes)
    total = 0.0
    for c, wc in zip(x, w):
        s = np.sqrt(1 - c * c)
        for ph in phis:
            r = (s * np.cos(ph), s * np.sin(ph), c)
            p = 0.5 * (I2 + r[0] * X + r[1] * Y + r[2] * Z)
            total += wc * np.trace(a @ p).real * np.trace(b @ p).real
    # weights: sum(w) = 2 in cos(theta), 2*nodes equal phi points
    return total / (2.0 * 2 * nodes)
