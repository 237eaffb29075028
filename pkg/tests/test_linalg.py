import numpy as np
import pytest
import sympy

from momentvar import catalog
from momentvar.linalg import (
    hermitian_eig,
    lstsq_min_norm,
    nullspace,
    orthonormal_range,
    subspace_contains,
)
from momentvar.structure import infinitesimal_action_matrix


def test_hermitian_eig_diagonal_cases():
    w = hermitian_eig(np.diag([-6.0, 0.0])).eigenvalues
    assert np.allclose(w, [-6.0, 0.0])
    w = hermitian_eig(np.eye(3)).eigenvalues
    assert np.allclose(w, [1.0, 1.0, 1.0])
    w = hermitian_eig(np.diag([-4.0, 2.0])).eigenvalues
    assert np.allclose(w, [-4.0, 2.0])


def test_hermitian_eig_rejects_bad_input():
    with pytest.raises(ValueError):
        hermitian_eig(np.ones((2, 3)))
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_eig_reconstruction(rng):
    for _ in range(500):
        n = int(rng.integers(1, 13))
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a = z + z.conj().T
        eig = hermitian_eig(a)
        v, w = eig.eigenvectors, eig.eigenvalues
        assert np.all(np.diff(w) >= 0)
        scale = np.linalg.norm(a)
        assert np.linalg.norm(a - v @ np.diag(w) @ v.conj().T) <= 1e-9 * max(scale, 1.0)
        assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-10 * n
        for i in range(n):
            assert np.linalg.norm(a @ v[:, i] - w[i] * v[:, i]) <= 1e-10 * max(scale, 1.0)


def test_nullspace_trivial_cases():
    assert nullspace(np.zeros((2, 2))).shape == (2, 2)
    assert nullspace(np.eye(3)).shape == (3, 0)
    with pytest.raises(ValueError):
        nullspace(np.zeros((0, 0)))
    with pytest.raises(ValueError):
        nullspace(np.eye(2), tol=0.0)


def test_nullspace_planted_kernels(rng):
    for _ in range(50):
        m, n = int(rng.integers(2, 10)), int(rng.integers(2, 10))
        k = int(rng.integers(0, n))
        a = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        basis = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
        # Force a at least rank-deficient by k: kill k directions.
        a = a - (a @ basis[:, :k]) @ basis[:, :k].conj().T
        kernel = nullspace(a)
        assert kernel.shape[1] >= k
        for j in range(kernel.shape[1]):
            assert np.linalg.norm(a @ kernel[:, j]) <= 1e-9 * max(np.linalg.norm(a), 1.0)
        assert np.linalg.norm(kernel.conj().T @ kernel - np.eye(kernel.shape[1])) <= 1e-10 * n


def test_nullspace_is_canonical(rng):
    # The basis depends only on the subspace, not on the matrix presenting it.
    a = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    b = np.array([[2.0, 2.0, 0.0], [3.0, 3.0, 7.0], [1.0, 1.0, 5.0]])
    k1, k2 = nullspace(a), nullspace(b)
    assert np.allclose(k1, k2)


def _symbolic_derivation_dim(relations, n):
    """Independent oracle: solve D(e_i e_j) = (D e_i) e_j + e_i (D e_j) with sympy."""
    c = {k: v for k, v in relations.items()}
    a = sympy.symbols(f"a0:{n * n}")
    A = sympy.Matrix(n, n, a)

    def prod(u, v):
        out = [sympy.S(0)] * n
        for (i, j, k), coeff in c.items():
            out[k - 1] += coeff * u[i - 1] * v[j - 1]
        return sympy.Matrix(out)

    eqs = []
    basis = [sympy.Matrix([1 if t == s else 0 for t in range(n)]) for s in range(n)]
    for i in range(n):
        for j in range(n):
            lhs = A * prod(basis[i], basis[j])
            rhs = prod(A * basis[i], basis[j]) + prod(basis[i], A * basis[j])
            eqs.extend(list(lhs - rhs))
    system = sympy.Matrix([[sympy.diff(e, v) for v in a] for e in eqs])
    return n * n - system.rank()


@pytest.mark.parametrize("name,expected", [("d1", 1), ("d5", 2)])
def test_nullspace_derivation_systems(name, expected):
    # Dimension frozen from the symbolic oracle, re-derived here.
    entry = catalog.catalog_get(name, dim=2)
    relations = {}
    nz = np.argwhere(entry.tensor.c != 0)
    for i, j, k in nz:
        relations[(i + 1, j + 1, k + 1)] = complex(entry.tensor.c[i, j, k])
    assert _symbolic_derivation_dim(relations, 2) == expected
    kernel = nullspace(infinitesimal_action_matrix(entry.tensor))
    assert kernel.shape[1] == expected
    system = infinitesimal_action_matrix(entry.tensor)
    for j in range(kernel.shape[1]):
        assert np.linalg.norm(system @ kernel[:, j]) <= 1e-9


def test_lstsq_min_norm_basics(rng):
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    x, res = lstsq_min_norm(np.eye(4), b)
    assert np.allclose(x, b) and res <= 1e-12
    x, res = lstsq_min_norm(np.zeros((3, 3)), np.zeros(3))
    assert np.allclose(x, 0.0) and res == 0.0


def test_lstsq_min_norm_nikolayevsky_gram():
    # Gram system over Der(d1) in dim 2 pins phi = diag(0, 1).
    entry = catalog.catalog_get("d1", dim=2)
    kernel = nullspace(infinitesimal_action_matrix(entry.tensor))
    basis = [kernel[:, j].reshape(2, 2) for j in range(kernel.shape[1])]
    gram = np.array([[np.trace(bi @ bj) for bj in basis] for bi in basis])
    target = np.array([np.trace(b) for b in basis])
    x, res = lstsq_min_norm(gram, target)
    phi = sum(xi * bi for xi, bi in zip(x, basis))
    assert res <= 1e-12
    assert np.allclose(np.sort(np.linalg.eigvals(phi).real), [0.0, 1.0])


def test_lstsq_min_norm_is_a_minimizer(rng):
    a = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
    b = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    x, res = lstsq_min_norm(a, b)
    for _ in range(100):
        perturbed = x + 1e-3 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
        assert np.linalg.norm(a @ perturbed - b) >= res - 1e-12


def test_subspace_helpers():
    basis = orthonormal_range(np.array([[1.0, 2.0], [0.0, 0.0], [1.0, 2.0]]))
    assert basis.shape == (3, 1)
    assert subspace_contains(basis, np.array([[3.0], [0.0], [3.0]]))
    assert not subspace_contains(basis, np.array([[1.0], [1.0], [0.0]]))
