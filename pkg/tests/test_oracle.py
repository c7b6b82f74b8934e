import numpy as np
import pytest

from opcalc import calculus as calc
from opcalc.algebra import (
    AlgebraElement,
    PartitionGeometry,
    RefinedGridFunction,
    adjoint,
    apply,
    make_elementary,
    multiply,
    represent,
)
from opcalc.errors import SizeGuardExceeded
from opcalc.oracle import (
    block_spectrum_multiset,
    dense_matrix,
    match_multisets,
    oracle_norm,
    oracle_spectrum,
    projector,
    verify,
)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_identity_is_identity_matrix(q):
    g = PartitionGeometry.uniform(2, 2, M=2)
    D = dense_matrix(AlgebraElement.identity(g), q).matrix
    np.testing.assert_array_equal(D, np.eye(g.side * q**2))


def test_averaging_matrix(unit_interval):
    X = make_elementary(unit_interval, 0, 0, [1], [[1.0]])
    np.testing.assert_allclose(dense_matrix(X, 2).matrix, 0.5 * np.ones((2, 2)))


def test_columns_are_images_of_unit_vectors(make_random):
    X = make_random(2, 2, 2)
    q = 2
    D = dense_matrix(X, q).matrix
    n = D.shape[0]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1
        np.testing.assert_allclose(apply(X, RefinedGridFunction(X.geometry, q, e)).values, D[:, j], atol=1e-15)


def test_dense_homomorphism(make_random):
    X = make_random(3, 2, 1)
    Y = AlgebraElement(X.geometry, np.random.default_rng(3).standard_normal(X.coeffs.shape))
    for q in (1, 2):
        lhs = dense_matrix(multiply(X, Y), q).matrix
        rhs = dense_matrix(X, q).matrix @ dense_matrix(Y, q).matrix
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1, np.abs(rhs).max())


def test_adjoint_is_conjugate_transpose_exactly(make_random):
    X = make_random(2, 3, 2)
    for q in (1, 2, 3):
        assert np.array_equal(dense_matrix(adjoint(X), q).matrix, dense_matrix(X, q).matrix.conj().T)


def test_size_guard(make_random, monkeypatch):
    X = make_random(3, 4, 2)
    with pytest.raises(SizeGuardExceeded):
        dense_matrix(X, 2, max_side=32)
    dense_matrix(X, 1)
    monkeypatch.setenv("OPCALC_MAX_DENSE", "16")
    with pytest.raises(SizeGuardExceeded):
        dense_matrix(X, 2)


# -- projectors -------------------------------------------------------------


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("q", [2, 3])
def test_projector_algebra(N, q):
    g = PartitionGeometry.uniform(N, 1, M=2)
    P = [projector(g, a, q).matrix for a in range(1 << N)]
    total = sum(P)
    np.testing.assert_allclose(total, np.eye(total.shape[0]), atol=1e-12)
    for a in range(1 << N):
        np.testing.assert_allclose(P[a], P[a].conj().T, atol=0)
        for b in range(1 << N):
            expected = P[a] if a == b else 0
            np.testing.assert_allclose(P[a] @ P[b], expected, atol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_projector_ranks(N):
    g = PartitionGeometry.uniform(N, 2, M=2) if N < 3 else PartitionGeometry.uniform(N, 1, M=2)
    for q in (2, 3):
        for a in range(1 << N):
            r = np.linalg.matrix_rank(projector(g, a, q).matrix)
            card = bin(a).count("1")
            assert r == g.side * (q - 1) ** (N - card)


def test_projector_image_is_constant_along_alpha():
    g = PartitionGeometry.uniform(2, 1)
    P = projector(g, [1], 2).matrix
    # subcell index t1 + 2 t2: constant in t1, mean zero in t2
    v = P @ np.arange(1.0, 5.0)
    assert v[0] == pytest.approx(v[1]) and v[2] == pytest.approx(v[3])
    assert v[0] + v[2] == pytest.approx(0)


def test_block_diagonalization(make_random):
    X = make_random(2, 2, 1)
    q = 3
    D = dense_matrix(X, q).matrix
    R = represent(X)
    for a in range(4):
        P = projector(X.geometry, a, q).matrix
        np.testing.assert_allclose(D @ P, P @ D, atol=1e-12)
        # compression onto the image: eigenvalues of B_alpha with multiplicity
        w, V = np.linalg.eigh(P)
        basis = V[:, w > 0.5]
        C = basis.conj().T @ D @ basis
        mult = (q - 1) ** (2 - bin(a).count("1"))
        expected = np.tile(np.linalg.eigvals(R.blocks[a]), mult)
        assert match_multisets(np.linalg.eigvals(C), expected) < 1e-9


# -- spectrum and norm ------------------------------------------------------


def test_spectrum_matches_block_union(make_random):
    for _ in range(5):
        X = make_random(2, 2, 1)
        assert match_multisets(oracle_spectrum(X, 2), block_spectrum_multiset(X, 2)) < 1e-9


def test_multiplicity_law_q3():
    g = PartitionGeometry.uniform(1, 2)
    X = AlgebraElement(g, {(): [[1.0, 0.0], [0.0, 2.0]], (1,): [[0.5, 1.0], [0.0, 3.0]]})
    R = represent(X)
    got = oracle_spectrum(X, 3)
    expected = np.concatenate([np.linalg.eigvals(R[(1,)]), np.tile(np.linalg.eigvals(R[()]), 2)])
    assert match_multisets(got, expected) < 1e-12


def test_zero_spectrum():
    g = PartitionGeometry.uniform(2, 2)
    np.testing.assert_array_equal(oracle_spectrum(AlgebraElement.zero(g)), 0)


def test_norm_matches(make_random):
    for _ in range(5):
        X = make_random(3, 2, 2)
        assert oracle_norm(X) == pytest.approx(calc.operator_norm(X), rel=1e-9)


def test_matching_handles_size_and_clusters():
    assert match_multisets([1, 2], [1]) == np.inf
    assert match_multisets([], []) == 0
    # one-to-one: a doubled eigenvalue cannot absorb a distinct one
    assert match_multisets([1.0, 1.0, 2.0], [2.0, 1.0, 1.0 + 1e-12]) < 1e-11
    assert match_multisets([1.0, 1.0, 2.0], [1.0, 2.0, 2.0]) == pytest.approx(1.0)


# -- verify -----------------------------------------------------------------


def test_verify_passes_on_random(make_random):
    for q in (2, 3):
        report = verify(make_random(2, 3, 2), q=q)
        assert report["passed"], report
        assert set(report["checks"]) == {"roundtrip", "apply", "spectrum", "norm", "adjoint", "homomorphism"}
