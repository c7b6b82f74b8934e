import numpy as np
import pytest

from opcalc.algebra import RefinedGridFunction, apply, represent, unrepresent
from opcalc.oracle import dense_matrix
from opcalc.schrodinger import (
    GAP_CONSTANT,
    SchrodingerConfig,
    alternating_sum,
    build_operator,
    classify_spectrum,
    error_report,
    l2_distance,
    solve_wavefunction,
    symbol,
)


def cfg(**kw):
    base = dict(lam=1.3, epsilon=0.7, V=(0.8, -0.5, 1.1), p=2)
    base.update(kw)
    return SchrodingerConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(epsilon=0.0)
    with pytest.raises(ValueError):
        cfg(p=0)
    with pytest.raises(ValueError):
        cfg(p=9)
    assert cfg(p=9, allow_large=True).h == pytest.approx(1 / 9)
    with pytest.raises(ValueError):
        cfg(V=(1.0, 2.0))


def test_symbol_at_origin_and_center():
    c = cfg()
    assert symbol(c, [0.0, 0.0, 0.0]) == pytest.approx(1.3 - 0.7j)
    assert symbol(c, [0.5, 0.5, 0.5]) == pytest.approx(1.3 - 0.7j - 12)


def test_single_cell_sampling():
    X = build_operator(cfg(p=1))
    assert X.coeffs[0, 0, 0] == pytest.approx(1.3 - 0.7j - 12)
    assert X.coeffs[1, 0, 0] == pytest.approx(-0.8)


def test_defect_free_blocks_are_diagonal():
    c = cfg(V=(0, 0, 0))
    R = represent(build_operator(c))
    D = R.blocks[0]
    np.testing.assert_array_equal(D, np.diag(np.diag(D)))
    for B in R.blocks:
        np.testing.assert_array_equal(B, D)


def test_defect_free_solution():
    c = cfg(V=(0, 0, 0), p=3)
    sol = solve_wavefunction(c)
    diag = np.diag(build_operator(c).coeffs[0])
    np.testing.assert_allclose(sol.cell_values, 1 / diag, rtol=1e-14)
    for a in range(1, 8):
        assert np.abs(sol.C[a]).max() < 1e-15


def test_top_block_pattern_p2():
    c = cfg()
    X = build_operator(c)
    # cells are digits (b1, b2, b3) with b1 fastest; K_i links cells equal off axis i
    d = np.array([[n % 2, n // 2 % 2, n // 4] for n in range(8)])
    K = [np.array([[all(d[n, j] == d[m, j] for j in range(3) if j != i) for m in range(8)] for n in range(8)]) for i in range(3)]
    expected = X.coeffs[0] - c.h * sum(v * k for v, k in zip(c.V, K))
    np.testing.assert_allclose(represent(X)[(1, 2, 3)], expected, atol=1e-15)
    # same operator seen through the dense realization
    rng = np.random.default_rng(0)
    v = rng.standard_normal(8 * 8) + 1j * rng.standard_normal(64)
    out = apply(X, RefinedGridFunction(X.geometry, 2, v)).values
    np.testing.assert_allclose(out, dense_matrix(X, 2).matrix @ v, atol=1e-13)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_blocks_are_shifted_hermitian(p):
    c = cfg(p=p)
    for B in represent(build_operator(c)).blocks:
        H = B + 1j * c.epsilon * np.eye(B.shape[0])
        assert np.abs(H - H.conj().T).max() <= 1e-13


@pytest.mark.parametrize("p", [1, 2, 4])
def test_residual_on_refined_grid(p):
    c = cfg(p=p)
    sol = solve_wavefunction(c)
    u = sol.on_grid(2)
    r = apply(build_operator(c), u).values - 1
    assert np.linalg.norm(r) <= 1e-9 * np.sqrt(r.size)


def test_coefficients_match_moebius_inversion():
    c = cfg(p=3)
    sol = solve_wavefunction(c)
    R = represent(build_operator(c))
    inv = R.map(lambda a, B: np.linalg.inv(B))
    ref = unrepresent(inv)
    for a in range(8):
        assert np.abs(sol.C[a] - ref.coeffs[a]).max() <= 1e-12


def test_alternating_sum_sign_pattern():
    # one-hot blocks reveal the sign attached to each subset
    blocks = np.eye(8).reshape(8, 1, 8)
    signs = alternating_sum(blocks, 0b111)[0]
    order = [7, 3, 5, 6, 1, 2, 4, 0]  # {1,2,3}, pairs, singletons, empty
    assert list(signs[order]) == [1, -1, -1, -1, 1, 1, 1, -1]
    assert np.count_nonzero(signs) == 8
    assert list(alternating_sum(blocks, 0b010)[0][[2, 0]]) == [1, -1]


def test_evaluator_is_cellwise():
    sol = solve_wavefunction(cfg(p=2))
    assert sol(np.array([0.1, 0.2, 0.3])) == sol.cell_values[0]
    assert sol(np.array([0.9, 0.2, 0.6])) == sol.cell_values[1 + 4]
    assert len(sol.C) == 8
    assert sol.bound_state_error == pytest.approx(GAP_CONSTANT * 0.5 / 0.49)


def test_fourier_zero_mode_is_mean():
    sol = solve_wavefunction(cfg(p=2))
    assert sol.fourier_coefficient([0, 0, 0]) == pytest.approx(sol.cell_values.mean())


def test_fourier_coefficient_against_quadrature():
    sol = solve_wavefunction(cfg(p=2))
    n = np.array([1, 0, -2])
    t = (np.arange(64) + 0.5) / 64
    k = np.stack(np.meshgrid(t, t, t, indexing="ij"), axis=-1).reshape(-1, 3)
    # midpoint rule on a fine grid, loose tolerance
    approx = np.mean(sol(k) * np.exp(-2j * np.pi * k @ n))
    assert sol.fourier_coefficient(n) == pytest.approx(approx, abs=1e-3)


def test_parseval_for_piecewise_constant():
    sol = solve_wavefunction(cfg(p=2))
    r = range(-12, 13)
    energy = sum(abs(sol.fourier_coefficient([a, b, c])) ** 2 for a in r for b in r for c in r)
    assert energy <= sol.l2_norm() ** 2 + 1e-12
    assert energy >= 0.9 * sol.l2_norm() ** 2


def test_refinement_cauchy_bound():
    for p in (1, 2, 4):
        c = cfg(p=p)
        d = l2_distance(solve_wavefunction(c), solve_wavefunction(cfg(p=2 * p)))
        assert d <= 2 * GAP_CONSTANT * c.h / c.epsilon**2


def test_l2_distance_exact_on_common_grid():
    a = solve_wavefunction(cfg(p=2))
    assert l2_distance(a, a) == 0
    b = solve_wavefunction(cfg(p=3))
    # refinement to the 6^3 grid leaves the norm unchanged
    fine = a.refined_cells(3)
    assert np.sqrt(np.mean(np.abs(fine) ** 2)) == pytest.approx(a.l2_norm())
    assert l2_distance(a, b) == pytest.approx(l2_distance(b, a))


def test_spectrum_labels():
    rep = classify_spectrum(cfg())
    assert list(rep.labeled_layers()) == ["volume", "planar", "guided", "local"]
    assert all(np.isclose(z.imag, -0.7) for z in rep.union)


def test_defect_free_has_only_volume_layer():
    layers = classify_spectrum(cfg(V=(0, 0, 0))).labeled_layers()
    assert layers["volume"].size > 0
    assert all(layers[k].size == 0 for k in ("planar", "guided", "local"))


def test_layers_shrink_with_tolerance():
    c = cfg(p=3)
    sizes = []
    for tol in (1e-10, 1e-3, 1e-1, 1.0, 5.0):
        rep = classify_spectrum(c, tol)
        sizes.append([v.size for v in rep.labeled_layers().values()])
    for small, large in zip(sizes, sizes[1:]):
        assert all(b <= a for a, b in zip(small, large))


def test_error_report():
    r = error_report(cfg(p=1, epsilon=1.0))
    assert r["operator_gap"] == pytest.approx(24 * np.pi)
    assert r["spectral_gap"] == pytest.approx(24 * np.pi)
    r2 = error_report(cfg(p=2, epsilon=1.0))
    assert r2["operator_gap"] == pytest.approx(r["operator_gap"] / 2)
    assert error_report(cfg(epsilon=1e6))["wavefunction_gap"] < 1e-9

