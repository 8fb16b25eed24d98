import itertools
import warnings

import numpy as np
import pytest

from conftest import floyd_warshall, random_connected_graph
from sparsestress import graph as gmod
from sparsestress import pivotmds as pm
from sparsestress.distances import mssp_table
from sparsestress.errors import DegenerateLayoutError


def reflect_match(x, ref):
    """Smallest max-abs difference over axis sign flips."""
    best = np.inf
    for signs in itertools.product([1.0, -1.0], repeat=x.shape[1]):
        best = min(best, np.abs(x * signs - ref).max())
    return best


def procrustes_residual(x, ref):
    """Orthogonal Procrustes residual (rotations and reflections), relative."""
    a = x - x.mean(0)
    b = ref - ref.mean(0)
    u, _, vt = np.linalg.svd(a.T @ b)
    r = u @ vt
    return np.linalg.norm(a @ r - b) / max(np.linalg.norm(b), 1e-300)


def test_double_center_oracle(rng):
    c = rng.normal(size=(6, 4))
    j_n = np.eye(6) - 1 / 6
    j_p = np.eye(4) - 1 / 4
    np.testing.assert_allclose(pm.double_center(c), -0.5 * j_n @ c @ j_p, atol=1e-12)


def test_top_eigenvectors_oracle(rng):
    a = rng.normal(size=(8, 8))
    a = a @ a.T
    eig = pm.top_eigenvectors(a, 3, np.random.default_rng(0))
    vals, vecs = np.linalg.eigh(a)
    assert eig.converged
    np.testing.assert_allclose(eig.values, vals[::-1][:3], rtol=1e-8)
    for j in range(3):
        assert abs(abs(eig.vectors[:, j] @ vecs[:, -1 - j]) - 1) < 1e-8


def test_top_eigenvectors_cap_warns():
    a = np.diag([1.0, 0.999999, 0.5])
    eig = pm.top_eigenvectors(a, 1, np.random.default_rng(0), max_iters=3)
    assert not eig.converged and eig.iterations == 3


def test_path10_collinear():
    g = gmod.path_graph(10)
    x = pm.pivot_mds(g, pivots=10, seed=1).layout
    sv = np.linalg.svd(x - x.mean(0), compute_uv=False)
    assert sv[1] ** 2 < 0.01 * sv[0] ** 2
    ref = pm.classical_mds(floyd_warshall(g))
    assert reflect_match(x, ref) < 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_all_pivots_matches_classical_mds(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 50))
    g = random_connected_graph(rng, n, weighted=bool(seed % 2))
    x = pm.pivot_mds(g, pivots=n, seed=seed).layout
    ref = pm.classical_mds(floyd_warshall(g))
    assert procrustes_residual(x, ref) < 1e-6


def test_pivot_order_invariance(rng):
    g = random_connected_graph(rng, 40)
    piv = np.array([3, 17, 25, 8, 33, 0, 12])
    d = mssp_table(g, piv).T
    x1, _ = pm.pivot_mds_from_distances(d, 2, 0)
    perm = rng.permutation(len(piv))
    x2, _ = pm.pivot_mds_from_distances(d[:, perm], 2, 5)
    assert reflect_match(x2, x1) < 1e-6


def test_single_edge_after_rescale():
    g = gmod.path_graph(2)
    x = pm.rescale_to_edge_weights(pm.pivot_mds(g, seed=0).layout, g)
    assert np.linalg.norm(x[0] - x[1]) == pytest.approx(1.0, abs=1e-9)


def test_clamp_warns():
    with pytest.warns(UserWarning, match="clamped"):
        res = pm.pivot_mds(gmod.path_graph(5), pivots=200, seed=0)
    assert len(res.pivots) == 5


def test_dimension_three(rng):
    g = random_connected_graph(rng, 30, weighted=True)
    x = pm.pivot_mds(g, pivots=30, seed=0, dim=3).layout
    assert x.shape == (30, 3) and np.all(np.isfinite(x))
    ref = pm.classical_mds(floyd_warshall(g), dim=3)
    assert procrustes_residual(x, ref) < 1e-6


def test_pivot_mds_deterministic():
    g = gmod.complete_binary_tree(5)
    a = pm.pivot_mds(g, pivots=20, seed=3).layout
    b = pm.pivot_mds(g, pivots=20, seed=3).layout
    np.testing.assert_array_equal(a, b)


def test_rescale_examples():
    p2 = gmod.path_graph(2)
    x = pm.rescale_to_edge_weights(np.array([[0.0, 0.0], [2.0, 0.0]]), p2)
    np.testing.assert_allclose(x, [[0, 0], [1, 0]])

    tri = gmod.cycle_graph(3)
    h = np.sqrt(3.0)
    x0 = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, h]])
    np.testing.assert_allclose(pm.rescale_to_edge_weights(x0, tri), 0.5 * x0)

    w = gmod.from_edges(2, [(0, 1, 2.0)])
    x = pm.rescale_to_edge_weights(np.array([[0.0, 0.0], [1.0, 0.0]]), w)
    np.testing.assert_allclose(x, [[0, 0], [0.25, 0]])


def test_rescale_idempotent(rng):
    for _ in range(10):
        g = random_connected_graph(rng, 20, weighted=True)
        x = pm.rescale_to_edge_weights(rng.normal(size=(20, 2)), g)
        np.testing.assert_allclose(pm.rescale_to_edge_weights(x, g), x, rtol=1e-12, atol=1e-12)


def test_rescale_degenerate():
    with pytest.raises(DegenerateLayoutError):
        pm.rescale_to_edge_weights(np.zeros((3, 2)), gmod.path_graph(3))


def test_no_warnings_on_normal_run():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pm.pivot_mds(gmod.complete_binary_tree(6), pivots=50, seed=0)
