import numpy as np
import pytest

from conftest import floyd_warshall, random_connected_graph
from sparsestress import distances as dist
from sparsestress import graph as gmod
from sparsestress.errors import ConfigError, DegenerateDistanceError, DisconnectedGraphError


def test_mssp_path():
    pd = dist.mssp(gmod.path_graph(5), [0])
    np.testing.assert_array_equal(pd.dist[0], [0, 1, 2, 3, 4])


def test_mssp_weighted_path():
    g = gmod.from_edges(3, [(0, 1, 2.0), (1, 2, 3.0)])
    np.testing.assert_array_equal(dist.mssp(g, [2]).dist[0], [5, 3, 0])


def test_mssp_cycle_matches_floyd_warshall():
    g = gmod.cycle_graph(4)
    pd = dist.mssp(g, [0, 2])
    np.testing.assert_array_equal(pd.dist, [[0, 1, 2, 1], [2, 1, 0, 1]])
    np.testing.assert_array_equal(pd.dist, floyd_warshall(g)[[0, 2]])


@pytest.mark.parametrize("weighted", [False, True])
def test_mssp_oracle_random(rng, weighted):
    for _ in range(15):
        n = int(rng.integers(2, 31))
        g = random_connected_graph(rng, n, weighted=weighted)
        fw = floyd_warshall(g)
        pivots = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
        pd = dist.mssp(g, pivots)
        if weighted:
            np.testing.assert_allclose(pd.dist, fw[pivots], rtol=1e-9)
        else:
            np.testing.assert_array_equal(pd.dist, fw[pivots])
        assert np.all(pd.dist[np.arange(len(pivots)), pivots] == 0)


def test_mssp_triangle_sanity(rng):
    g = random_connected_graph(rng, 40, weighted=True)
    pivots = rng.choice(40, size=8, replace=False)
    pd = dist.mssp(g, pivots)
    dpp = pd.dist[:, pivots]
    # d_ip <= d_iq + d_qp for all nodes i and pivots p, q
    assert np.all(pd.dist[:, None, :] <= pd.dist[None, :, :] + dpp[:, :, None] + 1e-9)


def test_mssp_errors():
    g = gmod.path_graph(3)
    with pytest.raises(ConfigError):
        dist.mssp(g, [])
    with pytest.raises(ConfigError):
        dist.mssp(g, [1, 1])
    with pytest.raises(ConfigError):
        dist.mssp(g, [3])
    with pytest.raises(DisconnectedGraphError):
        dist.mssp(gmod.parse_edge_list("0 1\n2 3\n"), [0])


def regions_as_sets(r, k):
    return [set(r.region(p).tolist()) for p in range(k)]


def test_regions_path_tie_goes_to_lower_index():
    r = dist.build_regions(dist.mssp(gmod.path_graph(3), [0, 2]))
    assert regions_as_sets(r, 2) == [{0, 1}, {2}]


def test_regions_star_smallest_region():
    # center 0 with leaves 1..4, pivots at leaves 1 and 2
    g = gmod.star_graph(4)
    r = dist.build_regions(dist.mssp(g, [1, 2]))
    # hand simulation: 0 (d=1) ties, sizes 1/1 -> index 0; 3 (d=2) ties, sizes 2/1 -> index 1;
    # 4 (d=2) ties, sizes 2/2 -> index 0
    assert regions_as_sets(r, 2) == [{1, 0, 4}, {2, 3}]
    assert sorted(r.sizes().tolist()) == [2, 3]


def test_regions_all_pivots_singletons():
    g = gmod.cycle_graph(7)
    pivots = [3, 0, 6, 1, 5, 2, 4]
    r = dist.build_regions(dist.mssp(g, pivots))
    for p, v in enumerate(pivots):
        assert r.region(p).tolist() == [v]
        np.testing.assert_array_equal(r.region_dists(p), [0])


def check_region_invariants(pd, r):
    k, n = pd.dist.shape
    assert sorted(r.members.tolist()) == list(range(n))
    for p in range(k):
        mem = r.region(p)
        assert pd.pivots[p] in mem
        assert np.all(r.owner[mem] == p)
        d = r.region_dists(p)
        np.testing.assert_array_equal(d, np.sort(pd.dist[p, mem]))
        np.testing.assert_array_equal(pd.dist[p, mem], pd.dist[:, mem].min(axis=0))


@pytest.mark.parametrize("weighted", [False, True])
def test_region_invariants_random(rng, weighted):
    for _ in range(20):
        n = int(rng.integers(2, 60))
        g = random_connected_graph(rng, n, weighted=weighted)
        pd = dist.mssp(g, rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        check_region_invariants(pd, dist.build_regions(pd))


def fake_regions(region_dists):
    """One pivot (node 0) whose region holds nodes at the given distances."""
    d = np.asarray(region_dists, dtype=float)
    pd = dist.PivotDistances(np.array([0]), d[None, :])
    return pd, dist.build_regions(pd)


def test_adapted_weight_counts():
    pd, r = fake_regions([0, 1, 2, 3])
    assert dist.region_support(r, 0, 4.0) == 3
    assert dist.region_support(r, 0, 4.0) / 16 == 3 / 16


def test_adapted_weight_boundary_inclusive():
    _, r = fake_regions([0, 2, 2])
    assert dist.region_support(r, 0, 4.0) / 16 == 3 / 16


def test_adapted_weight_singleton_floor():
    g = gmod.path_graph(4)
    pd = dist.mssp(g, [0, 1, 2, 3])
    r = dist.build_regions(pd)
    for i in range(4):
        for p in range(4):
            if i != p:
                d = abs(i - p)
                assert dist.adapted_weight(i, p, pd, r) == 1 / d**2


def test_adapted_weight_degenerate():
    g = gmod.path_graph(3)
    pd = dist.mssp(g, [1])
    with pytest.raises(DegenerateDistanceError):
        dist.adapted_weight(1, 0, pd, dist.build_regions(pd))


def test_adapted_weight_integer_support_random(rng):
    for _ in range(10):
        n = int(rng.integers(3, 50))
        g = random_connected_graph(rng, n, weighted=True)
        pd = dist.mssp(g, rng.choice(n, size=int(rng.integers(1, n)), replace=False))
        r = dist.build_regions(pd)
        table = dist.adapted_weight_table(pd, r)
        sizes = r.sizes()
        for p in range(pd.k):
            for i in range(n):
                d = pd.dist[p, i]
                if d == 0:
                    assert table[p, i] == 0
                    continue
                w = dist.adapted_weight(i, p, pd, r)
                assert table[p, i] == w
                s = w * d * d
                # direct count oracle
                expect = sum(1 for j in r.region(p) if pd.dist[p, j] <= d / 2)
                assert round(s) == expect and 1 <= expect <= sizes[p]
                assert abs(s - expect) < 1e-9


def test_memory_is_kn(rng):
    g = random_connected_graph(rng, 200)
    pd = dist.mssp(g, np.arange(10))
    r = dist.build_regions(pd)
    assert pd.dist.shape == (10, 200)
    assert r.owner.shape == r.members.shape == r.sorted_member_dist.shape == (200,)
    assert r.member_ptr.shape == (11,)


def test_regions_csv(tmp_path):
    g = gmod.path_graph(3)
    pd = dist.mssp(g, [0, 2])
    path = tmp_path / "r.csv"
    dist.write_regions_csv(path, g, pd, dist.build_regions(pd))
    assert path.read_text().splitlines() == [
        "node,owner_pivot,dist_to_owner", "0,0,0.0", "1,0,1.0", "2,2,0.0"]
