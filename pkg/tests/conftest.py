import itertools
import math

import numpy as np
import pytest

from sparsestress import graph as gmod


def random_connected_graph(rng, n, extra=None, weighted=False):
    """Random spanning tree plus ``extra`` random chords."""
    edges = []
    for v in range(1, n):
        edges.append((v, int(rng.integers(v))))
    extra = n // 2 if extra is None else extra
    for _ in range(extra):
        u, v = rng.integers(n, size=2)
        edges.append((int(u), int(v)))
    if weighted:
        # lengths in [1, 2) keep every edge a shortest path
        edges = [(u, v, float(rng.uniform(1.0, 2.0))) for u, v in edges]
    return gmod.from_edges(n, edges)


def floyd_warshall(g):
    n = g.node_count
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, w in g.edges():
        d[u, v] = d[v, u] = min(d[u, v], w)
    for m in range(n):
        d = np.minimum(d, d[:, m:m + 1] + d[m:m + 1, :])
    return d


def naive_stress(x, d):
    n = len(x)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dist = math.dist(x[i], x[j])
            total += (dist - d[i][j]) ** 2 / d[i][j] ** 2
    return total


def naive_gabriel(x, tol):
    n = len(x)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if math.dist(x[i], x[j]) <= tol:
                edges.add((i, j))
                continue
            c = [(a + b) / 2 for a, b in zip(x[i], x[j])]
            r = math.dist(x[i], x[j]) / 2
            if not any(math.dist(x[q], c) < r * (1 - 1e-12) for q in range(n) if q not in (i, j)):
                edges.add((i, j))
    return edges


def bfs_hops(adj, s):
    dist = {s: 0}
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def adjacency(n, edges):
    adj = {i: set() for i in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def point_in_hull_brute(p, pts, tol):
    """Carathéodory: p is in the hull iff it lies in a triangle, on a segment or on a point."""
    pts = [tuple(q) for q in pts]
    for a in pts:
        if math.dist(p, a) <= tol:
            return True
    for a, b in itertools.combinations(pts, 2):
        ab = math.dist(a, b)
        if ab <= tol:
            continue
        cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        proj = ((b[0] - a[0]) * (p[0] - a[0]) + (b[1] - a[1]) * (p[1] - a[1])) / ab
        if abs(cross) / ab <= tol and -tol <= proj <= ab + tol:
            return True
    for a, b, c in itertools.combinations(pts, 3):
        def side(o, u, v):
            return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])

        area = side(a, b, c)
        if area == 0:
            continue
        s1, s2, s3 = side(a, b, p), side(b, c, p), side(c, a, p)
        if area > 0 and s1 >= 0 and s2 >= 0 and s3 >= 0:
            return True
        if area < 0 and s1 <= 0 and s2 <= 0 and s3 <= 0:
            return True
    return False


def points_in_hull_brute(queries, pts, tol):
    """Vectorized Carathéodory test for many query points at once."""
    q = np.asarray(queries, dtype=float).reshape(-1, 2)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    hit = np.zeros(len(q), dtype=bool)
    hit |= (np.linalg.norm(q[:, None, :] - pts[None], axis=2) <= tol).any(axis=1)
    if len(pts) >= 2:
        a, b = np.array(list(itertools.combinations(range(len(pts)), 2))).T
        pa, pb = pts[a], pts[b]
        e = pb - pa
        ln = np.linalg.norm(e, axis=1)
        ok = ln > tol
        pa, e, ln = pa[ok], e[ok], ln[ok]
        rel = q[:, None, :] - pa[None]
        cross = e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]
        proj = (e[None, :, 0] * rel[..., 0] + e[None, :, 1] * rel[..., 1]) / ln
        hit |= ((np.abs(cross) / ln <= tol) & (proj >= -tol) & (proj <= ln + tol)).any(axis=1)
    if len(pts) >= 3:
        a, b, c = np.array(list(itertools.combinations(range(len(pts)), 3))).T
        pa, pb, pc = pts[a], pts[b], pts[c]

        def side(o, u, v):
            return (u[..., 0] - o[..., 0]) * (v[..., 1] - o[..., 1]) - \
                (u[..., 1] - o[..., 1]) * (v[..., 0] - o[..., 0])

        area = side(pa, pb, pc)
        keep = area != 0
        pa, pb, pc, area = pa[keep], pb[keep], pc[keep], area[keep]
        qq = q[:, None, :]
        s1 = side(pa[None], pb[None], qq)
        s2 = side(pb[None], pc[None], qq)
        s3 = side(pc[None], pa[None], qq)
        sign = np.sign(area)[None]
        hit |= ((s1 * sign >= 0) & (s2 * sign >= 0) & (s3 * sign >= 0)).any(axis=1)
    return hit


def jaccard_oracle(xa, xb, max_hop):
    from sparsestress.geometry import identical_tolerance

    n = len(xa)
    ha = [bfs_hops(adjacency(n, naive_gabriel(xa, identical_tolerance(xa))), v) for v in range(n)]
    hb = [bfs_hops(adjacency(n, naive_gabriel(xb, identical_tolerance(xb))), v) for v in range(n)]
    out = []
    for k in range(1, max_hop + 1):
        vals = []
        for v in range(n):
            na = {u for u, h in ha[v].items() if 0 < h <= k}
            nb = {u for u, h in hb[v].items() if 0 < h <= k}
            vals.append(1.0 if not (na | nb) else len(na & nb) / len(na | nb))
        out.append(sum(vals) / n)
    return out


def hull_error_oracle(g, x, max_hop):
    from sparsestress.geometry import identical_tolerance

    n = g.node_count
    adj = {u: set(g.neighbors(u).tolist()) for u in range(n)}
    hops = [bfs_hops(adj, v) for v in range(n)]
    tol = identical_tolerance(x)
    out = []
    for k in range(1, max_hop + 1):
        vals = []
        for v in range(n):
            inside = [u for u in range(n) if hops[v][u] <= k]
            outside = [u for u in range(n) if hops[v][u] > k]
            if not outside:
                continue
            cnt = points_in_hull_brute(x[outside], x[inside], tol).sum()
            vals.append(cnt / len(outside))
        out.append(sum(vals) / len(vals) if vals else None)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion as a PASS/FAIL line, then assert it."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash[ACCEPTANCE].append(line)
        print(line)
        assert ok, line

    return record
