"""Planar geometry kernels: Gabriel graphs, monotone-chain hulls, hull membership."""

from __future__ import annotations

import numba
import numpy as np


def identical_tolerance(x: np.ndarray) -> float:
    """Positions closer than this count as identical (1e-12 of the layout diagonal)."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) == 0:
        return 0.0
    return 1e-12 * float(np.linalg.norm(x.max(axis=0) - x.min(axis=0)))


@numba.njit(cache=True)
def _gabriel_edges(x, order, key, tol):
    n, dim = x.shape
    src = []
    dst = []
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for a in range(dim):
                t = x[i, a] - x[j, a]
                d2 += t * t
            if np.sqrt(d2) <= tol:
                src.append(i)
                dst.append(j)
                continue
            # only points whose first coordinate lies within the radius of the
            # midpoint can be strictly inside the diametral disc
            c0 = 0.5 * (x[i, 0] + x[j, 0])
            r = 0.5 * np.sqrt(d2) * (1.0 + 1e-9)
            lo = np.searchsorted(key, c0 - r, side="left")
            hi = np.searchsorted(key, c0 + r, side="right")
            blocked = False
            for t_ in range(lo, hi):
                q = order[t_]
                if q == i or q == j:
                    continue
                dot = 0.0
                for a in range(dim):
                    dot += (x[i, a] - x[q, a]) * (x[j, a] - x[q, a])
                if dot < 0.0:
                    blocked = True
                    break
            if not blocked:
                src.append(i)
                dst.append(j)
    out = np.empty((len(src), 2), np.int64)
    for e in range(len(src)):
        out[e, 0] = src[e]
        out[e, 1] = dst[e]
    return out


def gabriel_graph(x: np.ndarray) -> np.ndarray:
    """Edges ``(i, j)``, ``i < j``, of the Gabriel graph of the point set ``x``.

    A pair is joined when no third point lies strictly inside the disc whose
    diameter is the pair; coincident pairs are always joined.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if len(x) < 2:
        return np.empty((0, 2), dtype=np.int64)
    order = np.argsort(x[:, 0], kind="stable").astype(np.int64)
    key = np.ascontiguousarray(x[order, 0])
    return _gabriel_edges(x, order, key, identical_tolerance(x))


@numba.njit(cache=True)
def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


@numba.njit(cache=True)
def convex_hull(pts):
    """Monotone chain.  Returns hull vertex indices (counter-clockwise,
    collinear points dropped); duplicates collapse to one index."""
    m = pts.shape[0]
    if m == 0:
        return np.empty(0, np.int64)
    # lexicographic (x, y) order via two stable sorts
    order = np.argsort(pts[:, 1], kind="mergesort")
    order = order[np.argsort(pts[order, 0], kind="mergesort")]
    # drop exact duplicates
    uniq = np.empty(m, np.int64)
    u = 0
    for t in range(m):
        v = order[t]
        if u > 0:
            w = uniq[u - 1]
            if pts[w, 0] == pts[v, 0] and pts[w, 1] == pts[v, 1]:
                continue
        uniq[u] = v
        u += 1
    if u <= 2:
        return uniq[:u].copy()
    hull = np.empty(2 * u, np.int64)
    h = 0
    for t in range(u):
        v = uniq[t]
        while h >= 2 and _cross(pts[hull[h - 2], 0], pts[hull[h - 2], 1],
                                pts[hull[h - 1], 0], pts[hull[h - 1], 1],
                                pts[v, 0], pts[v, 1]) <= 0.0:
            h -= 1
        hull[h] = v
        h += 1
    lower = h + 1
    for t in range(u - 2, -1, -1):
        v = uniq[t]
        while h >= lower and _cross(pts[hull[h - 2], 0], pts[hull[h - 2], 1],
                                    pts[hull[h - 1], 0], pts[hull[h - 1], 1],
                                    pts[v, 0], pts[v, 1]) <= 0.0:
            h -= 1
        hull[h] = v
        h += 1
    return hull[:h - 1].copy()


@numba.njit(cache=True)
def in_hull(hx, hy, px, py, tol):
    """Inclusive membership of ``(px, py)`` in the convex polygon ``(hx, hy)``.

    Polygons with one or two vertices are treated as a point or a segment.
    ``tol`` is an absolute distance tolerance for boundary contact.
    """
    h = hx.shape[0]
    if h == 0:
        return False
    if h == 1:
        return np.hypot(px - hx[0], py - hy[0]) <= tol
    if h == 2:
        ex = hx[1] - hx[0]
        ey = hy[1] - hy[0]
        seg = np.hypot(ex, ey)
        if seg <= tol:
            return np.hypot(px - hx[0], py - hy[0]) <= tol
        # distance from the carrier line and projection within the segment
        off = abs(ex * (py - hy[0]) - ey * (px - hx[0])) / seg
        if off > tol:
            return False
        proj = (ex * (px - hx[0]) + ey * (py - hy[0])) / seg
        return -tol <= proj <= seg + tol
    for t in range(h):
        ax = hx[t]
        ay = hy[t]
        bx = hx[(t + 1) % h]
        by = hy[(t + 1) % h]
        el = np.hypot(bx - ax, by - ay)
        if _cross(ax, ay, bx, by, px, py) < -tol * el:
            return False
    return True


@numba.njit(cache=True)
def count_in_hull(x, inside_set, candidates, tol):
    """Number of ``candidates`` lying in or on the hull of ``x[inside_set]``."""
    pts = np.empty((inside_set.shape[0], 2))
    for t in range(inside_set.shape[0]):
        pts[t, 0] = x[inside_set[t], 0]
        pts[t, 1] = x[inside_set[t], 1]
    hull = convex_hull(pts)
    hx = np.empty(hull.shape[0])
    hy = np.empty(hull.shape[0])
    for t in range(hull.shape[0]):
        hx[t] = pts[hull[t], 0]
        hy[t] = pts[hull[t], 1]
    cnt = 0
    for t in range(candidates.shape[0]):
        c = candidates[t]
        if in_hull(hx, hy, x[c, 0], x[c, 1], tol):
            cnt += 1
    return cnt
