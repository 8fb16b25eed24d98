"""PivotMDS initial layouts and edge-length rescaling."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .distances import mssp_table
from .errors import DegenerateLayoutError
from .graph import Graph
from .sampling import sample_maxmin_sp

log = logging.getLogger(__name__)


class ConvergenceWarning(UserWarning):
    pass


@dataclass
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray  # columns
    iterations: int
    converged: bool


def double_center(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    return -0.5 * (c - c.mean(axis=1, keepdims=True) - c.mean(axis=0, keepdims=True) + c.mean())


def top_eigenvectors(a: np.ndarray, dim: int, rng, tol: float = 1e-8,
                     max_iters: int = 1000) -> EigenResult:
    """Dominant eigenpairs of a symmetric PSD matrix by orthogonal iteration.

    Each step multiplies the block by ``a``, re-orthonormalizes it with
    Gram-Schmidt and rotates it onto the Ritz vectors, so individual vectors
    converge even when the leading eigenvalues are close.
    """
    m = a.shape[0]
    dim = min(dim, m)
    q = _gram_schmidt(rng.standard_normal((m, dim)))
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        z = _gram_schmidt(a @ q)
        vals, rot = np.linalg.eigh(z.T @ a @ z)
        rot = rot[:, ::-1]
        z = z @ rot
        # fix the sign so successive iterates are comparable
        z *= np.where(np.sum(z * q, axis=0) < 0, -1.0, 1.0)
        # directions in the numerical null space are arbitrary and never settle
        ritz = vals[::-1]
        live = ritz > 1e-12 * max(ritz[0], 0.0)
        live[0] = True
        change = np.max(np.linalg.norm(z - q, axis=0)[live])
        q = z
        if change < tol:
            converged = True
            break
    vals = np.einsum("ij,ij->j", q, a @ q)
    return EigenResult(vals, q, it, converged)


def _gram_schmidt(v: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    A column that vanishes relative to its input (it lay in the span of the
    previous ones) is replaced by the first unit vector that survives.
    """
    v = v.copy()
    m, cols = v.shape
    for j in range(cols):
        before = np.linalg.norm(v[:, j])
        for _ in range(2):
            for i in range(j):
                v[:, j] -= (v[:, i] @ v[:, j]) * v[:, i]
        norm = np.linalg.norm(v[:, j])
        basis = 0
        while norm <= 1e-10 * before or norm < 1e-300:
            v[:, j] = 0.0
            v[(j + basis) % m, j] = 1.0
            before = 1.0
            for _ in range(2):
                for i in range(j):
                    v[:, j] -= (v[:, i] @ v[:, j]) * v[:, i]
            norm = np.linalg.norm(v[:, j])
            basis += 1
        v[:, j] /= norm
    return v


@dataclass
class PivotMDSResult:
    layout: np.ndarray
    pivots: np.ndarray
    converged: bool


def pivot_mds_from_distances(dist: np.ndarray, dim: int = 2, seed=None) -> tuple[np.ndarray, bool]:
    """Layout from an ``n x p`` matrix of node-to-pivot distances."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    c = double_center(np.asarray(dist, dtype=np.float64) ** 2)
    eig = top_eigenvectors(c.T @ c, dim, rng)
    if not eig.converged:
        warnings.warn("power iteration did not converge; using the last iterate", ConvergenceWarning)
    # C v = sigma u; dividing by sigma**0.5 (the 4th root of the eigenvalue of
    # C^T C) gives classical-MDS axis scaling when the pivots are all nodes
    scale = np.maximum(eig.values, 0.0) ** 0.25
    scale[scale == 0] = 1.0
    x = (c @ eig.vectors) / scale
    if x.shape[1] < dim:
        x = np.hstack([x, np.zeros((len(x), dim - x.shape[1]))])
    return x, eig.converged


def pivot_mds(g: Graph, pivots: int = 200, seed=None, dim: int = 2) -> PivotMDSResult:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = g.node_count
    if pivots > n:
        warnings.warn(f"PivotMDS pivot count {pivots} clamped to n={n}")
        pivots = n
    if n == 1:
        return PivotMDSResult(np.zeros((1, dim)), np.zeros(1, dtype=np.int64), True)
    piv = sample_maxmin_sp(g, pivots, rng)
    d = mssp_table(g, piv).T
    x, ok = pivot_mds_from_distances(d, dim, rng)
    return PivotMDSResult(x, piv, ok)


def classical_mds(full_dist: np.ndarray, dim: int = 2) -> np.ndarray:
    """Reference classical MDS by dense eigendecomposition."""
    b = double_center(np.asarray(full_dist, dtype=np.float64) ** 2)
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(vals)[::-1][:dim]
    return vecs[:, order] * np.sqrt(np.maximum(vals[order], 0.0))


def rescale_to_edge_weights(x: np.ndarray, g: Graph) -> np.ndarray:
    """Scale so that the summed drawn edge length equals the summed edge weights."""
    x = np.asarray(x, dtype=np.float64)
    src, dst, length = g.edge_arrays()
    drawn = np.linalg.norm(x[src] - x[dst], axis=1).sum()
    if not drawn > 0:
        raise DegenerateLayoutError("all edges have zero drawn length")
    return x * ((1.0 / length ** 2).sum() / drawn)
