"""Matrix-free Google matrix and PageRank.

Column-stochastic convention: column j of S holds 1/outdeg(j) at every
target of node j, and 1/N everywhere when j is dangling.  G acts on
column vectors from the left, and PageRank is its right eigenvector
at eigenvalue 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, ParameterError
from .graph import DirectedGraph

DEFAULT_ALPHA = 0.85


@dataclass(frozen=True)
class GoogleOperator:
    alpha: float
    n: int
    normalized_adjacency: sp.csr_matrix  # (target, source) -> 1/outdeg(source)
    dangling: np.ndarray

    def __matmul__(self, v):
        return apply(self, v)

    def dense(self) -> np.ndarray:
        """Materialize G.  Only sensible for small n."""
        S = self.normalized_adjacency.toarray()
        S[:, self.dangling] = 1.0 / self.n
        return self.alpha * S + (1.0 - self.alpha) / self.n


@dataclass(frozen=True)
class PageRankVector:
    probabilities: np.ndarray
    residual: float
    iterations: int


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie strictly inside (0, 1), got {alpha}")
    return alpha


def build_operator(g: DirectedGraph, alpha: float = DEFAULT_ALPHA) -> GoogleOperator:
    alpha = check_alpha(alpha)
    if g.n_nodes == 0:
        raise ParameterError("graph has no nodes")
    indptr, targets = g.csr
    deg = g.out_degree
    sources = np.repeat(np.arange(g.n_nodes), deg)
    weights = 1.0 / deg[sources]
    A = sp.csr_matrix((weights, (targets, sources)), shape=(g.n_nodes, g.n_nodes))
    A.sort_indices()
    dangling = np.flatnonzero(deg == 0)
    return GoogleOperator(alpha, g.n_nodes, A, dangling)


def apply(op: GoogleOperator, v) -> np.ndarray:
    """Return G @ v in O(edges + n)."""
    v = np.asarray(v)
    if v.shape != (op.n,):
        raise ParameterError(f"expected a vector of length {op.n}, got shape {v.shape}")
    out = op.normalized_adjacency @ v
    dangling_mass = v[op.dangling].sum() if op.dangling.size else 0.0
    uniform = (op.alpha * dangling_mass + (1.0 - op.alpha) * v.sum()) / op.n
    out = op.alpha * out
    out += uniform
    return out


def pagerank(op: GoogleOperator, tol: float = 1e-12, max_iter: int = 10_000) -> PageRankVector:
    """Power iteration from the uniform vector until the L1 change drops below tol."""
    if tol <= 0:
        raise ParameterError("tol must be positive")
    p = np.full(op.n, 1.0 / op.n)
    change = np.inf
    for it in range(1, max_iter + 1):
        nxt = apply(op, p)
        nxt /= nxt.sum()
        change = float(np.abs(nxt - p).sum())
        p = nxt
        if change < tol:
            return PageRankVector(p, change, it)
    raise ConvergenceError(
        f"PageRank did not reach tol={tol} in {max_iter} iterations (last change {change:.3e})",
        last=p,
        residual=change,
    )


def order_by_pagerank(p: PageRankVector | np.ndarray) -> np.ndarray:
    """Node indices by descending probability, ties by ascending index."""
    probs = p.probabilities if isinstance(p, PageRankVector) else np.asarray(p)
    return np.lexsort((np.arange(probs.size), -probs))
