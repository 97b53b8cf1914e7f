"""Cluster-growing dimension of directed networks.

Distances follow out-links only.  The mass at distance l is the number of
distinct nodes within l hops of the seed, the seed included.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange

from ._fit import loglog_fit
from .errors import DataError, ParameterError
from .graph import DirectedGraph, invert_links, to_undirected

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is often too old and only produces a warning
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

DEFAULT_LMAX = 30
DEFAULT_WINDOW = (1, 10)


@dataclass
class GrowthCurve:
    masses: np.ndarray  # index l = 0..l_max
    n_seeds: int
    n_nodes: int

    @property
    def l_max(self) -> int:
        return self.masses.size - 1

    @property
    def saturation_mass(self) -> float:
        return float(self.masses[-1])

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["l", "mean_mass"])
        for l, m in enumerate(self.masses.tolist()):
            writer.writerow([l, repr(m)])


@dataclass
class DimensionFit:
    d: float
    stderr: float
    l_lo: int
    l_hi: int
    saturated: bool = False
    warnings: list[str] = field(default_factory=list)

    def __iter__(self):
        # allows ``d, stderr = dimension_fit(...)``
        return iter((self.d, self.stderr))

    def to_dict(self):
        return {
            "d": self.d,
            "stderr": self.stderr,
            "fit_window": [self.l_lo, self.l_hi],
            "saturated": self.saturated,
            "warnings": list(self.warnings),
        }


def thread_count() -> int:
    """Worker threads for per-seed BFS, capped by NETSPECTRA_THREADS."""
    cap = numba.config.NUMBA_NUM_THREADS
    env = os.environ.get("NETSPECTRA_THREADS")
    if env:
        try:
            cap = max(1, min(cap, int(env)))
        except ValueError:
            raise ParameterError(f"NETSPECTRA_THREADS must be an integer, got {env!r}") from None
    return cap


@njit(cache=True)
def _bfs_counts(indptr, indices, seed, l_max, stamp, mark, frontier, nxt):
    """Per-level counts of newly reached nodes from one seed."""
    counts = np.zeros(l_max + 1, dtype=np.int64)
    mark[seed] = stamp
    frontier[0] = seed
    fsize = 1
    counts[0] = 1
    for l in range(1, l_max + 1):
        nsize = 0
        for f in range(fsize):
            u = frontier[f]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if mark[v] != stamp:
                    mark[v] = stamp
                    nxt[nsize] = v
                    nsize += 1
        counts[l] = nsize
        if nsize == 0:
            break
        for i in range(nsize):
            frontier[i] = nxt[i]
        fsize = nsize
    return counts


@njit(cache=True, parallel=True)
def _all_seed_masses(indptr, indices, n, l_max, n_chunks):
    totals = np.zeros((n_chunks, l_max + 1), dtype=np.int64)
    chunk = (n + n_chunks - 1) // n_chunks
    for c in prange(n_chunks):
        mark = np.full(n, -1, dtype=np.int64)
        frontier = np.empty(n, dtype=np.int64)
        nxt = np.empty(n, dtype=np.int64)
        for s in range(c * chunk, min(n, (c + 1) * chunk)):
            counts = _bfs_counts(indptr, indices, s, l_max, s, mark, frontier, nxt)
            acc = 0
            for l in range(l_max + 1):
                acc += counts[l]
                totals[c, l] += acc
    return totals


def cluster_mass(g: DirectedGraph, seed: int, l_max: int) -> np.ndarray:
    """M_c(l) for l = 0..l_max from a single seed."""
    if not 0 <= seed < g.n_nodes:
        raise ParameterError(f"seed {seed} outside [0, {g.n_nodes})")
    if l_max < 0:
        raise ParameterError("l_max must be >= 0")
    indptr, indices = g.csr
    n = g.n_nodes
    mark = np.full(n, -1, dtype=np.int64)
    buf1 = np.empty(n, dtype=np.int64)
    buf2 = np.empty(n, dtype=np.int64)
    counts = _bfs_counts(indptr, indices, seed, l_max, 0, mark, buf1, buf2)
    return np.cumsum(counts)


def average_mass(g: DirectedGraph, l_max: int = DEFAULT_LMAX) -> GrowthCurve:
    """Mean cluster mass over every node as seed.

    Per-seed masses are integers, so the chunked parallel sum is exact and
    the result does not depend on the thread count.
    """
    if l_max < 1:
        raise ParameterError("l_max must be >= 1")
    indptr, indices = g.csr
    threads = thread_count()
    n_chunks = max(1, min(g.n_nodes, 4 * threads))
    previous = numba.get_num_threads()
    numba.set_num_threads(threads)
    try:
        totals = _all_seed_masses(indptr, indices, g.n_nodes, l_max, n_chunks)
    finally:
        numba.set_num_threads(previous)
    total = totals.sum(axis=0)
    return GrowthCurve(total / g.n_nodes, g.n_nodes, g.n_nodes)


def dimension_fit(curve: GrowthCurve, l_lo: int = 1, l_hi: int = 10) -> DimensionFit:
    """Slope of ln<M_c> against ln l over l_lo..l_hi."""
    if l_lo < 1:
        raise ParameterError("l_lo must be >= 1 (ln 0 is undefined)")
    if l_hi > curve.l_max:
        raise ParameterError(f"l_hi={l_hi} exceeds the curve's l_max={curve.l_max}")
    if l_hi - l_lo + 1 < 2:
        raise DataError("fit window must contain at least 2 distances")
    ls = np.arange(l_lo, l_hi + 1)
    d, _, stderr = loglog_fit(ls, curve.masses[ls])
    notes = []
    saturated = bool(curve.masses[l_hi] > 0.5 * curve.n_nodes)
    if saturated:
        notes.append(
            f"<M_c({l_hi})> = {curve.masses[l_hi]:.6g} exceeds half the network size; "
            "the fit window reaches saturation"
        )
    return DimensionFit(d, stderr, l_lo, l_hi, saturated, notes)


def undirected_dimension(
    g: DirectedGraph, l_max: int = DEFAULT_LMAX, l_lo: int = 1, l_hi: int = 10
) -> tuple[GrowthCurve, DimensionFit]:
    curve = average_mass(to_undirected(g), l_max)
    return curve, dimension_fit(curve, l_lo, l_hi)


def inversion_discrepancy(g: DirectedGraph, l_max: int = DEFAULT_LMAX) -> np.ndarray:
    """<M_c(l)> on the inverted graph minus <M_c(l)> on g.

    Zero at l <= 1 for every graph; nonzero beyond that in general.
    """
    return average_mass(invert_links(g), l_max).masses - average_mass(g, l_max).masses
