"""Localization of eigenstates: participation ratios and coarse-grained maps."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParameterError
from .spectral import MERGE_TOL, SpectrumResult

DEFAULT_CELLS = 307
DEFAULT_MAX_STATES = 64


@dataclass
class ParProfile:
    moduli: np.ndarray
    xi: np.ndarray
    mean_all: float  # every state, degenerate ones counted separately
    mean_representatives: float  # one state per degenerate cluster

    def write_csv(self, fh, eigenvalues=None):
        writer = csv.writer(fh, lineterminator="\n")
        if eigenvalues is None:
            writer.writerow(["abs_lambda", "xi"])
            for m, x in zip(self.moduli.tolist(), self.xi.tolist()):
                writer.writerow([repr(m), repr(x)])
        else:
            writer.writerow(["re", "im", "abs_lambda", "xi"])
            for lam, m, x in zip(eigenvalues, self.moduli.tolist(), self.xi.tolist()):
                writer.writerow([repr(float(lam.real)), repr(float(lam.imag)), repr(m), repr(x)])


@dataclass
class CoarseGrid:
    values: np.ndarray  # (n_states, n_cells)
    cell_size: int
    n_nodes: int
    eigenvalues: np.ndarray

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    @property
    def n_cells(self) -> int:
        return self.values.shape[1]

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        for row in self.values.tolist():
            writer.writerow([repr(v) for v in row])

    def sidecar(self) -> dict:
        return {
            "n_states": self.n_states,
            "n_cells": self.n_cells,
            "cell_size": self.cell_size,
            "n_nodes": self.n_nodes,
            "rows": [
                {"re": float(l.real), "im": float(l.imag), "abs": float(abs(l))} for l in self.eigenvalues
            ],
        }


def participation_ratio(psi) -> float:
    """(sum |psi|^2)^2 / sum |psi|^4: how many nodes a state effectively occupies."""
    p = np.abs(np.asarray(psi)) ** 2
    total = p.sum()
    if total == 0:
        raise ParameterError("participation ratio of the zero vector is undefined")
    p = p / total
    return float(1.0 / (p @ p))


def degenerate_clusters(eigenvalues, tol: float = MERGE_TOL) -> list[list[int]]:
    """Group indices of eigenvalues lying within tol of each other (single linkage)."""
    lam = np.asarray(eigenvalues)
    clusters: list[list[int]] = []
    for k in range(lam.size):
        for c in clusters:
            if np.min(np.abs(lam[c] - lam[k])) <= tol:
                c.append(k)
                break
        else:
            clusters.append([k])
    return clusters


def _representatives(spec: SpectrumResult, tol: float) -> list[int]:
    reps = [min(c, key=lambda k: (spec.residuals[k], k)) for c in degenerate_clusters(spec.eigenvalues, tol)]
    return sorted(reps)


def _require_vectors(spec: SpectrumResult):
    if spec.vectors is None:
        raise DataError("spectrum carries no eigenvectors")


def par_profile(spec: SpectrumResult, cluster_tol: float = MERGE_TOL) -> ParProfile:
    _require_vectors(spec)
    if len(spec) == 0:
        raise DataError("spectrum is empty")
    xi = np.array([participation_ratio(spec.vectors[:, k]) for k in range(len(spec))])
    reps = _representatives(spec, cluster_tol)
    return ParProfile(spec.moduli, xi, float(xi.mean()), float(xi[reps].mean()))


def _check_order(order, n):
    order = np.asarray(order, dtype=np.int64)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ParameterError("order must be a permutation of the node indices")
    return order


def _grid_rows(spec, order, max_states, cluster_tol):
    _require_vectors(spec)
    order = _check_order(order, spec.n)
    rows = _representatives(spec, cluster_tol)
    rows = sorted(rows, key=lambda k: (-spec.moduli[k], k))[:max_states]
    probs = np.abs(spec.vectors[:, rows].T) ** 2
    probs /= probs.sum(axis=1, keepdims=True)
    return rows, probs[:, order]


def _bin(probs, cell_size):
    n = probs.shape[1]
    n_cells = math.ceil(n / cell_size)
    padded = np.zeros((probs.shape[0], n_cells * cell_size))
    padded[:, :n] = probs
    return padded.reshape(probs.shape[0], n_cells, cell_size).sum(axis=2)


def coarse_grain(
    spec: SpectrumResult,
    order,
    n_cells: int = DEFAULT_CELLS,
    max_states: int = DEFAULT_MAX_STATES,
    cluster_tol: float = MERGE_TOL,
) -> CoarseGrid:
    """Probability |psi|^2 of the leading states summed over consecutive cells.

    One state is kept per degenerate cluster (the one with the smallest
    residual).  Cells hold ceil(n / n_cells) sites each in the given node
    order, so the final cell may be short and fewer than n_cells cells may
    be needed.
    """
    if n_cells < 1 or n_cells > spec.n:
        raise ParameterError(f"n_cells must lie in [1, {spec.n}], got {n_cells}")
    rows, probs = _grid_rows(spec, order, max_states, cluster_tol)
    cell_size = math.ceil(spec.n / n_cells)
    return CoarseGrid(_bin(probs, cell_size), cell_size, spec.n, spec.eigenvalues[rows])


def zoom_grid(
    spec: SpectrumResult,
    order,
    first_cells: int = 300,
    cell_size: int = 62,
    max_states: int = DEFAULT_MAX_STATES,
    cluster_tol: float = MERGE_TOL,
) -> CoarseGrid:
    """Like :func:`coarse_grain`, restricted to the leading first_cells * cell_size nodes.

    Rows are not renormalized inside the window, so each row sums to the
    probability the state puts on the window.
    """
    if first_cells < 1 or cell_size < 1:
        raise ParameterError("first_cells and cell_size must be >= 1")
    if first_cells * cell_size > spec.n:
        raise ParameterError(f"window of {first_cells * cell_size} sites exceeds n={spec.n}")
    rows, probs = _grid_rows(spec, order, max_states, cluster_tol)
    window = probs[:, : first_cells * cell_size]
    return CoarseGrid(_bin(window, cell_size), cell_size, spec.n, spec.eigenvalues[rows])
