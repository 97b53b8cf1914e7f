"""Eigenvalue counting, integrated density of states and the Weyl exponent fit."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._fit import loglog_fit  # re-exported for power-law fits
from .errors import DataError, ParameterError
from .spectral import SpectrumResult

DEFAULT_THRESHOLDS = (0.25, 0.1)
CENSUS_TOL = 1e-6


@dataclass
class DensityCurve:
    gammas: np.ndarray
    W: np.ndarray

    def __call__(self, gamma):
        """W evaluated at arbitrary rates (right-continuous step function)."""
        idx = np.searchsorted(self.gammas, gamma, side="right") - 1
        return np.where(idx >= 0, self.W[np.maximum(idx, 0)], 0.0)

    def step(self, gamma: float, width: float = 1e-9) -> float:
        """Jump of W across [gamma - width, gamma + width]."""
        return float(self(gamma + width) - self(gamma - width))

    def to_dict(self):
        return {"gamma": self.gammas.tolist(), "W": self.W.tolist()}

    def write_csv(self, fh, source: str | None = None):
        writer = csv.writer(fh, lineterminator="\n")
        if source is None:
            writer.writerow(["gamma", "W"])
            writer.writerows(zip(map(repr, self.gammas.tolist()), map(repr, self.W.tolist())))
        else:
            writer.writerow(["source", "gamma", "W"])
            for g, w in zip(self.gammas.tolist(), self.W.tolist()):
                writer.writerow([source, repr(g), repr(w)])


@dataclass
class WeylFit:
    nu: float
    stderr: float
    threshold: float
    points: list[tuple[int, int]] = field(default_factory=list)
    intercept: float = 0.0

    @property
    def dimension(self) -> float:
        return dimension_from_nu(self.nu)

    def to_dict(self):
        return {
            "nu": self.nu,
            "stderr": self.stderr,
            "threshold": self.threshold,
            "intercept": self.intercept,
            "dimension": self.dimension,
            "points": [{"N": n, "N_lambda": c} for n, c in self.points],
        }


def relaxation_rates(spec: SpectrumResult) -> np.ndarray:
    """gamma = -2 ln|lambda| for every eigenvalue, ascending."""
    mod = spec.moduli
    zero = mod == 0
    if zero.any():
        warnings.warn(f"{int(zero.sum())} zero-modulus eigenvalues excluded", RuntimeWarning, stacklevel=2)
    gam = -2.0 * np.log(mod[~zero])
    # |lambda| = 1 up to rounding maps to a tiny negative rate
    gam[np.abs(gam) < 1e-12] = 0.0
    return np.sort(gam)


def integrated_density(spec: SpectrumResult, lambda_min: float | None = None) -> DensityCurve:
    """Cumulative fraction W(gamma) of retained states, at each distinct rate."""
    if lambda_min is None:
        lambda_min = spec.lambda_min
    kept = spec.moduli >= lambda_min
    if not kept.any():
        raise DataError(f"no eigenvalue with |lambda| >= {lambda_min}")
    sub = SpectrumResult(spec.eigenvalues[kept], spec.residuals[kept], None, lambda_min, spec.n, spec.alpha)
    gam = relaxation_rates(sub)
    levels, counts = np.unique(gam, return_counts=True)
    return DensityCurve(levels, np.cumsum(counts) / gam.size)


def count_eigenvalues(spec: SpectrumResult, threshold: float) -> int:
    """Number of eigenvalues with |lambda| > threshold, with multiplicity."""
    if threshold < spec.lambda_min:
        raise ParameterError(
            f"threshold {threshold} lies below the computed cutoff {spec.lambda_min}; counts would be short"
        )
    return int(np.count_nonzero(spec.moduli > threshold))


def degeneracy_census(
    spec: SpectrumResult, alpha: float | None = None, m_max: int = 6, tol: float = CENSUS_TOL
) -> list[tuple[int, int]]:
    """For m = 1..m_max, how many eigenvalues have modulus alpha/m (within tol)."""
    if m_max < 1:
        raise ParameterError("m_max must be >= 1")
    if alpha is None:
        alpha = spec.alpha
    mod = spec.moduli
    return [(m, int(np.count_nonzero(np.abs(mod - alpha / m) <= tol))) for m in range(1, m_max + 1)]


def weyl_fit(points, threshold: float) -> WeylFit:
    """Fit N_lambda = c N^nu by least squares in log-log space."""
    points = [(int(n), int(c)) for n, c in points]
    if len(points) < 2:
        raise DataError(f"need at least 2 (N, N_lambda) points, got {len(points)}")
    if any(c < 1 for _, c in points):
        raise DataError("every N_lambda must be >= 1 to take logarithms")
    N, C = zip(*points)
    nu, intercept, stderr = loglog_fit(N, C)
    if not np.isfinite(nu):
        raise DataError("fit produced a non-finite exponent")
    return WeylFit(nu, stderr, threshold, points, intercept)


def dimension_from_nu(nu: float) -> float:
    if nu <= 0:
        raise ParameterError("nu must be positive")
    return 2.0 * nu
