import math

import numpy as np
import pytest

from netspectra.errors import DataError, ParameterError
from netspectra.graph import DirectedGraph, generate_cycle
from netspectra.spectral import SpectrumResult, dense_spectrum
from netspectra.weyl import (
    count_eigenvalues,
    degeneracy_census,
    dimension_from_nu,
    integrated_density,
    relaxation_rates,
    weyl_fit,
)


def synthetic(lam, lambda_min=0.1, n=100):
    lam = np.asarray(lam, dtype=complex)
    return SpectrumResult(lam, np.zeros(lam.size), None, lambda_min, n, 0.85)


def test_rates():
    g = relaxation_rates(synthetic([1.0, 0.85, 0.1]))
    np.testing.assert_allclose(g, [0.0, -2 * math.log(0.85), -2 * math.log(0.1)])
    assert g[1] == pytest.approx(0.3250, abs=1e-4) and g[2] == pytest.approx(4.6052, abs=1e-4)


def test_zero_modulus_excluded():
    with pytest.warns(RuntimeWarning):
        assert relaxation_rates(synthetic([1.0, 0.0], lambda_min=0.0)).size == 1


def test_density_simple():
    assert integrated_density(synthetic([1.0]))(0.0) == 1.0
    curve = integrated_density(synthetic([1.0, 0.85, 0.5]))
    np.testing.assert_allclose(curve.gammas, [0, -2 * math.log(0.85), -2 * math.log(0.5)])
    np.testing.assert_allclose(curve.W, [1 / 3, 2 / 3, 1.0])
    assert curve(0.2) == pytest.approx(1 / 3) and curve(-1.0) == 0.0


def test_density_empty():
    with pytest.raises(DataError):
        integrated_density(synthetic([0.05], lambda_min=0.01), lambda_min=0.1)


def test_counts():
    spec = dense_spectrum(generate_cycle(3))
    spec.lambda_min = 0.1
    assert count_eigenvalues(spec, 0.25) == 3
    assert count_eigenvalues(spec, 0.9) == 1
    with pytest.raises(ParameterError):
        count_eigenvalues(synthetic([1.0], lambda_min=0.1), 0.05)


def test_census_two_self_loops():
    g = DirectedGraph(2, ((0,), (1,)))
    spec = dense_spectrum(g)
    census = dict(degeneracy_census(spec, m_max=6))
    assert census[1] >= 1 and census[3] == 0


def test_fit_exact_and_errors():
    pts = [(10**2, 20), (10**3, round(2 * 10**1.5)), (10**4, 200)]
    fit = weyl_fit([(100, 20), (10**4, 200)], 0.1)
    assert fit.nu == pytest.approx(0.5, abs=1e-12) and fit.stderr == 0.0
    assert weyl_fit(pts, 0.1).nu == pytest.approx(0.5, abs=1e-3)
    with pytest.raises(DataError):
        weyl_fit([(100, 3)], 0.1)
    with pytest.raises(DataError):
        weyl_fit([(100, 0), (200, 3)], 0.1)


def test_dimension_from_nu():
    assert dimension_from_nu(0.63) == pytest.approx(1.26)
    assert dimension_from_nu(0.5) == 1.0 and dimension_from_nu(1.0) == 2.0
