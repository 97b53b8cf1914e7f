import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netspectra.eigenstates import coarse_grain, degenerate_clusters, par_profile, participation_ratio, zoom_grid
from netspectra.errors import DataError, ParameterError
from netspectra.graph import generate_cycle
from netspectra.spectral import SpectrumResult, dense_spectrum


def states(*columns):
    vecs = np.column_stack(columns).astype(complex)
    k = vecs.shape[1]
    lam = np.linspace(1.0, 0.5, k).astype(complex)
    return SpectrumResult(lam, np.zeros(k), vecs, 0.1, vecs.shape[0], 0.85)


def test_par_basics():
    assert participation_ratio(np.ones(7)) == pytest.approx(7)
    assert participation_ratio(np.eye(5)[2]) == 1.0
    assert participation_ratio([1, 0, -1, 0]) == pytest.approx(2)
    with pytest.raises(ParameterError):
        participation_ratio(np.zeros(3))


def test_par_cycle_fourier_modes():
    profile = par_profile(dense_spectrum(generate_cycle(3)))
    np.testing.assert_allclose(profile.xi, 3.0)


def test_par_profile_means():
    lam = np.array([1.0, 0.5, 0.5])
    vecs = np.column_stack([np.ones(4), np.eye(4)[0], np.eye(4)[1]]).astype(complex)
    spec = SpectrumResult(lam.astype(complex), np.array([0, 1e-12, 0.0]), vecs, 0.1, 4, 0.85)
    profile = par_profile(spec)
    assert profile.mean_all == pytest.approx(2.0)
    assert profile.mean_representatives == pytest.approx(2.5)
    with pytest.raises(DataError):
        par_profile(SpectrumResult(lam, np.zeros(3), None, 0.1, 4, 0.85))


def test_clusters():
    assert degenerate_clusters([1.0, 0.5, 0.5 + 1e-10, 0.2]) == [[0], [1, 2], [3]]


def test_coarse_uniform_and_delta():
    grid = coarse_grain(states(np.ones(6)), np.arange(6), n_cells=3)
    np.testing.assert_allclose(grid.values, [[1 / 3, 1 / 3, 1 / 3]])
    order = np.array([4, 0, 1, 2, 3, 5])  # node 4 ranked first
    grid = coarse_grain(states(np.eye(6)[4]), order, n_cells=3)
    np.testing.assert_allclose(grid.values, [[1, 0, 0]])


def test_coarse_errors():
    with pytest.raises(ParameterError):
        coarse_grain(states(np.ones(4)), np.arange(4), n_cells=5)
    with pytest.raises(ParameterError):
        coarse_grain(states(np.ones(4)), np.array([0, 0, 1, 2]), n_cells=2)


def test_short_final_cell():
    grid = coarse_grain(states(np.ones(10)), np.arange(10), n_cells=4)
    assert grid.cell_size == 3 and grid.n_cells == 4
    np.testing.assert_allclose(grid.values[0], [0.3, 0.3, 0.3, 0.1])


def test_zoom():
    z = zoom_grid(states(np.ones(8)), np.arange(8), first_cells=2, cell_size=2)
    assert z.values.sum() == pytest.approx(0.5)
    z = zoom_grid(states(np.eye(8)[7]), np.arange(8), first_cells=2, cell_size=2)
    assert z.values.sum() == 0.0
    with pytest.raises(ParameterError):
        zoom_grid(states(np.ones(8)), np.arange(8), first_cells=3, cell_size=3)


def test_rows_sorted_and_capped():
    spec = states(np.ones(6), np.eye(6)[0], np.eye(6)[1])
    grid = coarse_grain(spec, np.arange(6), n_cells=6, max_states=2)
    assert grid.n_states == 2
    np.testing.assert_allclose(grid.eigenvalues, spec.eigenvalues[:2])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 300), st.integers(0, 10_000), st.floats(0.01, 100.0))
def test_par_invariants(n, seed, scale):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    xi = participation_ratio(psi)
    assert 1.0 - 1e-12 <= xi <= n + 1e-9
    assert participation_ratio(scale * psi) == pytest.approx(xi, rel=1e-12)
    assert participation_ratio(psi[rng.permutation(n)]) == pytest.approx(xi, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 400), st.integers(0, 10_000), st.data())
def test_row_sums(n, seed, data):
    cells = data.draw(st.integers(1, n))
    rng = np.random.default_rng(seed)
    spec = states(rng.normal(size=n), rng.normal(size=n))
    grid = coarse_grain(spec, rng.permutation(n), n_cells=cells)
    np.testing.assert_allclose(grid.values.sum(axis=1), 1.0, atol=1e-9)
    assert grid.n_cells <= cells and (grid.n_cells - 1) * grid.cell_size < n
