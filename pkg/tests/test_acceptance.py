"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the report lines.
Criterion 10 needs kernel sources and lives in scripts/kernel_reproduction.py.
"""

import math
import time

import numpy as np
import pytest

from netspectra.callgraph import extract_pcn
from netspectra.eigenstates import coarse_grain, participation_ratio
from netspectra.fracdim import GrowthCurve, average_mass, dimension_fit
from netspectra.gmatrix import apply, build_operator, pagerank
from netspectra.graph import (
    generate_chain,
    generate_cycle,
    generate_grid,
    generate_preferential,
    random_digraph,
)
from netspectra.spectral import SpectrumResult, arnoldi_spectrum, dense_spectrum
from netspectra.weyl import integrated_density, loglog_fit, weyl_fit

from conftest import FIXTURES

ALPHA = 0.85


def report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, detail


def greedy_pairing(a, b):
    """Pair each value of a with its nearest unused value of b; worst gap."""
    b = list(np.asarray(b))
    worst = 0.0
    for x in np.asarray(a)[np.argsort(-np.abs(a))]:
        k = int(np.argmin(np.abs(np.asarray(b) - x)))
        worst = max(worst, abs(b[k] - x))
        b.pop(k)
    return worst


def s_matrix(g):
    n = g.n_nodes
    S = np.zeros((n, n))
    for u, targets in enumerate(g.out_edges):
        if targets:
            S[list(targets), u] = 1.0 / len(targets)
        else:
            S[:, u] = 1.0 / n
    return S


# -------------------------------------------------------------------- 1


def test_c01_arnoldi_matches_dense_oracle():
    worst = 0.0
    count_mismatch = []
    start = time.perf_counter()
    for i in range(50):
        n = (20, 50, 100, 200)[i % 4]
        g = random_digraph(n, 3.0, 1000 + i, dangling_fraction=0.1)
        spec = arnoldi_spectrum(build_operator(g, ALPHA), lambda_min=0.1, krylov_dim=min(n, 80), seed=i)
        full = dense_spectrum(g, ALPHA).eigenvalues
        ref = full[np.abs(full) > 0.1]
        got = spec.eigenvalues[np.abs(spec.eigenvalues) > 0.1]
        if got.size != ref.size:
            count_mismatch.append((i, n, got.size, ref.size))
            continue
        if got.size:
            worst = max(worst, greedy_pairing(got, ref))
    ok = not count_mismatch and worst <= 1e-8
    report(
        "C1 Arnoldi vs dense oracle",
        ok,
        f"50 graphs, count mismatches={count_mismatch}, worst pair gap={worst:.2e} (tol 1e-8), "
        f"{time.perf_counter() - start:.1f}s",
    )


# -------------------------------------------------------------------- 2


def test_c02_spectral_mapping():
    worst = 0.0
    for i in range(20):
        n = (20, 40, 60, 80, 100)[i % 5]
        g = random_digraph(n, 10.0, 2000 + i, dangling_fraction=0.1)
        lam_g = dense_spectrum(g, ALPHA).eigenvalues
        lam_s = np.linalg.eigvals(s_matrix(g))
        lam_s = np.delete(lam_s, int(np.argmin(np.abs(lam_s - 1.0))))
        worst = max(worst, greedy_pairing(lam_g, np.concatenate([[1.0], ALPHA * lam_s])))
    report("C2 spectral mapping spec(G) = {1} + alpha*spec(S)\\{1}", worst <= 1e-10,
           f"20 graphs, worst gap={worst:.2e} (tol 1e-10)")


# -------------------------------------------------------------------- 3


def test_c03_cycle_spectra():
    worst = 0.0
    for m in range(1, 13):
        expected = [1.0] + [ALPHA * np.exp(2j * np.pi * k / m) for k in range(1, m)]
        worst = max(worst, greedy_pairing(dense_spectrum(generate_cycle(m), ALPHA).eigenvalues, expected))
        if m >= 3:
            spec = arnoldi_spectrum(build_operator(generate_cycle(m), ALPHA), 0.1, krylov_dim=m)
            if len(spec) != m:
                worst = math.inf
            else:
                worst = max(worst, greedy_pairing(spec.eigenvalues, expected))
    report("C3 cycle spectra m=1..12", worst <= 1e-12, f"worst gap={worst:.2e} (tol 1e-12)")


# -------------------------------------------------------------------- 4


def test_c04_pagerank():
    graphs = [generate_cycle(m) for m in (1, 2, 5, 12)]
    graphs += [generate_chain(50), generate_grid(12, 9), generate_preferential(500, 3, 7)]
    graphs += [random_digraph(n, 3.0, 3000 + n, 0.2) for n in (30, 100, 300)]
    worst_res = 0.0
    for g in graphs:
        op = build_operator(g, ALPHA)
        p = pagerank(op).probabilities
        worst_res = max(worst_res, float(np.abs(apply(op, p) - p).sum()))
    worst_uniform = 0.0
    for m in range(1, 13):
        p = pagerank(build_operator(generate_cycle(m), ALPHA)).probabilities
        worst_uniform = max(worst_uniform, float(np.max(np.abs(p - 1.0 / m))))
    G = build_operator(generate_chain(2), ALPHA).dense()
    exact = np.linalg.solve(np.vstack([(G - np.eye(2))[:1], np.ones(2)]), [0.0, 1.0])
    p2 = pagerank(build_operator(generate_chain(2), ALPHA)).probabilities
    gap2 = float(np.max(np.abs(p2 - exact)))
    ok = worst_res <= 1e-10 and worst_uniform <= 1e-12 and gap2 <= 1e-12
    report(
        "C4 PageRank",
        ok,
        f"max ||Gp-p||_1={worst_res:.2e} (tol 1e-10), cycle uniformity gap={worst_uniform:.2e}, "
        f"2-node chain p={p2.tolist()} vs exact {exact.tolist()} gap={gap2:.2e} (tol 1e-12)",
    )


# -------------------------------------------------------------------- 5


def test_c05_dimension_chain():
    fit = dimension_fit(average_mass(generate_chain(10_000), 10), 1, 10)
    report("C5a chain of 1e4 nodes, window [1,10]", abs(fit.d - 1.0) <= 0.05,
           f"d={fit.d:.4f} (target 1.00 +- 0.05)")


def test_c05_dimension_grid():
    fit = dimension_fit(average_mass(generate_grid(60, 60), 10), 1, 10)
    report("C5b 60x60 directed grid, window [1,10]", abs(fit.d - 2.0) <= 0.15,
           f"d={fit.d:.4f} (target 2.0 +- 0.15)")


def test_c05_dimension_planted():
    worst = 0.0
    ls = np.arange(31)
    for d in (0.7, 1.0, 1.37, 2.0, 2.6):
        masses = np.where(ls == 0, 1.0, 3.0 * ls.astype(float) ** d)
        fit = dimension_fit(GrowthCurve(masses, 1, 10**9), 1, 30)
        worst = max(worst, abs(fit.d - d))
    report("C5c planted curves", worst <= 1e-12, f"worst |d - d_true|={worst:.2e} (tol 1e-12)")


# -------------------------------------------------------------------- 6


def test_c06_weyl_fit():
    Ns = np.unique(np.round(np.logspace(3, math.log10(3e5), 10)).astype(int))
    points = [(int(N), int(round(2 * N**0.63))) for N in Ns]
    fit = weyl_fit(points, 0.1)
    nu_clean, _, stderr_clean = loglog_fit(Ns.astype(float), 2.0 * Ns.astype(float) ** 0.63)
    ok = abs(fit.nu - 0.63) <= 0.02 and abs(nu_clean - 0.63) <= 1e-12 and stderr_clean <= 1e-12
    report(
        "C6 Weyl fit",
        ok,
        f"rounded nu={fit.nu:.5f} (0.63 +- 0.02); noiseless nu error={abs(nu_clean - 0.63):.2e}, "
        f"stderr={stderr_clean:.2e} (tol 1e-12)",
    )


# -------------------------------------------------------------------- 7


def test_c07_par_and_coarse_grid():
    rng = np.random.default_rng(7)
    n = 1000
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    delta = np.zeros(n)
    delta[17] = 3.0
    gaps = [
        abs(participation_ratio(np.ones(n)) - n),
        abs(participation_ratio(delta) - 1.0),
        abs(participation_ratio(psi) - participation_ratio((2.5 - 4j) * psi)) / participation_ratio(psi),
    ]
    big = 285509
    vecs = rng.normal(size=(big, 3)) + 1j * rng.normal(size=(big, 3))
    spec = SpectrumResult(np.array([1.0, 0.8, 0.5 + 0.1j]), np.zeros(3), vecs, 0.1, big, ALPHA)
    grid = coarse_grain(spec, rng.permutation(big), n_cells=307)
    row_gap = float(np.max(np.abs(grid.values.sum(axis=1) - 1.0)))
    geometry = (grid.n_cells, grid.cell_size, big - (grid.n_cells - 1) * grid.cell_size)
    ok = max(gaps) <= 1e-12 and row_gap <= 1e-9 and geometry == (307, 930, 929)
    report(
        "C7 PAR identities and coarse grid",
        ok,
        f"identity gaps={['%.1e' % x for x in gaps]} (tol 1e-12); grid cells={geometry[0]}, "
        f"cell size={geometry[1]}, final cell={geometry[2]}, row-sum gap={row_gap:.1e} (tol 1e-9)",
    )


# -------------------------------------------------------------------- 8


def test_c08_density_steps():
    lam = [1.0]
    for m in range(1, 7):
        lam += [ALPHA / m * np.exp(2j * np.pi * (k + 0.1 * m) / m) for k in range(m)]
    lam += [0.95, 0.6 + 0.2j, 0.6 - 0.2j, 0.33, -0.27, 0.12j, -0.12j]
    lam = np.array(lam, dtype=complex)
    spec = SpectrumResult(lam, np.zeros(lam.size), None, 0.1, 500, ALPHA)
    curve = integrated_density(spec)
    total = lam.size
    worst = max(abs(curve.step(-2 * math.log(ALPHA / m)) - m / total) for m in range(1, 7))
    report("C8 W(gamma) step heights m/N_lambda, m=1..6", worst <= 1e-12,
           f"N_lambda={total}, worst step error={worst:.2e}")


# -------------------------------------------------------------------- 9

EXPECTED_CALLS = {
    ("main", "init"), ("main", "run"), ("main", "shutdown"),
    ("init", "config_load"), ("init", "log_msg"),
    ("run", "step"), ("run", "log_msg"),
    ("step", "step"), ("step", "compute"),
    ("shutdown", "log_msg"), ("shutdown", "cleanup"),
    ("config_load", "parse_line"),
    ("log_msg", "format_msg"),
    ("compute", "helper"), ("compute", "sq"),
    ("helper", "cleanup"),
    ("fake_call", "ghost"),
}  # fmt: skip


def test_c09_extractor_corpus():
    g, rep = extract_pcn(FIXTURES / "c_corpus")
    got = {(g.labels[a], g.labels[b]) for a, b in g.edges()}
    nodes = {u for e in EXPECTED_CALLS for u in e}
    ok = got == EXPECTED_CALLS and set(g.labels) == nodes and rep.n_files == 12 and not rep.skipped_files
    report(
        "C9 extractor fixture corpus",
        ok,
        f"{rep.n_files} files, {g.n_nodes} procedures, {g.n_edges} calls; "
        f"missing={sorted(EXPECTED_CALLS - got)}, spurious={sorted(got - EXPECTED_CALLS)}",
    )


@pytest.mark.parametrize("m", [1, 2, 3])
def test_c08_census_matches_steps(m):
    # the degeneracy census sees the same clusters the density steps do
    from netspectra.weyl import degeneracy_census

    lam = np.array([1.0] + [ALPHA / m] * m + [0.3])
    spec = SpectrumResult(lam, np.zeros(lam.size), None, 0.1, 50, ALPHA)
    assert dict(degeneracy_census(spec))[m] == m
