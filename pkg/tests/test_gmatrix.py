import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netspectra.errors import ConvergenceError, ParameterError
from netspectra.gmatrix import apply, build_operator, order_by_pagerank, pagerank
from netspectra.graph import DirectedGraph, generate_chain, generate_cycle, random_digraph


def test_cycle_operator():
    op = build_operator(generate_cycle(3), 0.85)
    assert op.dangling.size == 0
    np.testing.assert_allclose(apply(op, np.array([1.0, 0, 0])), [0.05, 0.90, 0.05], atol=1e-15)


def test_single_node():
    op = build_operator(DirectedGraph(1, ((),)), 0.85)
    assert op.dangling.tolist() == [0]
    np.testing.assert_allclose(op.dense(), [[1.0]])


def test_two_node_chain_dense():
    G = build_operator(generate_chain(2), 0.85).dense()
    np.testing.assert_allclose(G, [[0.075, 0.5], [0.925, 0.5]], atol=1e-15)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(G).real), [-0.425, 1.0], atol=1e-14)


def test_two_node_chain_pagerank_exact():
    # p0 = 0.075 p0 + 0.5 p1 with p0 + p1 = 1 gives p = (20/57, 37/57)
    p = pagerank(build_operator(generate_chain(2), 0.85)).probabilities
    np.testing.assert_allclose(p, [20 / 57, 37 / 57], atol=1e-12)


def test_zero_vector_and_shape():
    op = build_operator(generate_cycle(4))
    assert not apply(op, np.zeros(4)).any()
    with pytest.raises(ParameterError):
        apply(op, np.zeros(3))


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
def test_alpha_range(alpha):
    with pytest.raises(ParameterError):
        build_operator(generate_cycle(3), alpha)


def test_pagerank_cycle_uniform():
    p = pagerank(build_operator(generate_cycle(7))).probabilities
    np.testing.assert_allclose(p, np.full(7, 1 / 7), atol=1e-14)


def test_pagerank_convergence_error():
    with pytest.raises(ConvergenceError) as exc:
        pagerank(build_operator(random_digraph(50, 3.0, 1)), tol=1e-15, max_iter=2)
    assert exc.value.last is not None


def test_order():
    assert order_by_pagerank(np.array([0.2, 0.5, 0.3])).tolist() == [1, 2, 0]
    assert order_by_pagerank(np.full(4, 0.25)).tolist() == [0, 1, 2, 3]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.floats(0.0, 4.0), st.floats(0.0, 0.5), st.integers(0, 10_000),
       st.floats(0.05, 0.95))
def test_matrix_free_matches_dense_and_stochastic(n, deg, dang, seed, alpha):
    g = random_digraph(n, deg, seed, dang)
    op = build_operator(g, alpha)
    G = op.dense()
    np.testing.assert_allclose(G.sum(axis=0), 1.0, atol=1e-13)
    assert (G >= 0).all()
    v = np.random.default_rng(seed).normal(size=n)
    np.testing.assert_allclose(apply(op, v), G @ v, atol=1e-12)
    p = pagerank(op).probabilities
    assert abs(p.sum() - 1) < 1e-12 and np.abs(apply(op, p) - p).sum() < 1e-10
