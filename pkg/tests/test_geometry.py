import numpy as np
import pytest

from balmet import (
    InvalidInputError,
    NumericalDomainError,
    build_quadrature,
    integrate,
    load_moment_corpus,
)


def in_budget_entries(manifold, order):
    corpus = load_moment_corpus()
    if manifold == "P1":
        budget = 2 * order - 1
        return [((j, k), v) for (j, k), v in corpus.p1.items() if k <= budget]
    budget = 2 * order - 2
    return [((a, b, k), v) for (a, b, k), v in corpus.p2.items() if k <= budget]


def moment_field(manifold, key, nodes):
    sq = np.abs(nodes) ** 2
    if manifold == "P1":
        j, k = key
        return sq[:, 0] ** j / (1.0 + sq[:, 0]) ** k
    a, b, k = key
    return sq[:, 0] ** a * sq[:, 1] ** b / (1.0 + sq[:, 0] + sq[:, 1]) ** k


@pytest.mark.parametrize("manifold,order", [("P1", 2), ("P1", 6), ("P2", 3), ("P2", 5)])
def test_scheme_mass_and_weights(manifold, order):
    scheme = build_quadrature(manifold, order)
    assert scheme.total_mass == 1.0
    assert np.all(scheme.weights > 0)
    assert abs(scheme.weights.sum() - 1.0) <= 1e-12
    assert scheme.nodes.shape == (scheme.node_count, 1 if manifold == "P1" else 2)


def test_node_counts_grow_polynomially():
    assert build_quadrature("P1", 4).node_count == 4 * 9
    assert build_quadrature("P2", 3).node_count == 9 * 49


def test_invalid_inputs():
    with pytest.raises(InvalidInputError):
        build_quadrature("P3", 4)
    with pytest.raises(InvalidInputError):
        build_quadrature("P1", 1)


@pytest.mark.parametrize("manifold,order", [("P1", 3), ("P1", 6), ("P2", 3), ("P2", 4)])
def test_moments_match_corpus(manifold, order):
    scheme = build_quadrature(manifold, order)
    for key, exact in in_budget_entries(manifold, order):
        got = integrate(scheme, moment_field(manifold, key, scheme.nodes)).real
        assert abs(got - float(exact)) <= 1e-12 * float(exact), key


@pytest.mark.parametrize("manifold,order", [("P1", 4), ("P2", 3)])
def test_doubling_order_is_stable_on_moments(manifold, order):
    lo = build_quadrature(manifold, order)
    hi = build_quadrature(manifold, 2 * order)
    for key, exact in in_budget_entries(manifold, order):
        a = integrate(lo, moment_field(manifold, key, lo.nodes)).real
        b = integrate(hi, moment_field(manifold, key, hi.nodes)).real
        assert abs(a - b) <= 1e-12 * float(exact)


def test_eps_quad_is_roundoff_level():
    for manifold, order in [("P1", 4), ("P2", 3)]:
        scheme = build_quadrature(manifold, order)
        assert scheme.eps_quad <= 1e-12


def test_integrate_constant():
    scheme = build_quadrature("P1", 4)
    for c in (1.0, -2.5, 3.0 + 1.0j):
        val = integrate(scheme, np.full(scheme.node_count, c))
        assert abs(val - c * scheme.total_mass) <= 1e-14 * max(1.0, abs(c))


def test_integrate_accepts_callable():
    scheme = build_quadrature("P1", 5)
    val = integrate(scheme, lambda nodes: 1.0 / (1.0 + np.abs(nodes[:, 0]) ** 2))
    assert abs(val - 0.5) <= 1e-13


def test_integrate_frozen_rational_moment():
    # |z|^2 / (1+|z|^2)^2 integrates to 1/6
    scheme = build_quadrature("P1", 5)
    sq = np.abs(scheme.nodes[:, 0]) ** 2
    val = integrate(scheme, sq / (1.0 + sq) ** 2)
    assert abs(val - 1.0 / 6.0) <= 1e-14


def test_integrate_odd_symmetry():
    scheme = build_quadrature("P1", 5)
    z = scheme.nodes[:, 0]
    assert abs(integrate(scheme, z)) <= 1e-14
    assert abs(integrate(scheme, z.real * np.exp(-np.abs(z) ** 2))) <= 1e-14


def test_integrate_linearity():
    scheme = build_quadrature("P2", 3)
    rng = np.random.default_rng(0)
    f = rng.standard_normal(scheme.node_count) + 1j * rng.standard_normal(scheme.node_count)
    g = rng.standard_normal(scheme.node_count)
    a, b = 2.0 - 1.0j, -0.75
    lhs = integrate(scheme, a * f + b * g)
    rhs = a * integrate(scheme, f) + b * integrate(scheme, g)
    bound = 1e-14 * (abs(a) + abs(b)) * max(np.abs(f).max(), np.abs(g).max())
    assert abs(lhs - rhs) <= bound


def test_integrate_rejects_nonfinite_naming_node():
    scheme = build_quadrature("P1", 3)
    values = np.ones(scheme.node_count)
    values[7] = np.inf
    with pytest.raises(NumericalDomainError, match="node 7"):
        integrate(scheme, values)


def test_integrate_rejects_bad_shape():
    scheme = build_quadrature("P1", 3)
    with pytest.raises(InvalidInputError):
        integrate(scheme, np.ones(3))


def test_deterministic_summation_matches():
    scheme = build_quadrature("P1", 6)
    rng = np.random.default_rng(1)
    f = rng.standard_normal(scheme.node_count) + 1j * rng.standard_normal(scheme.node_count)
    fast = integrate(scheme, f)
    slow = integrate(scheme, f, deterministic=True)
    assert abs(fast - slow) <= 1e-14 * np.abs(f).max()
    assert integrate(scheme, f, deterministic=True) == slow


def test_nodes_and_weights_are_readonly():
    scheme = build_quadrature("P1", 3)
    with pytest.raises(ValueError):
        scheme.weights[0] = 2.0
    with pytest.raises(ValueError):
        scheme.nodes[0] = 0.0
