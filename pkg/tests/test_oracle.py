from fractions import Fraction
from math import comb

import numpy as np
import pytest

from balmet import (
    InvalidInputError,
    balanced_gram_line_p1,
    balanced_gram_line_p2,
    load_moment_corpus,
    monomial_moment_p1,
    monomial_moment_p2,
)


def test_p1_closed_form_matches_frozen_corpus():
    corpus = load_moment_corpus()
    assert len(corpus.p1) == 66
    for (j, k), frozen in corpus.p1.items():
        assert monomial_moment_p1(j, k) == frozen


def test_p2_closed_form_matches_frozen_corpus():
    corpus = load_moment_corpus()
    assert len(corpus.p2) == 165
    for (a, b, k), frozen in corpus.p2.items():
        assert monomial_moment_p2(a, b, k) == frozen


def test_p1_reference_values():
    assert monomial_moment_p1(0, 0) == 1
    assert monomial_moment_p1(0, 1) == Fraction(1, 2)
    assert monomial_moment_p1(1, 2) == Fraction(1, 6)


def test_p2_reference_values():
    assert monomial_moment_p2(0, 0, 0) == 1
    assert monomial_moment_p2(0, 0, 1) == Fraction(1, 3)


def test_p2_swap_symmetry():
    for k in range(6):
        for a in range(k + 1):
            for b in range(k - a + 1):
                assert monomial_moment_p2(a, b, k) == monomial_moment_p2(b, a, k)


def test_moments_positive():
    corpus = load_moment_corpus()
    assert all(v > 0 for v in corpus.p1.values())
    assert all(v > 0 for v in corpus.p2.values())


@pytest.mark.parametrize("j,k", [(-1, 2), (3, 2)])
def test_p1_range_errors(j, k):
    with pytest.raises(InvalidInputError):
        monomial_moment_p1(j, k)


def test_p2_range_errors():
    with pytest.raises(InvalidInputError):
        monomial_moment_p2(2, 2, 3)
    with pytest.raises(InvalidInputError):
        monomial_moment_p2(-1, 0, 3)


def test_balanced_gram_p1_values():
    assert np.allclose(balanced_gram_line_p1(1), np.eye(2))
    assert np.allclose(balanced_gram_line_p1(2), np.diag([1.0, 0.5, 1.0]))
    assert np.allclose(balanced_gram_line_p1(3), np.diag([1.0, 1 / 3, 1 / 3, 1.0]))


def test_balanced_gram_p1_from_binomials():
    for k in (1, 2, 3, 4):
        diag = np.diag(balanced_gram_line_p1(k)).real
        assert np.array_equal(diag, [1.0 / comb(k, j) for j in range(k + 1)])


def test_balanced_gram_p2_values():
    # (a, b) lex order: (0,0), (0,1), (0,2), (1,0), (1,1), (2,0)
    expected = np.diag([1.0, 0.5, 1.0, 0.5, 0.5, 1.0])
    assert np.allclose(balanced_gram_line_p2(2), expected)


def test_balanced_gram_degree_errors():
    with pytest.raises(InvalidInputError):
        balanced_gram_line_p1(0)
    with pytest.raises(InvalidInputError):
        balanced_gram_line_p2(-1)
