"""Closed-form reference values: monomial moments and line-bundle fixed points.

The moments here have elementary Beta-integral closed forms (unit-mass volume
convention):

    P1:  int |z|^(2j) (1+|z|^2)^-k dVol            = j! (k-j)! / (k+1)!
                                                   = 1 / ((k+1) C(k,j))
    P2:  int |z1|^(2a) |z2|^(2b) (1+|z|^2)^-k dVol = 2 a! b! (k-a-b)! / (k+2)!

An independently generated corpus of the same values (symbolic integration,
frozen under data/moments.txt) ships with the package; tests require the two
derivations and the quadrature schemes to agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import comb, factorial

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "MomentTable",
    "load_moment_corpus",
    "monomial_moment_p1",
    "monomial_moment_p2",
    "balanced_gram_line_p1",
    "balanced_gram_line_p2",
]


def monomial_moment_p1(j: int, k: int) -> Fraction:
    """Moment of |z|^(2j) (1+|z|^2)^-k on P1; requires 0 <= j <= k."""
    if not 0 <= j <= k:
        raise InvalidInputError(f"need 0 <= j <= k, got j={j}, k={k}")
    return Fraction(1, (k + 1) * comb(k, j))


def monomial_moment_p2(a: int, b: int, k: int) -> Fraction:
    """Moment of |z1|^(2a) |z2|^(2b) (1+|z1|^2+|z2|^2)^-k on P2; a, b >= 0, a+b <= k."""
    if a < 0 or b < 0 or a + b > k:
        raise InvalidInputError(f"need a,b >= 0 and a+b <= k, got a={a}, b={b}, k={k}")
    return Fraction(2 * factorial(a) * factorial(b) * factorial(k - a - b), factorial(k + 2))


def balanced_gram_line_p1(k: int) -> np.ndarray:
    """Fixed-point Gram diag(1/C(k,j)) for the degree-k line bundle on P1.

    The diagonal solves sum_j |z|^(2j)/d_j = (1+|z|^2)^k, which makes the
    section density the exact inverse of the background weight.
    """
    if k < 1:
        raise InvalidInputError(f"degree must be >= 1, got {k}")
    return np.diag([1.0 / comb(k, j) for j in range(k + 1)]).astype(np.complex128)


def balanced_gram_line_p2(k: int) -> np.ndarray:
    """Fixed-point Gram diag(1/multinomial(k; a, b)) for degree k on P2.

    Diagonal order follows the monomial basis ordering of build_sections:
    (a, b) lexicographic with a outermost.  The multinomial identity
    sum_{a+b<=k} C(k;a,b) |z1|^(2a) |z2|^(2b) = (1+|z1|^2+|z2|^2)^k plays the
    role the binomial theorem plays on P1.
    """
    if k < 1:
        raise InvalidInputError(f"degree must be >= 1, got {k}")
    diag = []
    for a in range(k + 1):
        for b in range(k - a + 1):
            diag.append(factorial(a) * factorial(b) * factorial(k - a - b) / factorial(k))
    return np.diag(diag).astype(np.complex128)


@dataclass(frozen=True)
class MomentTable:
    """Frozen rational moments keyed by exponent multi-index and weight degree."""

    p1: dict[tuple[int, int], Fraction]
    p2: dict[tuple[int, int, int], Fraction]


@lru_cache(maxsize=1)
def load_moment_corpus() -> MomentTable:
    """Parse data/moments.txt into exact rationals."""
    text = resources.files("balmet").joinpath("data/moments.txt").read_text()
    p1: dict[tuple[int, int], Fraction] = {}
    p2: dict[tuple[int, int, int], Fraction] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p1":
            j, k, num, den = map(int, parts[1:])
            p1[(j, k)] = Fraction(num, den)
        elif parts[0] == "p2":
            a, b, k, num, den = map(int, parts[1:])
            p2[(a, b, k)] = Fraction(num, den)
        else:
            raise InvalidInputError(f"unrecognized corpus line: {line!r}")
    return MomentTable(p1=p1, p2=p2)
