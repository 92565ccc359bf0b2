#!/usr/bin/env python3
"""Regenerate the frozen monomial-moment corpus shipped with the package.

Every entry is derived symbolically with sympy, by direct Beta/Dirichlet
integration in affine coordinates, and written as an exact rational.  The
library's closed-form oracle and the quadrature schemes are both tested
against this file; neither is allowed to generate it.

Normalization: the Fubini-Study volume form is scaled to total mass 1 on
both P1 and P2.  In the affine chart that measure is

    P1:  dVol = (1/pi)  (1+|z|^2)^-2          dx dy
    P2:  dVol = (2/pi^2)(1+|z1|^2+|z2|^2)^-3  dx1 dy1 dx2 dy2

and the tabulated moments are

    p1 j k   ->  integral of |z|^(2j) (1+|z|^2)^-k  dVol
    p2 a b k ->  integral of |z1|^(2a) |z2|^(2b) (1+|z1|^2+|z2|^2)^-k dVol

Usage:  python scripts/generate_moment_corpus.py [out_path]
"""

import sys
from pathlib import Path

import sympy as sp

P1_MAX_K = 10
P2_MAX_K = 8

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else (
    Path(__file__).resolve().parents[1] / "src" / "balmet" / "data" / "moments.txt"
)


def p1_moment(j: int, k: int) -> sp.Rational:
    # radial substitution s = |z|^2 turns the moment into a Beta integral:
    #   (1/pi) * 2*pi * (1/2) * Int_0^oo s^j (1+s)^-(k+2) ds
    s = sp.symbols("s", positive=True)
    val = sp.integrate(s**j / (1 + s) ** (k + 2), (s, 0, sp.oo))
    return sp.nsimplify(val)


def p2_moment(a: int, b: int, k: int) -> sp.Rational:
    # iterated radial substitutions s = |z1|^2, t = |z2|^2:
    #   (2/pi^2) * (2*pi)^2 * (1/4) * Int s^a t^b (1+s+t)^-(k+3) ds dt
    s, t = sp.symbols("s t", positive=True)
    inner = sp.integrate(s**a / (1 + s + t) ** (k + 3), (s, 0, sp.oo))
    val = 2 * sp.integrate(t**b * inner, (t, 0, sp.oo))
    return sp.nsimplify(val)


def main() -> None:
    lines = [
        "# Monomial moments of the unit-mass Fubini-Study volume, exact rationals.",
        "# Derived symbolically (Beta/Dirichlet integrals); see scripts/generate_moment_corpus.py.",
        "# Format:  p1 j k num den   |   p2 a b k num den",
    ]
    for k in range(P1_MAX_K + 1):
        for j in range(k + 1):
            v = sp.Rational(p1_moment(j, k))
            lines.append(f"p1 {j} {k} {v.p} {v.q}")
    for k in range(P2_MAX_K + 1):
        for a in range(k + 1):
            for b in range(k - a + 1):
                v = sp.Rational(p2_moment(a, b, k))
                lines.append(f"p2 {a} {b} {k} {v.p} {v.q}")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 3} entries to {OUT}")


if __name__ == "__main__":
    main()
