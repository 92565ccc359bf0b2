from functools import lru_cache

import pytest

import balmet

# One representative per built-in family, at orders where the whole invariant
# suite runs in seconds.
REPRESENTATIVE_BUNDLES = (
    ("LineP1(2)", 6),
    ("LineP1(3)", 6),
    ("Sum(1,3)", 6),
    ("LineP2(2)", 4),
    ("TangentP2", 4),
)


@lru_cache(maxsize=None)
def problem_for(bundle_id: str, order: int):
    """Scheme + section basis, cached across the whole session."""
    _, _, manifold = balmet.parse_bundle_id(bundle_id)
    scheme = balmet.build_quadrature(manifold, order)
    return scheme, balmet.build_sections(bundle_id, scheme)


@pytest.fixture(scope="session")
def problem():
    return problem_for
