import pytest

from fracperim.quadrature import QuadConfig


@pytest.fixture
def quad():
    return QuadConfig()


@pytest.fixture
def quad_fast():
    """Looser tolerances for tests that only need percent-level accuracy."""
    return QuadConfig(rel_tol=1e-5, abs_tol=1e-8)
