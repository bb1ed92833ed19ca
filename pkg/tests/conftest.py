import pytest

from emcf import cf_certified, compute_log2, scale_interval


@pytest.fixture(scope="session")
def log2_800():
    return compute_log2(800)


@pytest.fixture(scope="session")
def half_terms_800(log2_800):
    """Certified terms of (log 2)/2, enough to cover the first reference row."""
    return cf_certified(scale_interval(log2_800, 2)).terms
