import pytest
from hypothesis import settings

from ekappa.catalog import default_catalog

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def cat():
    return default_catalog()


@pytest.fixture(scope="session")
def all_checks():
    """Every check of `ekappa check all` at the default options, by id."""
    from ekappa.cli import run_suite

    return {c.id: c for c in run_suite("all")}
