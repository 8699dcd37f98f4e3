import pytest

from macsym.cfdigits import extract_digits, parse_alpha


@pytest.fixture(scope="session")
def pi3_digits():
    """First 2000 certified digits of the bundled pi-3 expansion."""
    return extract_digits(parse_alpha("pi-3"), 2000).digits


@pytest.fixture(scope="session")
def gamma_digits():
    """First 60 certified digits of the bundled gamma expansion."""
    return extract_digits(parse_alpha("gamma"), 60).digits
