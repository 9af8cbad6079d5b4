import pytest

from src.akhiezer.formulas import build_pipeline
from src.akhiezer.geometry import validate_interval_set
from src.akhiezer.opoly import stieltjes
from src.akhiezer.quadrature import build_rules

ORDER = 200


@pytest.fixture(scope="session")
def chebyshev():
    """E = (-1, 1)."""
    return validate_interval_set([], [-1.0, 1.0])


@pytest.fixture(scope="session")
def two_band():
    """E = (-1, -0.3) U (0.1, 1)."""
    return validate_interval_set([-0.3], [-1.0, 0.1, 1.0])


@pytest.fixture(scope="session")
def three_band():
    """E = (-1, -0.5) U (-0.3, 0.2) U (0.5, 1)."""
    return validate_interval_set([-0.5, 0.2], [-1.0, -0.3, 0.5, 1.0])


@pytest.fixture(scope="session")
def two_band_engine(two_band):
    return build_rules(two_band, ORDER)


@pytest.fixture(scope="session")
def chebyshev_table(chebyshev):
    return stieltjes(chebyshev, build_rules(chebyshev, ORDER), 20)


@pytest.fixture(scope="session")
def two_band_table(two_band, two_band_engine):
    return stieltjes(two_band, two_band_engine, 12)


@pytest.fixture(scope="session")
def three_band_table(three_band):
    return stieltjes(three_band, build_rules(three_band, ORDER), 10)


@pytest.fixture(scope="session")
def chebyshev_pipeline(chebyshev):
    return build_pipeline(chebyshev, ORDER)


@pytest.fixture(scope="session")
def two_band_pipeline(two_band):
    return build_pipeline(two_band, ORDER)


@pytest.fixture(scope="session")
def three_band_pipeline(three_band):
    return build_pipeline(three_band, ORDER)
