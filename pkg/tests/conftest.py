import mpmath as mp
import pytest

from padelab import PrecisionCtx


@pytest.fixture(scope="session")
def ctx256():
    return PrecisionCtx(256)


@pytest.fixture(scope="session")
def ctx512():
    return PrecisionCtx(512)


@pytest.fixture(autouse=True)
def _pin_ambient_precision():
    """Library results must not depend on the caller's global precision;
    tests run under a deliberately low ambient setting to catch leaks."""
    old = mp.mp.prec
    mp.mp.prec = 53
    yield
    mp.mp.prec = old
