import pytest

from twomatrix import catalog
from twomatrix.recursion import RecursionEngine


@pytest.fixture(scope="session")
def curves():
    return {
        "gue": catalog.gue(),
        "gue-reduction": catalog.gue_reduction(),
        "gaussian-2mm": catalog.gaussian_2mm(),
        "cubic-quadratic": catalog.cubic_quadratic(),
        "d2-two": catalog.d2_two(),
        "quartic": catalog.quartic(),
    }


@pytest.fixture(scope="session")
def engines(curves):
    return {name: RecursionEngine(c) for name, c in curves.items()}
