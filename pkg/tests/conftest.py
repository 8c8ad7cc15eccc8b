import pytest

from tropical_pants import subdivision


_CACHE = {}


@pytest.fixture(scope="session")
def sub_factory():
    """Cached subdivisions; building one per degree is enough for the whole run."""

    def build(d, method="auto"):
        key = (d, method)
        if key not in _CACHE:
            _CACHE[key] = subdivision.subdivide(d, method=method)
        return _CACHE[key]

    return build
