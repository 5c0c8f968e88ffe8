import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from momentforge.fixtures import load_fixture  # noqa: E402


@pytest.fixture
def disk():
    return load_fixture("disk")


@pytest.fixture
def annulus():
    return load_fixture("annulus")


@pytest.fixture
def lens():
    return load_fixture("lens")


@pytest.fixture
def two_hole():
    return load_fixture("two_hole")


@pytest.fixture(params=["disk", "annulus", "lens", "two_hole"])
def planar_fixture(request):
    return load_fixture(request.param)
