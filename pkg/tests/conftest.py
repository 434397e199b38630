import math
from pathlib import Path

import pytest

from hypertrace.group import enumerate_classes, load_group, spectrum_from_classes
from hypertrace.trace import SurfaceModel

GROUP_FILE = Path(__file__).resolve().parent.parent / "groups" / "octagon_genus2.json"

# reference constants for the shipped group
SYSTOLE = 2.0 * math.acosh(1.0 + math.sqrt(2.0))
GEN_TRACE = 2.0 + 2.0 * math.sqrt(2.0)


@pytest.fixture(scope="session")
def octagon_spec():
    return load_group(GROUP_FILE)


@pytest.fixture(scope="session")
def octagon_classes8(octagon_spec):
    """All conjugacy classes to L = 8; enumerated once per session."""
    return enumerate_classes(octagon_spec, 8.0)


@pytest.fixture(scope="session")
def octagon_spectrum8(octagon_classes8):
    return spectrum_from_classes(octagon_classes8, 8.0)


@pytest.fixture(scope="session")
def octagon_model(octagon_spectrum8):
    return SurfaceModel(area=4.0 * math.pi, length_spectrum=octagon_spectrum8)
