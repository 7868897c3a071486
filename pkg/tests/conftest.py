import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from swarmcluster.datamodel import Dataset, RngStream  # noqa: E402
from swarmcluster.synth import gaussian_blobs  # noqa: E402

settings.register_profile(
    "default", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def square() -> Dataset:
    return Dataset(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


@pytest.fixture(scope="session")
def blobs4() -> tuple[Dataset, np.ndarray]:
    pts, labels = gaussian_blobs(4, 50, 0.5, 30.0, RngStream(11))
    return Dataset(pts), labels
