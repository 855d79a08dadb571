import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from microquad import GaitParams, LegGeometry, RobotConfig


@pytest.fixture
def default_geom():
    return LegGeometry()


@pytest.fixture
def example_geom():
    """The 40/60 mm linkage used by the worked examples."""
    return LegGeometry(
        motor_spacing=0.02, proximal_len=0.04, distal_len=0.06,
        joint_min=0.17, joint_max=2.97,
    )


@pytest.fixture
def cfg():
    return RobotConfig()


@pytest.fixture
def trot():
    return GaitParams(stride_len=0.02, frequency=1.0)
