import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from metrorisk.ingest import GridSpec, SceneConfig
from metrorisk.projection import Homography

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def unit_square_scene(offset_d=0.1, fps=10.0, **kw):
    corners = {"T_L": (0.0, 0.0), "T_R": (1.0, 0.0), "B_L": (0.0, 1.0), "B_R": (1.0, 1.0)}
    return SceneConfig(corners=corners, homography=Homography(np.eye(3)), offset_d=offset_d, fps=fps,
                       grid=GridSpec(0.0, 1.0, 0.0, 1.0, 0.1), **kw)


@pytest.fixture
def unit_scene():
    return unit_square_scene()
