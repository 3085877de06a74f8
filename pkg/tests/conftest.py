import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flatsys import Vec2, build_surface, global_max_surface, named_example  # noqa: E402
from flatsys.qfield import QScalar  # noqa: E402

H = QScalar(0, 1) / 2  # sqrt(3)/2


def square_torus():
    pts = [Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)]
    return build_surface([pts], [((0, 0), (0, 2)), ((0, 1), (0, 3))], "square torus")


def triangle_torus():
    half = QScalar(1) / 2
    up = [Vec2(0, 0), Vec2(1, 0), Vec2(half, H)]
    down = [Vec2(1, 0), Vec2(1 + half, H), Vec2(half, H)]
    return build_surface([up, down], [((0, 0), (1, 1)), ((0, 1), (1, 2)), ((0, 2), (1, 0))], "triangle torus")


def parallelogram_torus(u, v):
    pts = [Vec2(0.0, 0.0), Vec2(*u), Vec2(u[0] + v[0], u[1] + v[1]), Vec2(*v)]
    return build_surface([pts], [((0, 0), (0, 2)), ((0, 1), (0, 3))], "parallelogram torus")


GLOBAL_STRATA = [(0,), (2,), (1, 1), (4,), (2, 2), (2, 0)]
LOCAL_NAMES = ["s4", "s22", "s20", "s1100", "s110"]


@pytest.fixture(scope="session")
def sq():
    return square_torus()


@pytest.fixture(scope="session")
def tri_torus():
    return triangle_torus()


@pytest.fixture(scope="session")
def s4():
    return named_example("s4")


@pytest.fixture(scope="session")
def gmax():
    return {sig: global_max_surface(sig) for sig in GLOBAL_STRATA}


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
