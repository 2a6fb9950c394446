import numpy as np
import pytest

from rsstego.lsb import PixelImage


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cover_rgb(rng):
    return PixelImage(rng.integers(0, 256, (64, 64, 3), dtype=np.uint8))


@pytest.fixture
def cover_gray(rng):
    return PixelImage(rng.integers(0, 256, (48, 40), dtype=np.uint8))


@pytest.fixture(scope="session")
def astronaut():
    """512x512 RGB natural photograph used as a realistic cover."""
    data = pytest.importorskip("skimage.data")
    return PixelImage(data.astronaut())


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdict lines after the run, in criterion order."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            lines.extend(v for name, v in getattr(rep, "user_properties", ()) if name == "acceptance")
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
