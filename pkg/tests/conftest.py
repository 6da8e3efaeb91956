import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from PIL import Image

from phishvis.imaging import RasterImage

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_image(rng, w, h):
    return RasterImage(rng.integers(0, 256, (h, w, 3), dtype=np.uint8))


def blocky_image(rng, w, h, block=8):
    """Piecewise-constant image: large flat patches give real edges and textures."""
    small = rng.integers(0, 256, (-(-h // block), -(-w // block), 3), dtype=np.uint8)
    return RasterImage(np.repeat(np.repeat(small, block, 0), block, 1)[:h, :w])


def save_png(path, arr):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(path)


def make_color_corpus(root, colors, n=20, size=(160, 120), seed=0):
    """One directory per class of near-solid screenshots; jitter keeps files distinct."""
    rng = np.random.default_rng(seed)
    w, h = size
    for name, rgb in colors.items():
        for i in range(n):
            c = np.clip(np.asarray(rgb) + rng.integers(-8, 9, 3), 0, 255)
            save_png(root / name / f"{i:03d}.png", np.broadcast_to(c, (h, w, 3)))
    return root


RGB_COLORS = {"red": (220, 30, 30), "green": (30, 200, 40), "blue": (30, 40, 210)}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def color_corpus(tmp_path):
    return make_color_corpus(tmp_path / "corpus", RGB_COLORS)


# acceptance criteria record one status line each; echoed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


def record_acceptance(criterion: str, ok, detail: str) -> None:
    status = {True: "PASS", False: "FAIL"}.get(ok, ok)
    line = f"[{status}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
