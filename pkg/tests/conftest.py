import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def logo_image(path, size=320):
    """Synthetic 8-bit greyscale 'logo' (PGM), about 100 kB at the default size."""
    y, x = np.mgrid[0:size, 0:size]
    c = size // 2
    ring = ((x - c) ** 2 + (y - c) ** 2) < (0.37 * size) ** 2
    checks = (x // (size // 8) + y // (size // 8)) % 2 == 0
    img = (ring ^ checks).astype(np.uint8) * 200 + 30
    Path(path).write_bytes(f"P5 {size} {size} 255\n".encode() + img.tobytes())
    return path
