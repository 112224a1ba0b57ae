import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from frontlab.flag import Signature
from frontlab.linalg import RngStream

settings.register_profile("default", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return RngStream(12345, 0)


def random_signature(gen: np.random.Generator, p_max=12, d_max=4) -> Signature:
    p = int(gen.integers(2, p_max + 1))
    d = int(gen.integers(1, min(d_max, p - 1) + 1))
    q = sorted(gen.choice(np.arange(1, p), size=d, replace=False).tolist())
    return Signature(p, tuple(q))


def block_orthogonal(gen: np.random.Generator, sig: Signature) -> np.ndarray:
    """Random block-diagonal orthogonal matrix matching the signature's blocks."""
    O = np.zeros((sig.qd, sig.qd))
    for sl in sig.block_slices():
        n = sl.stop - sl.start
        Q, R = np.linalg.qr(gen.standard_normal((n, n)))
        O[sl, sl] = Q * np.sign(np.diag(R))
    return O


# acceptance tests append their PASS/FAIL lines here; echoed after the run regardless of capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
