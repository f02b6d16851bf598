import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance line; lines are repeated in the terminal summary."""

    def _report(number: int, ok: bool, text: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
        print(line)
        ACCEPTANCE_LINES.append(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


# -- shared simulation batches (computed once per session) ------------------------------


@pytest.fixture(scope="session")
def long_batch():
    """r = 0.3, t = 1e4, 1e5 paths."""
    from polyareset.monte_carlo import batch_stats

    return batch_stats(0.3, 10_000, 100_000, 20240601, workers=4)


@pytest.fixture(scope="session")
def free_batch():
    """r = 0, t = 1e4, 2e4 paths."""
    from polyareset.monte_carlo import batch_stats

    return batch_stats(0, 10_000, 20_000, 31337, workers=4)


@pytest.fixture(scope="session")
def weak_batch():
    """r = 1e-3, t = 4000 (u = 4), 1e5 paths."""
    from polyareset.monte_carlo import batch_stats

    return batch_stats(1e-3, 4000, 100_000, 777, workers=4)


@pytest.fixture(scope="session")
def stationary():
    """Position frequencies at r = 0.3 after the default burn-in, 1e6 samples."""
    from polyareset.monte_carlo import stationary_histogram

    return stationary_histogram(0.3, None, 1_000_000, 4242, workers=4)


@pytest.fixture(scope="session")
def weak_exact():
    """Exact law of the cross count at r = 1e-3, t = 4000, as an array over k."""
    from polyareset.exact_laws import FLOAT, _reset_blocks, dressed_gf
    from polyareset.params import as_params
    from polyareset.series import variable

    t, p = 4000, as_params(1e-3)
    rho = dressed_gf(p, t, FLOAT)
    _, surv_b, r, _ = _reset_blocks(p, t, FLOAT)
    term = surv_b / (1 - variable(t, FLOAT) * surv_b * r)
    probs = []
    while sum(probs) < 1 - 1e-13 and len(probs) <= t // 2:
        probs.append(term[t])
        term = term * rho
    return np.array(probs)
