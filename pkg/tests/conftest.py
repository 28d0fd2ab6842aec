import numpy as np
import pytest

from irs_anchor.model import PathLossModel, SystemGeometry, draw_channels


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def rel_err(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(np.asarray(b))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def make_channels():
    """Factory for seeded realizations on the default desk geometry."""

    def make(M, N, K, seed=0):
        geometry = SystemGeometry.for_elements(N)
        return draw_channels(M, K, geometry, PathLossModel(), np.random.default_rng(seed))

    return make


def random_realization(rng, M, N, K):
    """Unit-variance i.i.d. channels, independent of any geometry."""
    from irs_anchor.model import ChannelRealization

    return ChannelRealization(
        H_bs=crandn(rng, M, N), h_bu=crandn(rng, K, M), h_su=crandn(rng, K, N),
        h_ba1=crandn(rng, M), h_ba2=crandn(rng, M), h_sa1=crandn(rng, N),
        h_sa2=crandn(rng, N), h_a1a2=complex(crandn(rng, 1)[0]),
        h_ba_los=crandn(rng, M), h_sa_los=np.exp(1j * rng.uniform(0, 2 * np.pi, N)))


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
