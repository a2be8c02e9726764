import numpy as np
import pytest

from grls.geometry import GrassmannPoint, random_point

_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome == "failed":
        detail = dict(report.user_properties).get("detail", "")
        _acceptance[name] = (report.outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, (outcome, detail) in sorted(_acceptance.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_orthogonal(k, rng):
    Q, R = np.linalg.qr(rng.standard_normal((k, k)))
    return Q * np.sign(np.diag(R))


def rotated(y: GrassmannPoint, rng) -> GrassmannPoint:
    """Same subspace, different representative."""
    return GrassmannPoint.from_matrix(y.Y @ random_orthogonal(y.k, rng))


def e_line(phi):
    return GrassmannPoint.from_matrix(np.array([[np.cos(phi)], [np.sin(phi)]]))


def dims(rng, n_max=8, k_max=3):
    n = int(rng.integers(2, n_max + 1))
    k = int(rng.integers(1, min(k_max, n - 1) + 1))
    return n, k


__all__ = ["random_orthogonal", "rotated", "e_line", "dims", "random_point"]
