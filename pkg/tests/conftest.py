import numpy as np
import pytest

from squeezelab.gaussian import default_rng
from squeezelab.model import make_reference_model, make_squeezing_model


@pytest.fixture
def rng():
    return default_rng()


@pytest.fixture(scope="session")
def reference():
    return make_reference_model(omega=1.0, g=1.0, c=2.0)


@pytest.fixture(scope="session")
def squeezing():
    return make_squeezing_model(omega=1.0, s0=0.5, t_star=1.0, g=1.0, c=2.0)


@pytest.fixture(scope="session")
def squeezing_strong():
    return make_squeezing_model(omega=1.0, s0=2.0, t_star=1.0, g=1.0, c=2.0)


def closed_form_w(t, g=1.0, c=2.0):
    """Reference-model noise coefficients (w1, w2, w3, w4)."""
    w = 0.25 * c * np.expm1(g * t)
    return np.array([w, w, 0.0, g * t])


def random_w_point(rng, hbar=1.0, w3_zero=False):
    """Random physical (w1, w2, w3, w4) with strictly positive discriminant."""
    w4 = rng.uniform(0.05, 3.0)
    w3 = 0.0 if w3_zero else rng.normal(scale=2.0)
    excess = np.expm1(w4) / (4 * hbar)
    w1 = rng.uniform(0.1, 3.0) * (excess + abs(w3))
    w2 = (w3**2 + excess**2) / w1 + rng.uniform(0.01, 2.0)
    return (w1, w2, w3, w4)


def random_symplectic(rng, max_squeeze=1.5):
    """Rotation, squeeze, rotation: symplectic and well conditioned."""
    def rot(a):
        return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    r = rng.uniform(-max_squeeze, max_squeeze)
    return rot(rng.uniform(0, 2 * np.pi)) @ np.diag([np.exp(r), np.exp(-r)]) @ rot(rng.uniform(0, 2 * np.pi))


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


class Criterion:
    """Collects named checks; the verdict is printed in the terminal summary."""

    def __init__(self, number):
        self.number = number
        self.checks = []
        self.finished = False

    def check(self, name, ok, value=None):
        self.checks.append((name, bool(ok), value))

    def failed(self):
        return [n for n, ok, _ in self.checks if not ok]

    def detail(self):
        return ", ".join(f"{n}={v:.6g}" if isinstance(v, float) else n for n, _, v in self.checks)

    def verdict(self):
        self.finished = True
        assert self.checks and not self.failed(), f"criterion {self.number} failed: {self.failed()}"


@pytest.fixture
def criterion(request):
    crit = Criterion(request.node.get_closest_marker("criterion").args[0])
    yield crit
    ok = crit.finished and bool(crit.checks) and not crit.failed()
    if ok:
        detail = crit.detail()
    else:
        detail = f"failed: {', '.join(crit.failed()) or 'exception'}; {crit.detail()}"
    _ACCEPTANCE[crit.number] = (ok, detail)
    print(f"criterion {crit.number}: {'PASS' if ok else 'FAIL'} ({detail})")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
