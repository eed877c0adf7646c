import pytest

from f2sumset.f2core import DenseSet
from f2sumset.rng import SplitMix64, random_set_bernoulli


@pytest.fixture
def rng():
    return SplitMix64(20240601)


def random_set(rng, n, p=None):
    from fractions import Fraction
    if p is None:
        p = Fraction(rng.below(15) + 1, 16)
    return random_set_bernoulli(rng, n, p)


def hyperplane(n, gamma):
    bits = [bin(gamma & x).count("1") % 2 == 0 for x in range(1 << n)]
    return DenseSet(n, bits)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    def record(label: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
