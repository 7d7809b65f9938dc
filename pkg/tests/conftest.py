import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rackmsr.codes import build
from rackmsr.gf import make_field
from rackmsr.lambdas import explicit_lambdas, search_field
from rackmsr.params import derive

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def f27():
    return make_field(3, 3, [1, 2, 0, 1])


@pytest.fixture(scope="session")
def example_code(f27):
    p = derive(8, 4, 2, 3, "T1")
    return build(p, f27, explicit_lambdas(p, f27))


def _searched(*args):
    p = derive(*args)
    field, lset = search_field(p)
    return build(p, field, lset)


@pytest.fixture(scope="session")
def t1_v1_code():
    return _searched(12, 5, 2, 3, "T1")


@pytest.fixture(scope="session")
def t2_code():
    return _searched(12, 6, 2, 4, "T2")


@pytest.fixture(scope="session")
def t1_twin_code():
    return _searched(12, 6, 2, 4, "T1")


@pytest.fixture(scope="session")
def shortened_code():
    return _searched(6, 2, 2, 2, "T1")


# acceptance criteria outcomes, filled in by test_acceptance and printed at the end
ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        verdict, title, secs = ACCEPTANCE[num]
        terminalreporter.write_line(f"{verdict} criterion {num}: {title} ({secs:.2f} s)")
