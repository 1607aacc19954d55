from pathlib import Path

import pytest

from eqsim.obo import load_obo, merge

DATA = Path(__file__).parent / "data"
FIXTURE_FILES = ("anatomy.obo", "quality.obo", "spatial.obo")


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def tooth_ont():
    return load_obo(DATA / "tooth.obo")


@pytest.fixture
def fixture_ont():
    return merge([load_obo(DATA / f) for f in FIXTURE_FILES])


@pytest.fixture(scope="session")
def obo_paths():
    return [str(DATA / f) for f in FIXTURE_FILES]


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list = []


def pytest_addoption(parser):
    parser.addoption("--gs-archive", default=str(Path(__file__).parent.parent / "data" / "gs"),
                     help="directory holding the unpacked gold-standard archive")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
