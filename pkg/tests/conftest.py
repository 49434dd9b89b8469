import textwrap
from pathlib import Path

import pytest

from lexchains import fixtures
from lexchains.wordnet import load_portable, loads_portable

DATA = Path(fixtures.data_path(""))


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def mini_db():
    return load_portable(DATA / "mini_wordnet.txt")


@pytest.fixture(scope="session")
def mini_words():
    from lexchains.embeddings import load_text_model

    return load_text_model(DATA / "mini_words.vec")


@pytest.fixture(scope="session")
def figure2_db():
    return load_portable(DATA / "figure2_wordnet.txt")


@pytest.fixture
def toy_db():
    # A -> X (hypernym), A -> Y (also_see); B -> X; C isolated
    return loads_portable(textwrap.dedent("""\
        # toy database
        S n00000001 alpha | first letter
        S n00000002 beta | second letter
        S n00000003 gamma | third letter
        S n00000010 letter | a written symbol
        S n00000011 symbol | a sign
        P n00000001 hypernym n00000010
        P n00000001 also_see n00000011
        P n00000002 hypernym n00000010
        """))


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
