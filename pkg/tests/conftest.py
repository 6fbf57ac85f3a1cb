import pathlib

import pytest

from cfc import load_file, parse_coercion, parse_expr, parse_type

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
FAMS = ("Plus", "Equ", "OnlyInt", "F", "G", "Loop", "Double", "Quad")


def ty(src: str):
    return parse_type(src, FAMS)


def co(src: str):
    return parse_coercion(src, FAMS)


def ex(src: str):
    return parse_expr(src, FAMS)


def corpus(name: str):
    return load_file(str(CORPUS / name))


@pytest.fixture(scope="session")
def plus():
    return corpus("plus.cfc")


@pytest.fixture(scope="session")
def equ():
    return corpus("equ.cfc")


@pytest.fixture(scope="session")
def onlyint():
    return corpus("onlyint.cfc")


@pytest.fixture(scope="session")
def nat():
    return corpus("nat.cfc")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
