"""Shared presentation fixtures, loaded once per session from the built-in corpora."""
from pathlib import Path

import pytest

from monoid_functions import IndexWindow, Letter, Truncation, load_presentation
from utils.ideals import semilattice_closure

CORPORA = Path(__file__).parent / "corpora"


def _load(name):
    return load_presentation(CORPORA / f"{name}.pres")


@pytest.fixture(scope="session")
def S():
    return _load("S")


@pytest.fixture(scope="session")
def T():
    return _load("T")


@pytest.fixture(scope="session")
def free2():
    return _load("free2")


@pytest.fixture(scope="session")
def left_absorbing():
    return _load("left_absorbing")


def w(*letters):
    """Build a word from 'a', ('x', 0) style items."""
    return tuple(Letter(item) if isinstance(item, str) else Letter(*item) for item in letters)


def trunc(radius, low, high):
    return Truncation(radius, IndexWindow(low, high))


@pytest.fixture(scope="session")
def closure_S(S):
    return semilattice_closure(S, 500, 3, IndexWindow(0, 0))


@pytest.fixture(scope="session")
def closure_T(T):
    return semilattice_closure(T, 500, 3, IndexWindow(0, 0))
