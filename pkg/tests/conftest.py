import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from imago import catalog
from imago.algebra import Algebra
from imago.belief import ProbabilityDist
from imago.selection import SelectionFunction

MODELS = Path(__file__).resolve().parent.parent / "models"


@st.composite
def algebras(draw, min_atoms=1, max_atoms=3):
    return Algebra(draw(st.integers(min_atoms, max_atoms)))


@st.composite
def selections(draw, algebra=None, max_atoms=3, normal=False):
    alg = algebra or draw(algebras(max_atoms=max_atoms))
    cells = [
        draw(st.integers(1 if normal and a else 0, alg.top))
        for a in alg.events()
        for _ in alg.atoms()
    ]
    return SelectionFunction(alg, tuple(cells))


@st.composite
def probabilities(draw, algebra):
    counts = draw(st.lists(st.integers(1, 50), min_size=algebra.atom_count, max_size=algebra.atom_count))
    return ProbabilityDist.from_integers(algebra, counts)


@st.composite
def selection_with_prior(draw, max_atoms=3, normal=False):
    f = draw(selections(max_atoms=max_atoms, normal=normal))
    return f, draw(probabilities(f.algebra))


@pytest.fixture
def example_f():
    return catalog.worked_selection()


@pytest.fixture
def example_P():
    return catalog.worked_probability()


@pytest.fixture
def example_alg():
    return catalog.worked_algebra()


# -- acceptance reporting -------------------------------------------------------
#
# Tests marked ``@pytest.mark.criterion(k, "summary")`` get one PASS/FAIL line
# each in the terminal summary, whatever the capture settings.

_CRITERIA: dict[int, tuple[str, list[bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, summary): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, summary = marker.args
    entry = _CRITERIA.setdefault(number, (summary, []))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry[1].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        summary, outcomes = _CRITERIA[number]
        status = "PASS" if outcomes and all(outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {summary}")
