import os
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from ttg.catalog import family_lattice
from ttg.order import FinitePoset, _transitive_closure

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

GOLDEN = Path(__file__).parent / "golden"


@st.composite
def posets(draw, max_points=6):
    n = draw(st.integers(0, max_points))
    below = [1 << i for i in range(n)]
    for b in range(n):
        for a in range(b):
            if draw(st.booleans()):
                below[b] |= 1 << a
    perm = draw(st.permutations(range(n)))
    closed = _transitive_closure(n, below)
    # shuffle so the labels are not a linear extension
    down = [0] * n
    for i in range(n):
        down[perm[i]] = sum(1 << perm[j] for j in range(n) if closed[i] >> j & 1)
    return FinitePoset.from_masks([f"p{i}" for i in range(n)], down)


@st.composite
def meet_closed_lattices(draw, ground=5, max_elements=20):
    full = (1 << ground) - 1
    family = {full}
    for s in draw(st.lists(st.integers(0, full), max_size=8)):
        new = family | {s} | {s & t for t in family}
        if len(new) <= max_elements:
            family = new
    return family_lattice(family)


@pytest.fixture
def golden():
    return GOLDEN


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
