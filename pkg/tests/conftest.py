import numpy as np
import pytest
from hypothesis import strategies as st

from graev.boolean_group import GroupElement
from graev.ground_space import GroundSpace, metric_closure


@pytest.fixture
def line():
    # e=0, a=1, b=2, c=4 on the real line
    return GroundSpace.euclidean([[0], [1], [2], [4]], ["e", "a", "b", "c"])


@pytest.fixture
def twin_space():
    # rho(a, b) = 0, both at distance 5 from e
    return GroundSpace.from_matrix([[0, 5, 5], [5, 0, 0], [5, 0, 0]], ["e", "a", "b"])


@st.composite
def spaces(draw, min_points=2, max_points=6, zeros=True):
    """Random pseudometric spaces: quarter-integer tables repaired by shortest paths."""
    n = draw(st.integers(min_points, max_points))
    hi = 16
    entries = draw(st.lists(st.integers(0 if zeros else 1, hi), min_size=n * n, max_size=n * n))
    a = np.triu(np.array(entries, dtype=float).reshape(n, n) / 4.0, 1)
    return GroundSpace.from_matrix(metric_closure(a + a.T))


@st.composite
def space_and_elements(draw, k=1, **kw):
    s = draw(spaces(**kw))
    els = []
    for _ in range(k):
        sub = draw(st.sets(st.integers(1, s.size - 1), max_size=s.size - 1)) if s.size > 1 else set()
        els.append(GroupElement.of(sub))
    return (s, *els)
