import pytest
from hypothesis import given
from hypothesis import strategies as st

from graev.boolean_group import (
    ZERO, GroupElement, Representation, add, evaluate_representation, in_Bn, parse_element, sum_points, word_length,
)

elements = st.frozensets(st.integers(1, 12), max_size=8).map(GroupElement.of)


def test_add_is_symmetric_difference():
    assert add(GroupElement((1, 2)), GroupElement((2, 3))) == GroupElement((1, 3))
    assert ZERO + ZERO == ZERO


def test_support_invariants():
    with pytest.raises(ValueError):
        GroupElement((0, 1))
    with pytest.raises(ValueError):
        GroupElement((2, 1))
    assert GroupElement.of([3, 0, 1]).support == (1, 3)


def test_word_length_and_filtration():
    assert word_length(ZERO) == 0 and in_Bn(ZERO, 0)
    g = GroupElement((1, 2, 3))
    assert word_length(g) == 3
    assert in_Bn(g, 3) and in_Bn(g, 5) and not in_Bn(g, 2)
    assert word_length(GroupElement((1, 2)) + GroupElement((2,))) == 1


@pytest.mark.parametrize("xs, expected", [([1, 2, 1], (2,)), ([0, 0], ()), ([1, 2, 3], (1, 2, 3))])
def test_sum_points(xs, expected):
    assert sum_points(xs).support == expected


def test_sum_points_range(line):
    with pytest.raises(IndexError):
        sum_points([1, 9], line)


def test_evaluate_representation(line):
    g, w = evaluate_representation(Representation(((1, 2), (1, 3))), line)
    assert g == GroupElement((2, 3)) and w == 4
    assert evaluate_representation(Representation(((1, 1),)), line) == (ZERO, 0)
    assert evaluate_representation(Representation(((1, 0),)), line) == (GroupElement((1,)), 1)


def test_parse_element():
    assert parse_element("1,2,3") == GroupElement((1, 2, 3))
    assert parse_element("") == ZERO
    assert parse_element("2,2") == ZERO


@given(elements, elements, elements)
def test_abelian_exponent_two(g, h, k):
    assert (g + h) + k == g + (h + k)
    assert g + h == h + g
    assert g + g == ZERO
    assert g + ZERO == g


@given(elements, elements)
def test_length_bounds_and_parity(g, h):
    assert word_length(g + h) <= word_length(g) + word_length(h)
    assert word_length(g + h) % 2 == (word_length(g) + word_length(h)) % 2


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=6), st.randoms())
def test_representation_order_does_not_matter(pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    flipped = [(b, a) for a, b in shuffled]
    assert Representation(tuple(pairs)).element == Representation(tuple(flipped)).element


@given(elements)
def test_mask_roundtrip(g):
    assert GroupElement.from_mask(g.to_mask()) == g
