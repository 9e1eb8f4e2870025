import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graev.boolean_group import ZERO, GroupElement
from graev.errors import BallConditionError
from graev.graev_metric import graev_norm
from graev.ground_space import GroundSpace, PseudometricSequence, combine_sup
from graev.neighborhood import (
    WdWitness, ball_membership, ball_witness, certify_reduced, check_witness, dyadic_level, refute_bounded,
    wd_membership, wd_witness_from_ball,
)

from .conftest import spaces


def harmonic(line, L=8):
    # d_n = |x - y| / n
    return PseudometricSequence.of([line.matrix() / n for n in range(1, L + 1)], "repeat-last")


def test_zero_is_certified(line):
    v = wd_membership(ZERO, harmonic(line), 1)
    assert v.status == "certified" and v.witness.pairs == ()


def test_gap_two_pair_certified_at_index_three(line):
    v = wd_membership(GroupElement((2, 3)), harmonic(line), 8)
    assert v.status == "certified"
    assert v.witness.pairs == ((2, 3, 3),)
    # d_3(b, c) = 2/3 < 1, while d_1 and d_2 are too large
    assert harmonic(line).metric(3)[2, 3] == pytest.approx(2 / 3)
    assert check_witness(GroupElement((2, 3)), v.witness, harmonic(line)) == []


def test_unit_distances_refute(line):
    seq = PseudometricSequence.of([line.matrix()])
    # every non-degenerate pair of {0, 1, 2, 4} is at distance >= 1
    assert min(line.distance(x, y) for x in range(4) for y in range(4) if x != y) >= 1
    v = wd_membership(GroupElement((1, 3)), seq, 6)
    assert v.status == "refuted"


def test_unknown_when_guard_exceeded():
    n = 40
    s = GroundSpace.euclidean(np.arange(n, dtype=float)[:, None] * 2)
    seq = PseudometricSequence.of([s.matrix()])
    v = wd_membership(GroupElement((1, 2, 3)), seq, 4)
    assert v.status == "unknown"


def test_refuter_finds_non_reduced_witness():
    # e=0, a=2, b=1 on a line scaled by 0.9: a+e is too long for any W_n,
    # but (a+b) + (b+e) uses two short words
    s = GroundSpace.euclidean([[0], [2], [1]])
    seq = PseudometricSequence.of([0.9 * s.matrix()])
    g = GroupElement((1,))
    assert certify_reduced(g, seq, 3) is None
    w = refute_bounded(g, seq, 3)
    assert w is not None and check_witness(g, w, seq) == []
    assert len(w.pairs) == 2
    assert wd_membership(g, seq, 3).method == "exhaustive"
    assert refute_bounded(g, seq, 1) is None


def test_check_witness_catches_problems(line):
    seq = harmonic(line)
    g = GroupElement((2, 3))
    assert check_witness(g, WdWitness(((2, 3, 1),)), seq)  # d_1 = 2
    assert check_witness(g, WdWitness(((2, 3, 3), (1, 1, 3))), seq)  # repeated index
    assert check_witness(GroupElement((2,)), WdWitness(((2, 3, 3),)), seq)  # wrong sum


# ---- ball witnesses -------------------------------------------------------


def test_dyadic_levels():
    assert dyadic_level(0.2) == 2
    assert dyadic_level(0.05) == 4
    assert dyadic_level(0.25) == 1
    assert dyadic_level(0.125) == 2


def test_ball_witness_single_pair(line):
    seq = PseudometricSequence.of([0.1 * line.matrix()])
    rho = combine_sup(seq)
    assert rho.distance(1, 2) == pytest.approx(0.2)
    g = GroupElement((1, 2))
    bw = ball_witness(g, seq, rho)
    assert bw.norm == pytest.approx(0.2)
    assert bw.levels == [2]
    ((x, y, n),) = bw.witness.pairs
    assert (x, y) == (1, 2) and 4 <= n < 8
    assert check_witness(g, bw.witness, seq, buckets=True) == []


def test_ball_witness_two_buckets():
    s = GroundSpace.euclidean([[0], [10], [11], [20], [20.25]])
    seq = PseudometricSequence.of([0.1 * s.matrix()])
    rho = combine_sup(seq)
    g = GroupElement((1, 2, 3, 4))
    bw = ball_witness(g, seq, rho)
    weights = sorted(rho.distance(x, y) for x, y, _ in bw.witness.pairs)
    assert weights == pytest.approx([0.05, 0.2])
    idx = sorted(n for *_, n in bw.witness.pairs)
    assert 4 <= idx[0] < 8 and 16 <= idx[1] < 32
    assert check_witness(g, bw.witness, seq, buckets=True) == []


def test_ball_witness_zero_weight_pairs(twin_space):
    seq = PseudometricSequence.of([0.01 * twin_space.matrix()])
    rho = combine_sup(seq)
    g = GroupElement((1, 2))
    w = wd_witness_from_ball(g, seq, rho)
    assert check_witness(g, w, seq, buckets=True) == []
    assert w.pairs[0][2] == 3  # smallest level k = 1, first slot 2^1 + 1


def test_ball_precondition(line):
    seq = PseudometricSequence.of([line.matrix()])
    with pytest.raises(BallConditionError):
        wd_witness_from_ball(GroupElement((1, 2)), seq, combine_sup(seq))
    assert wd_witness_from_ball(ZERO, seq, combine_sup(seq)).pairs == ()


def test_ball_membership(line):
    g = GroupElement((1, 2, 3))
    assert ball_membership(ZERO, line, 1e-9)
    assert not ball_membership(g, line, 3)
    assert ball_membership(g, line, 3.0001)


@st.composite
def wd_systems(draw, max_points=6):
    s = draw(spaces(max_points=max_points))
    L = draw(st.integers(1, 5))
    scales = draw(st.lists(st.floats(0.005, 0.5), min_size=L, max_size=L))
    return s, PseudometricSequence.of([c * s.matrix() for c in scales])


@settings(max_examples=60, deadline=None)
@given(wd_systems())
def test_ball_inclusion_property(data):
    s, seq = data
    rho = combine_sup(seq)
    for mask in range(0, 1 << s.size, 2):
        g = GroupElement.from_mask(mask)
        if graev_norm(g, rho).value < 0.5:
            w = wd_witness_from_ball(g, seq, rho)
            assert check_witness(g, w, seq, buckets=True) == []


@settings(max_examples=60, deadline=None)
@given(wd_systems(), st.integers(1, 5), st.data())
def test_certifier_and_refuter_agree(data, n_max, draw):
    s, seq = data
    sub = draw.draw(st.sets(st.integers(1, s.size - 1), max_size=s.size - 1)) if s.size > 1 else set()
    g = GroupElement.of(sub)
    cert = certify_reduced(g, seq, n_max)
    found = refute_bounded(g, seq, n_max)
    if cert is not None:
        assert check_witness(g, cert, seq) == []
        assert found is not None
    if found is not None:
        assert check_witness(g, found, seq) == []
    v = wd_membership(g, seq, n_max)
    assert (v.status == "certified") == (found is not None)
    # padding with e keeps membership for larger n_max
    if v.status == "certified":
        assert wd_membership(g, seq, n_max + 2).status == "certified"
