import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graev.errors import StructuralError
from graev.ground_space import (
    GroundSpace, PseudometricSequence, combine_sup, distance, load_space, metric_closure,
    sequence_from_json, space_from_json, validate_space,
)

from .conftest import spaces


def test_two_point_metric_is_valid():
    assert validate_space(GroundSpace.from_matrix([[0, 1], [1, 0]])).ok


def test_zero_distance_between_distinct_points_is_allowed(twin_space):
    assert validate_space(twin_space).ok
    assert distance(twin_space, 1, 2) == 0


def test_triangle_violation_is_reported_with_witness():
    rep = validate_space(GroundSpace.from_matrix([[0, 1, 3], [1, 0, 1], [3, 1, 0]]))
    assert not rep.ok
    assert [(v.axiom, v.indices) for v in rep.violations] == [("triangle", (0, 1, 2))]


def test_asymmetry_and_diagonal_reported():
    rep = validate_space(GroundSpace.from_matrix([[1, 2], [3, 0]]))
    kinds = sorted(v.axiom for v in rep.violations)
    assert kinds == ["diagonal", "symmetry"]


@pytest.mark.parametrize("table", [[[0, 1], [1, 0], [2, 2]], [[0, -1], [-1, 0]], [[0, float("nan")], [1, 0]]])
def test_structural_errors_are_distinct_from_violations(table):
    with pytest.raises(StructuralError):
        GroundSpace.from_matrix(table)


def test_euclidean_distance(line):
    assert line.distance(1, 3) == 3
    assert line.distance(0, 0) == 0
    with pytest.raises(IndexError):
        line.distance(0, 4)


def test_open_domain():
    s = GroundSpace.euclidean([[0.5], [0.2]], domain=[(0, 1)])
    assert validate_space(s).ok
    assert s.gap_to_complement([0.2]) == pytest.approx(0.2)
    assert not s.in_domain([1.0])
    bad = GroundSpace.euclidean([[0.5], [1.0]], domain=[(0, 1)])
    assert not validate_space(bad).ok


@given(spaces())
def test_closure_gives_valid_spaces(s):
    assert validate_space(s).ok
    d = s.matrix()
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0)


# ---- combine_sup -----------------------------------------------------------


def test_combine_sup_zero_sequence():
    seq = PseudometricSequence.of([np.zeros((3, 3))])
    assert np.all(combine_sup(seq).matrix() == 0)


def test_combine_sup_line_value(line):
    # p_n(a, b) = 2^(n+1), so the n = 1 term is min(1, 4) / 2 = 1/2
    seq = PseudometricSequence.of([line.matrix()])
    rho = combine_sup(seq)
    assert rho.distance(1, 2) == 0.5
    brute = max(2.0**-n * min(1.0, 2 ** (n + 1) * 1.0) for n in range(1, 11))
    assert rho.distance(1, 2) == brute


def test_partial_sums_closed_form():
    base = np.array([[0, 1.0], [1.0, 0]])
    for tail, ratio in (("repeat-last", 1.0), ("scale", 0.5), ("scale", 2.0), ("zero", 1.0)):
        seq = PseudometricSequence.of([base, 2 * base, 3 * base], tail, ratio)
        for count in range(1, 12):
            explicit = sum(seq.metric(i) for i in range(1, count + 1))
            assert seq.partial_sum(count) == pytest.approx(explicit, rel=1e-12)


@st.composite
def sequences(draw):
    s = draw(spaces(max_points=5))
    L = draw(st.integers(1, 4))
    scales = draw(st.lists(st.floats(0.0, 2.0), min_size=L, max_size=L))
    tail = draw(st.sampled_from(["repeat-last", "scale", "zero"]))
    ratio = draw(st.floats(0.1, 3.0))
    return PseudometricSequence.of([c * s.matrix() for c in scales], tail, ratio)


@settings(max_examples=60)
@given(sequences())
def test_combine_sup_is_pseudometric_with_ball_inclusion(seq):
    rho = combine_sup(seq)
    assert validate_space(rho).ok
    r = rho.matrix()
    assert r.max() <= 0.5
    for n in range(1, 11):
        p = seq.bound_sum(n)
        assert np.all(p[r < 2.0**-n] < 1)


# ---- JSON ------------------------------------------------------------------


def test_loader_requires_e_first(tmp_path):
    ok = {"kind": "matrix", "labels": ["e", "a"], "dist": [[0, 1], [1, 0]]}
    assert space_from_json(ok).size == 2
    with pytest.raises(StructuralError):
        space_from_json({**ok, "labels": ["a", "e"]})
    with pytest.raises(StructuralError):
        space_from_json({"kind": "matrix", "dist": [[0, 1, 2], [1, 0]]})
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"kind": "euclidean", "coords": [[0, 0], [3, 4]]}))
    assert load_space(p).distance(0, 1) == 5


def test_sequence_json(line):
    seq = sequence_from_json({"metrics": [{"scale": 1}, {"dist": (2 * line.matrix()).tolist()}], "tail": {"scale": 0.5}}, line)
    assert seq.tail == "scale" and seq.ratio == 0.5
    assert seq.metric(4)[1, 3] == pytest.approx(2 * 3 * 0.25)


def test_metric_closure_keeps_zero_edges():
    d = metric_closure([[0, 0, 5], [0, 0, 1], [5, 1, 0]])
    assert d[0, 2] == 1
