"""Threshold-bin label conventions and their inverses."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from turfbbn.binning import (
    bin_for_value,
    bin_labels,
    cuts_from_labels,
    format_cut,
    states_above,
    states_below,
)
from turfbbn.errors import ThresholdNotACutPoint


def test_single_cut_labels():
    assert bin_labels([0.31]) == ["le_0.31", "gt_0.31"]


def test_two_cut_labels():
    assert bin_labels([0.15, 0.31]) == ["le_0.15", "0.15_to_0.31", "gt_0.31"]


def test_format_cut_drops_trailing_zeros():
    assert format_cut(0.5) == "0.5"
    assert format_cut(2.0) == "2"


def test_labels_require_increasing_cuts():
    with pytest.raises(ValueError):
        bin_labels([0.5, 0.5])
    with pytest.raises(ValueError):
        bin_labels([])


def test_cuts_recovered_from_labels():
    assert cuts_from_labels(("le_0.5", "0.5_to_0.59", "gt_0.59")) == [0.5, 0.59]


def test_cuts_from_labels_rejects_plain_names():
    with pytest.raises(ValueError):
        cuts_from_labels(("low", "high"))


def test_cuts_from_labels_rejects_gaps():
    with pytest.raises(ValueError):
        cuts_from_labels(("le_0.1", "0.2_to_0.3", "gt_0.3"))
    with pytest.raises(ValueError):
        cuts_from_labels(("le_0.1", "gt_0.3"))


def test_boundary_value_joins_lower_bin():
    cuts = [0.15, 0.31]
    assert bin_for_value(0.15, cuts) == 0
    assert bin_for_value(0.31, cuts) == 1
    assert bin_for_value(0.16, cuts) == 1
    assert bin_for_value(0.32, cuts) == 2
    assert bin_for_value(-1.0, cuts) == 0


def test_states_above_and_below():
    states = ("le_0.5", "0.5_to_0.59", "gt_0.59")
    assert states_above(states, 0.59) == ["gt_0.59"]
    assert states_above(states, 0.5) == ["0.5_to_0.59", "gt_0.59"]
    assert states_below(states, 0.5) == ["le_0.5"]
    assert states_below(states, 0.59) == ["le_0.5", "0.5_to_0.59"]


def test_threshold_must_be_a_cut_point():
    states = ("le_0.15", "0.15_to_0.31", "gt_0.31")
    with pytest.raises(ThresholdNotACutPoint):
        states_above(states, 0.5)
    with pytest.raises(ThresholdNotACutPoint):
        states_below(states, 0.2)


def test_plain_labels_rejected_for_thresholds():
    with pytest.raises(ThresholdNotACutPoint):
        states_above(("low", "high"), 0.5)


@given(st.lists(st.floats(min_value=-100, max_value=100,
                          allow_nan=False, allow_infinity=False),
                min_size=1, max_size=5, unique=True))
def test_labels_roundtrip(cuts):
    cuts = sorted(round(c, 4) for c in cuts)
    if len(set(cuts)) != len(cuts):
        return
    labels = bin_labels(cuts)
    assert cuts_from_labels(labels) == [float(format_cut(c)) for c in cuts]


@given(st.floats(min_value=-10, max_value=10, allow_nan=False),
       st.lists(st.integers(min_value=-50, max_value=50),
                min_size=1, max_size=4, unique=True))
def test_bin_for_value_is_monotone(value, raw_cuts):
    cuts = sorted(float(c) for c in raw_cuts)
    idx = bin_for_value(value, cuts)
    assert 0 <= idx <= len(cuts)
    if idx > 0:
        assert value > cuts[idx - 1]
    if idx < len(cuts):
        assert value <= cuts[idx]
