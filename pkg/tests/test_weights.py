"""Spiked weight sequences: values, layout validation, slope condition."""

import math

import numpy as np
import pytest

from hardyshift import SpikeSpec, WeightSequence, build_spiked_weights, slope_report


def test_single_spike_weight_values():
    w = build_spiked_weights(1.0, [5])
    # half width 1: profile 1, 4, 1 across indices 5, 6, 7
    assert [w.weight_at(n) for n in range(5, 8)] == [1.0, 4.0, 1.0]
    assert w.weight_at(0) == 1.0
    assert w.weight_at(100) == 1.0


def test_half_widths_grow_with_spike_index():
    w = build_spiked_weights(1.0, [3, 32, 117])
    assert [sp.half_width for sp in w.spikes] == [1, 2, 3]
    # peaks (1+alpha)^{2k} land at start + k, bit exact for alpha = 1
    assert w.weight_at(4) == 4.0
    assert w.weight_at(34) == 16.0
    assert w.weight_at(120) == 64.0
    assert [w.peak_value(k) for k in (1, 2, 3)] == [4.0, 16.0, 64.0]


def test_spike_profile_is_symmetric_triangle():
    w = WeightSequence(alpha=0.5, spikes=(SpikeSpec(start=10, half_width=3),))
    vals = w.weight_range(10, 17)
    assert np.array_equal(vals, vals[::-1])
    assert np.all(np.diff(vals[:4]) > 0)
    assert vals[3] == pytest.approx(1.5 ** 6, rel=1e-15)


def test_weight_range_matches_pointwise_lookup():
    w = build_spiked_weights(0.7, [2, 20])
    vals = w.weight_range(0, 30)
    assert all(vals[n] == w.weight_at(n) for n in range(30))


def test_power_and_log_evaluation_routes_agree():
    w = build_spiked_weights(0.37, [4, 40, 200])
    n = np.arange(0, 210)
    via_log = np.exp(w.log_weight_range(0, 210))
    via_pow = w.weight_range(0, 210)
    assert np.allclose(via_pow, via_log, rtol=1e-12, atol=0.0)
    assert all(w.log_weight_at(int(k)) == w.log_weight_range(0, 210)[k] for k in n[::17])


def test_layout_validation():
    with pytest.raises(ValueError):
        SpikeSpec(start=-1, half_width=1)
    with pytest.raises(ValueError):
        SpikeSpec(start=0, half_width=0)
    with pytest.raises(ValueError):
        # first spike covers 3..5, so a start at 5 collides
        WeightSequence(alpha=1.0, spikes=(SpikeSpec(3, 1), SpikeSpec(5, 1)))
    with pytest.raises(ValueError):
        WeightSequence(alpha=0.0)
    with pytest.raises(ValueError):
        build_spiked_weights(1.0, [3, 4])


def test_last_index_and_empty_layout():
    assert build_spiked_weights(1.0, []).last_index == 0
    assert build_spiked_weights(1.0, [3, 32, 117]).last_index == 123


def test_slope_report_on_spiked_weights():
    for alpha in (0.25, 1.0, 3.0):
        w = build_spiked_weights(alpha, [3, 32, 117])
        rep = slope_report(w)
        assert rep.passed
        # the slope bound is attained on every climb and descent
        assert rep.max_ratio == pytest.approx((1.0 + alpha) ** 2, rel=1e-12)
        assert rep.min_ratio == pytest.approx((1.0 + alpha) ** -2, rel=1e-12)


def test_slope_report_rejects_steep_raw_sequence():
    rep = slope_report([1.0, 10.0, 1.0], alpha=1.0)
    assert not rep.passed
    assert rep.max_ratio == 10.0


def test_slope_report_raw_needs_alpha():
    with pytest.raises(ValueError):
        slope_report([1.0, 2.0])


def test_log_weight_is_zero_off_spikes():
    w = build_spiked_weights(2.0, [10])
    assert w.log_weight_at(9) == 0.0
    assert w.log_weight_at(13) == 0.0
    assert w.log_weight_at(11) == pytest.approx(2.0 * math.log1p(2.0), rel=1e-15)
