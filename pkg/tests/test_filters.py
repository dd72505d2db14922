import math

import numpy as np
import pytest
from scipy.integrate import quad

from critspec.filters import (
    GeometryConfig,
    PulseSequence,
    comb_tail_bound,
    cpmg_delta_comb,
    cpmg_filter,
    custom_filter,
    filter_function,
    jump_weights,
    momentum_filter,
    ramsey_filter,
    toggling_sign,
)


def brute_force_filter(omega, switch_times, tau, kappa=1.0):
    # |int_0^tau f(t) e^{i w t} dt|^2 kappa^2 by direct segment integration,
    # kept deliberately naive as the reference implementation
    re, im = 0.0, 0.0
    times = [0.0] + list(switch_times) + [tau]
    sign = 1.0
    for a, b in zip(times[:-1], times[1:]):
        if omega == 0.0:
            re += sign * (b - a)
        else:
            re += sign * (math.sin(omega * b) - math.sin(omega * a)) / omega
            im += sign * (math.cos(omega * a) - math.cos(omega * b)) / omega
        sign = -sign
    return kappa * kappa * (re * re + im * im)


def test_ramsey_filter_dc_value():
    seq = PulseSequence.ramsey(2.5, kappa=1.3)
    assert filter_function(0.0, seq) == pytest.approx(1.3**2 * 2.5**2, rel=1e-13)


def test_ramsey_filter_matches_brute_force():
    seq = PulseSequence.ramsey(1.7)
    for w in [0.3, 1.0, 4.7, 33.0]:
        assert ramsey_filter(w, seq) == pytest.approx(
            brute_force_filter(w, [], 1.7), rel=1e-12)


def test_cpmg_matches_brute_force():
    tau = 2.2
    for n in [1, 2, 5, 8]:
        seq = PulseSequence.cpmg(n, tau)
        switches = [tau * (k - 0.5) / n for k in range(1, n + 1)]
        for w in [0.17, 1.0, 9.3, 61.0]:
            assert cpmg_filter(w, seq) == pytest.approx(
                brute_force_filter(w, switches, tau), rel=1e-10)


def test_cpmg_equals_custom_with_same_switches():
    # the closed form and the generic jump sum are separate code paths
    tau, n = 3.0, 5
    seq_c = PulseSequence.cpmg(n, tau)
    seq_x = PulseSequence.custom([tau * (k - 0.5) / n for k in range(1, n + 1)], tau)
    w = np.geomspace(1e-3, 1e3, 200)
    np.testing.assert_allclose(cpmg_filter(w, seq_c), custom_filter(w, seq_x),
                               rtol=1e-9)


def test_cpmg_near_zero_frequency_is_finite_and_continuous():
    seq = PulseSequence.cpmg(4, 1.0)
    tiny = filter_function(np.array([0.0, 1e-200, 1e-30, 1e-8]), seq)
    assert np.all(np.isfinite(tiny))
    # even pulse count cancels the DC lobe
    assert tiny[0] == pytest.approx(0.0, abs=1e-20)
    odd = filter_function(np.array([0.0]), PulseSequence.cpmg(5, 1.0))
    assert odd[0] == pytest.approx(0.0, abs=1e-20)


def test_filter_function_dispatch_matches_variants():
    w = np.linspace(0.1, 20.0, 50)
    r = PulseSequence.ramsey(1.1)
    np.testing.assert_allclose(filter_function(w, r), ramsey_filter(w, r), rtol=1e-14)
    c = PulseSequence.cpmg(3, 1.1)
    np.testing.assert_allclose(filter_function(w, c), cpmg_filter(w, c), rtol=1e-14)


def test_jump_weights_sum_to_zero():
    for seq in [PulseSequence.ramsey(1.0), PulseSequence.hahn(2.0),
                PulseSequence.cpmg(6, 3.0),
                PulseSequence.custom([0.2, 0.9], 1.5)]:
        times, jumps = jump_weights(seq)
        assert abs(sum(jumps)) < 1e-14
        assert times[0] == 0.0 and times[-1] == pytest.approx(seq.tau)
        assert np.all(np.diff(times) > 0)


def test_toggling_sign_alternates():
    seq = PulseSequence.cpmg(2, 4.0)
    t = np.array([0.5, 1.5, 2.5, 3.5])
    np.testing.assert_allclose(toggling_sign(seq, t), [1.0, -1.0, -1.0, 1.0])
    # zero exactly at a switch instant and outside the window
    np.testing.assert_allclose(toggling_sign(seq, np.array([1.0, -0.3, 4.4])),
                               [0.0, 0.0, 0.0])


def test_sequence_validation():
    with pytest.raises(ValueError):
        PulseSequence.custom([0.9, 0.2], 1.0)       # not increasing
    with pytest.raises(ValueError):
        PulseSequence.custom([0.0, 0.5], 1.0)       # touches boundary
    with pytest.raises(ValueError):
        PulseSequence.cpmg(0, 1.0)
    with pytest.raises(ValueError):
        PulseSequence.ramsey(-1.0)


def test_momentum_filter_total_weight():
    # int_0^inf q^3 e^{-2qd} dq = 3/(8 d^4)
    for d in [0.5, 1.0, 3.0]:
        geom = GeometryConfig(d=d)
        val, _ = quad(lambda q: momentum_filter(q, geom), 0.0, 60.0 / d)
        assert val == pytest.approx(3.0 / (8.0 * d**4), rel=1e-8)


def test_momentum_filter_peak_location():
    geom = GeometryConfig(d=2.0)
    q = np.linspace(0.01, 3.0, 20000)
    w = momentum_filter(q, geom)
    assert q[np.argmax(w)] == pytest.approx(3.0 / (2.0 * 2.0), rel=1e-3)


def test_layered_geometry_adds_filter_weights():
    stacked = GeometryConfig(d=1.0, layer_offsets=(0.0, 0.7))
    q = np.geomspace(0.1, 10.0, 30)
    expect = (momentum_filter(q, GeometryConfig(d=1.0))
              + momentum_filter(q, GeometryConfig(d=1.7)))
    np.testing.assert_allclose(momentum_filter(q, stacked), expect, rtol=1e-12)


def test_cpmg_delta_comb_weights():
    seq = PulseSequence.cpmg(8, 2.0)
    harmonics, weights = cpmg_delta_comb(seq, n_max=9)
    omega_p = math.pi * 8 / 2.0
    np.testing.assert_allclose(harmonics, omega_p * np.arange(1, 19, 2))
    assert np.all(weights > 0)
    # m^{-2} falloff of the odd-harmonic comb
    np.testing.assert_allclose(weights[1:] / weights[0],
                               1.0 / np.arange(3, 19, 2) ** 2, rtol=1e-12)


def test_comb_tail_bound_decreases():
    seq = PulseSequence.cpmg(4, 1.0)
    bounds = [comb_tail_bound(seq, n) for n in [2, 8, 32, 128]]
    assert all(b > 0 for b in bounds)
    assert all(a > b for a, b in zip(bounds, bounds[1:]))


def test_pulse_spacing_frequency():
    seq = PulseSequence.cpmg(16, 4.0)
    assert seq.pulse_spacing_frequency == pytest.approx(math.pi * 16 / 4.0)
