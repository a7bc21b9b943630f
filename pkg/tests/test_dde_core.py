#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys
import math
import logging

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attractorkit.errors import BlowUpError, ConfigError, DelayAlignmentError, DomainError
from attractorkit.modules.dde_core import (
    BuiltinNonlinearity,
    DdeCoreModule,
    DelayModel,
    HistorySegment,
    random_smooth_segments,
)
from config.settings import get_config

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')


def make_core():
    return DdeCoreModule(get_config())


def test_step_must_divide_delay():
    core = make_core()
    assert core.steps_per_delay(1.0, 0.01) == 100
    try:
        core.steps_per_delay(1.0, 0.3)
    except DelayAlignmentError as e:
        assert e.code == "DELAY_ALIGNMENT"
    else:
        raise AssertionError("h = 0.3 does not divide r = 1")


def test_ode_limit_matches_exponential():
    core = make_core()
    model = DelayModel(1, [[-1.0]], 0.0, 1.0)
    phi = HistorySegment.constant([1.0], 1.0, 0.01)
    traj = core.integrate(model, phi, 1.0, 0.01)
    assert abs(traj.states[-1, 0] - math.exp(-1.0)) < 1e-9
    # smooth solution, so the differenced derivative matches the right-hand side
    assert traj.delay_residual().max() < 1e-6


def test_pure_delay_is_exact_on_polynomials():
    # x' = -x(t - 1), x = 1 on [-1, 0]: x = 1 - t on [0, 1], then 1 - t + (t - 1)^2 / 2
    core = make_core()
    model = DelayModel(1, [[0.0]], -1.0, 1.0)
    phi = HistorySegment.constant([1.0], 1.0, 0.01)
    traj = core.integrate(model, phi, 2.0, 0.01)
    assert abs(traj.state_at(1.0)[0]) < 1e-10
    assert abs(traj.state_at(1.5)[0] - (1 - 1.5 + 0.125)) < 1e-9
    assert abs(traj.states[-1, 0] + 0.5) < 1e-9


def test_batch_matches_single_runs():
    core = make_core()
    model = DelayModel(2, [[-1.0, 0.2], [0.0, -0.5]], 0.1, 0.5, BuiltinNonlinearity("scaled_tanh", {"k": 0.3}),
                       0.3)
    rng = np.random.default_rng(3)
    phis = random_smooth_segments(rng, 0.5, 0.01, 2, 3)
    batch = core.integrate_batch(model, phis, 2.0, 0.01)
    for phi, traj in zip(phis, batch):
        single = core.integrate(model, phi, 2.0, 0.01)
        assert np.array_equal(single.states, traj.states)


def test_segment_and_semigroup():
    core = make_core()
    model = DelayModel(1, [[-1.0]], 0.5, 0.5)
    phi = HistorySegment.from_function(np.cos, 0.5, 0.01, derivative=lambda t: -np.sin(t))
    traj = core.integrate(model, phi, 1.0, 0.01)
    segment = core.segment_at(traj, 1.0)
    assert segment.n_points == phi.n_points
    assert abs(segment.values[-1, 0] - traj.states[-1, 0]) < 1e-14
    direct = core.semigroup_apply(model, phi, 1.0, 0.01)
    assert np.allclose(direct.values, segment.values)
    # Phi(s + t) = Phi(s) Phi(t)
    half = core.semigroup_apply(model, phi, 0.5, 0.01)
    twice = core.semigroup_apply(model, half, 0.5, 0.01)
    assert np.max(np.abs(twice.values - segment.values)) < 1e-8


def test_semigroup_law_on_random_histories():
    core = make_core()
    r = 0.5
    model = DelayModel(2, [[-1.0, 0.2], [0.0, -0.5]], 0.1, r, BuiltinNonlinearity("scaled_tanh", {"k": 0.3}),
                       0.3)
    rng = np.random.default_rng(17)
    phis = random_smooth_segments(rng, r, 1e-3, 2, 100)
    fractions = (0.25, 0.5, 1.0)
    draws = rng.integers(0, 3, size=(100, 2))
    for i, s in enumerate(fractions):
        for j, t in enumerate(fractions):
            chosen = [phi for phi, (a, b) in zip(phis, draws) if a == i and b == j]
            if not chosen:
                continue
            direct = core.semigroup_apply_batch(model, chosen, (s + t) * r, 1e-3)
            first = core.semigroup_apply_batch(model, chosen, s * r, 1e-3)
            composed = core.semigroup_apply_batch(model, first, t * r, 1e-3)
            for one, two in zip(direct, composed):
                assert (one - two).norm() < 1e-5


def test_fourth_order_convergence():
    # x' = -x(t - 1), x = e^theta on [-1, 0]: x = 1 - e^{-1} (e^t - 1) on [0, 1]
    core = make_core()
    model = DelayModel(1, [[0.0]], -1.0, 1.0)
    errors = []
    for h in (0.1, 0.05):
        phi = HistorySegment.from_function(np.exp, 1.0, h, derivative=np.exp)
        traj = core.integrate(model, phi, 1.0, h)
        t = traj.times[traj.history_points - 1:]
        exact = 1.0 - math.exp(-1.0) * (np.exp(t) - 1.0)
        errors.append(np.max(np.abs(traj.states[traj.history_points - 1:, 0] - exact)))
    assert errors[1] > 0
    assert errors[0] / errors[1] >= 8.0


def test_repeated_runs_are_identical():
    core = make_core()
    model = DelayModel(2, [[-1.0, 0.2], [0.0, -0.5]], 0.1, 0.5, BuiltinNonlinearity("scaled_sin", {"k": 0.3}),
                       0.3)
    runs = []
    for _ in range(2):
        phis = random_smooth_segments(np.random.default_rng(9), 0.5, 0.01, 2, 4)
        runs.append([traj.states for traj in core.integrate_batch(model, phis, 1.5, 0.01)])
    for first, second in zip(*runs):
        assert first.tobytes() == second.tobytes()


def test_blow_up_is_reported():
    core = make_core()
    model = DelayModel(1, [[1000.0]], 0.0, 1.0)
    phi = HistorySegment.constant([1.0], 1.0, 0.01)
    try:
        core.integrate(model, phi, 2.0, 0.01)
    except BlowUpError as e:
        assert 0 < e.time <= 2.0
    else:
        raise AssertionError("expected BlowUpError")


def test_invalid_inputs():
    try:
        HistorySegment(1.0, np.linspace(-0.5, 0.0, 11), np.zeros(11))
    except DomainError:
        pass
    else:
        raise AssertionError("grid must span [-r, 0]")

    try:
        DelayModel(1, [[-1.0]], 0.0, 1.0, BuiltinNonlinearity("scaled_sin", {"k": 0.5}), 0.1)
    except ConfigError as e:
        assert e.field_path == "lipschitz"
    else:
        raise AssertionError("declared Lipschitz constant below the catalog bound")


def test_norms_and_arithmetic():
    grid = np.linspace(-1.0, 0.0, 5)
    values = np.array([[3.0, 4.0]] * 5)
    segment = HistorySegment(1.0, grid, values, 3, None, None, "euclidean", 2.0)
    assert abs(segment.norm() - 10.0) < 1e-12
    assert abs(segment.norm("max") - 8.0) < 1e-12
    assert np.allclose((segment - segment).values, 0.0)
    assert np.allclose(segment.scaled(0.5).values, values / 2)


def main():
    """Run the delay-model core tests"""
    print("\n=== Testing DdeCoreModule ===")
    tests = [test_step_must_divide_delay, test_ode_limit_matches_exponential,
             test_pure_delay_is_exact_on_polynomials, test_batch_matches_single_runs,
             test_segment_and_semigroup, test_semigroup_law_on_random_histories,
             test_fourth_order_convergence, test_repeated_runs_are_identical, test_blow_up_is_reported,
             test_invalid_inputs, test_norms_and_arithmetic]
    for test in tests:
        print(f"\nRunning {test.__name__}")
        test()
        print("  ok")
    print("\n=== All delay-model core tests passed ===")


if __name__ == "__main__":
    main()
