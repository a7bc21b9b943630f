#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys
import logging

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attractorkit.errors import CutIndexError, StabilityError
from attractorkit.modules.dde_core import DelayModel, HistorySegment
from attractorkit.modules.spectral import CharacteristicFunction, SpectralModule
from config.settings import get_config

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

# rightmost roots of lambda + e^{-lambda}: the principal Lambert-W branch
PURE_DELAY_ROOT = complex(-0.31813150520476413, 1.3372357014306895)


def make_spectral():
    return SpectralModule(get_config())


def test_no_delay_feedback_gives_single_root():
    spectral = make_spectral()
    chi = CharacteristicFunction.from_model(DelayModel(1, [[-1.0]], 0.0, 1.0))
    roots, certificate = spectral.enumerate_roots(chi)
    assert len(roots) == 1
    assert abs(roots[0].value + 1.0) < 1e-12
    assert roots[0].multiplicity == 1
    assert certificate["search"]["winding"] == 1
    assert spectral.winding_number(chi, (-2.0, 0.0, -1.0, 1.0)) == 1
    assert spectral.winding_number(chi, (-0.5, 0.5, -1.0, 1.0)) == 0
    assert len(spectral.char_roots(chi, -3.0, 1.0, 2.0)) == 1


def test_pure_delay_rightmost_pair():
    spectral = make_spectral()
    chi = CharacteristicFunction([[0.0]], [[-1.0]], 1.0)
    root = spectral.rightmost_root(chi)
    assert abs(root.re - PURE_DELAY_ROOT.real) < 1e-9
    assert abs(abs(root.im) - PURE_DELAY_ROOT.imag) < 1e-9
    roots, _ = spectral.enumerate_roots(chi)
    # conjugate pairs come together
    top = [r for r in roots if abs(r.re - PURE_DELAY_ROOT.real) < 1e-9]
    assert len(top) == 2
    assert abs(top[0].value - top[1].value.conjugate()) < 1e-9


def test_double_root_is_resolved():
    # lambda + e^{-1} e^{-lambda} has a double root at -1
    spectral = make_spectral()
    chi = CharacteristicFunction([[0.0]], [[-np.exp(-1.0)]], 1.0)
    root = spectral.rightmost_root(chi)
    assert abs(root.value + 1.0) < 1e-5
    assert root.multiplicity == 2


def test_generator_agrees_with_roots():
    spectral = make_spectral()
    chi = CharacteristicFunction([[-1.0]], [[0.5]], 1.0)
    root = spectral.rightmost_root(chi)
    generator = spectral.generator_eigenvalues(chi)
    assert abs(generator.eigenvalues[0] - root.value) < 1e-8


def test_projection_weights_match_the_discretized_generator():
    spectral = make_spectral()
    chi = CharacteristicFunction([[-1.0]], [[0.1]], 1.0)
    decomp = spectral.decompose(chi, 1)
    root = decomp.leading[0]
    assert -0.8 < root.re < -0.7 and abs(root.im) < 1e-9
    generator = spectral.generator_eigenvalues(chi)
    assert abs(generator.eigenvalues[0] - root.value) < 1e-8

    phi = HistorySegment.from_function(lambda t: np.sin(3 * t) + 0.2, 1.0, 0.01,
                                       derivative=lambda t: 3 * np.cos(3 * t))
    at_zero = decomp.project(phi).values[-1]
    oracle = generator.leading_projection_at_zero(phi, 0)
    assert abs(at_zero[0]) > 1e-3
    assert np.max(np.abs(at_zero - oracle)) < 1e-6


def test_projection_is_idempotent_and_fixes_eigenfunctions():
    spectral = make_spectral()
    chi = CharacteristicFunction([[-1.0]], [[0.5]], 1.0)
    decomp = spectral.decompose(chi, 1)
    assert decomp.cut_index == 1
    assert decomp.k_m == 1
    assert decomp.rho_1 == decomp.rho_m
    h = 0.01
    eigen = decomp.eigenfunction(0, h=h)
    assert np.max(np.abs(decomp.project(eigen).values - eigen.values)) < 1e-8
    phi = HistorySegment.from_function(lambda t: np.sin(3 * t) + 0.2, 1.0, h,
                                       derivative=lambda t: 3 * np.cos(3 * t))
    once = decomp.project(phi)
    twice = decomp.project(once)
    assert np.max(np.abs(twice.values - once.values)) < 1e-8
    # the complement has no component along the leading eigenfunction
    rest = decomp.complement(phi)
    assert np.max(np.abs(decomp.project(rest).values)) < 1e-8


def test_projection_commutes_with_the_linear_flow():
    spectral = make_spectral()
    chi = CharacteristicFunction([[-1.0]], [[0.5]], 1.0)
    decomp = spectral.decompose(chi, 1)
    model = chi.linear_model()
    h = 0.01
    phi = HistorySegment.from_function(np.cos, 1.0, h, derivative=lambda t: -np.sin(t))
    evolved = spectral.dde.semigroup_apply(model, phi, 2.0, h)
    projected_then_evolved = spectral.dde.semigroup_apply(model, decomp.project(phi), 2.0, h)
    difference = decomp.project(evolved) - projected_then_evolved
    assert difference.norm() < 1e-6


def test_decay_constants():
    spectral = make_spectral()
    chi = CharacteristicFunction([[-2.5]], [[0.05]], 0.05)
    decomp = spectral.decompose(chi, 1)
    constants = spectral.estimate_decay_constants(chi, decomp, t_grid=[1.0, 2.0, 3.0], seed=0, h=1e-3,
                                                  gamma_fraction=0.8)
    assert abs(constants.gamma - 0.8 * -decomp.rho_1) < 1e-12
    assert constants.K >= spectral.safety_factor
    assert 0 < constants.K0 < 1
    assert decomp.K == constants.K and decomp.K0 == constants.K0
    again = spectral.estimate_decay_constants(chi, spectral.decompose(chi, 1), t_grid=[1.0, 2.0, 3.0], seed=0,
                                              h=1e-3, gamma_fraction=0.8)
    assert again.as_tuple() == constants.as_tuple()


def test_random_stable_scalar_models():
    spectral = make_spectral()
    rng = np.random.default_rng(11)
    for _ in range(25):
        a = rng.uniform(-3.0, -1.0)
        b = rng.uniform(-0.9, 0.9) * abs(a)
        tau = rng.uniform(0.2, 2.0)
        roots, certificate = spectral.enumerate_roots(CharacteristicFunction([[a]], [[b]], tau))
        assert all(root.residual < 1e-10 for root in roots)
        assert sum(root.multiplicity for root in roots) == certificate["search"]["winding"]
        assert roots[0].re < 0


def test_root_on_the_imaginary_axis():
    # x' = -(pi/2) x(t - 1) has roots +-i pi/2
    spectral = make_spectral()
    chi = CharacteristicFunction([[0.0]], [[-np.pi / 2]], 1.0)
    root = spectral.rightmost_root(chi)
    assert abs(root.re) < 1e-8
    assert abs(abs(root.im) - np.pi / 2) < 1e-8


def test_unstable_and_bad_cut_index():
    spectral = make_spectral()
    chi = CharacteristicFunction([[0.5]], [[0.0]], 1.0)
    decomp = spectral.decompose(chi, 1)
    try:
        spectral.estimate_decay_constants(chi, decomp, t_grid=[1.0], h=0.01)
    except StabilityError as e:
        assert e.exit_status == 1
    else:
        raise AssertionError("rho_1 > 0 must be rejected")
    try:
        spectral.decompose(chi, 0)
    except CutIndexError:
        pass
    else:
        raise AssertionError("m = 0 is not a cut index")


def main():
    """Run the spectral module tests"""
    print("\n=== Testing SpectralModule ===")
    tests = [test_no_delay_feedback_gives_single_root, test_pure_delay_rightmost_pair,
             test_double_root_is_resolved, test_generator_agrees_with_roots,
             test_projection_weights_match_the_discretized_generator,
             test_projection_is_idempotent_and_fixes_eigenfunctions,
             test_projection_commutes_with_the_linear_flow, test_decay_constants,
             test_random_stable_scalar_models, test_root_on_the_imaginary_axis,
             test_unstable_and_bad_cut_index]
    for test in tests:
        print(f"\nRunning {test.__name__}")
        test()
        print("  ok")
    print("\n=== All spectral tests passed ===")


if __name__ == "__main__":
    main()
