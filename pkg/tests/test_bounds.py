#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys
import math
import logging

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attractorkit.errors import (
    AbsorptionHypothesisError,
    InadmissibleCertificateError,
    InfeasibleAlphaError,
    NoAbsorptionError,
)
from attractorkit.modules.bounds import (
    BoundsModule,
    absorbing_radius,
    corollary_bound,
    general_bound,
    zeta_value,
)
from attractorkit.modules.dde_core import BuiltinNonlinearity, DelayModel
from attractorkit.modules.spectral import CharacteristicFunction, SpectralModule
from config.settings import get_config

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')


def certified_model():
    return DelayModel(1, [[-2.5]], 0.05, 0.05, BuiltinNonlinearity("scaled_tanh", {"k": -0.05, "offset": 0.02}),
                      0.05)


def certified_decomposition(config):
    spectral = SpectralModule(config)
    chi = CharacteristicFunction.from_model(certified_model())
    decomp = spectral.decompose(chi, 1)
    spectral.estimate_decay_constants(chi, decomp, t_grid=[1.0, 2.0, 3.0, 4.0, 5.0], seed=0, h=1e-3,
                                      gamma_fraction=0.8)
    return decomp


def test_closed_forms():
    assert abs(absorbing_radius(0.5, 1.0, 0.1, 1.0) - 2.0 * (0.05 + 1.0 / 0.95)) < 1e-12
    assert abs(zeta_value(0.5, 1.0, 0.2, -1.0, -2.0) - (0.7 * math.exp(-1.0) + math.exp(-2.0))) < 1e-12
    # ln Lambda drops out at Lambda = 1
    assert abs(general_bound(1, 2.0, 1.0, math.exp(-1.0)) - math.log(4.0)) < 1e-12
    assert abs(general_bound(2, 2.0, 1.0, math.exp(-1.0)) - 2.0 * (math.log(2.0) + math.log(4.0))) < 1e-12
    expected = math.log(2.0 + 2.0 / 0.5) / -math.log((0.5 + 0.1) * math.exp(-1.0) + 0.5 * math.exp(-2.0))
    assert abs(corollary_bound(2.0, 0.5, 0.5, 0.1, -1.0, -2.0) - expected) < 1e-12
    try:
        general_bound(1, 2.0, 1.0, 1.0)
    except InadmissibleCertificateError:
        pass
    else:
        raise AssertionError("zeta = 1 is not admissible")


def test_general_formula_matches_single_root_form():
    assert abs(general_bound(1, 2.0, 2.0, 0.5) - math.log(3.0) / math.log(2.0)) < 1e-12
    rng = np.random.default_rng(4)
    for _ in range(100):
        M1, M2, M3 = rng.uniform(0.5, 3.0), rng.uniform(0.0, 0.3), rng.uniform(0.0, 0.3)
        alpha = rng.uniform(0.05, 0.3)
        lambda0, lambda1 = rng.uniform(-3.0, -1.0, size=2)
        zeta = zeta_value(alpha, M2, M3, lambda0, lambda1)
        general = general_bound(1, M1, alpha, zeta)
        assert abs(general - corollary_bound(M1, alpha, M2, M3, lambda0, lambda1)) < 1e-12 * max(1.0, general)


def test_absorbing_set_hypotheses():
    bounds = BoundsModule(get_config())
    B = bounds.absorbing_set(0.5, 1.0, 0.1, 1.0)
    assert abs(B.radius - B.recompute()) < 1e-12
    assert B.valid
    for args, error in (((1.2, 1.0, 0.1, 1.0), AbsorptionHypothesisError),
                        ((0.5, 1.0, 3.0, 1.0), NoAbsorptionError),
                        ((0.5, 0.0, 0.1, 1.0), NoAbsorptionError)):
        try:
            bounds.absorbing_set(*args)
        except error as e:
            assert e.exit_status == 1
        else:
            raise AssertionError(f"{args} must raise {error.__name__}")


def test_absorption_time():
    bounds = BoundsModule(get_config())
    B = bounds.absorbing_set(0.5, 1.0, 0.1, 1.0)
    assert bounds.absorption_time(B, 1e-6) == 0.0
    small = bounds.absorption_time(B, 10.0)
    large = bounds.absorption_time(B, 100.0)
    assert 0 < small < large
    assert abs(large - small - math.log(10.0) / B.gamma) < 1e-12


def test_alpha_optimization():
    bounds = BoundsModule(get_config())
    args = (1, 2.0, 1.0, 0.1, -1.0, -2.0)
    alpha, value = bounds.optimize_alpha_constants(*args)
    cert = bounds.assemble_certificate(*args, alpha)
    assert cert.admissible
    assert abs(bounds.dimension_bound(cert).bound - value) < 1e-9
    for factor in (0.5, 0.9, 1.1, 1.5):
        other = bounds.assemble_certificate(*args, alpha * factor)
        if other.admissible:
            assert bounds.dimension_bound(other).bound >= value - 1e-9
    try:
        bounds.optimize_alpha_constants(1, 2.0, 1.0, 0.1, -1.0, 0.5)
    except InfeasibleAlphaError as e:
        assert e.min_zeta >= 1.0
    else:
        raise AssertionError("M2 e^lambda1 >= 1 leaves no admissible alpha")


def test_certificate_from_decomposition():
    config = get_config()
    bounds = BoundsModule(config)
    decomp = certified_decomposition(config)
    model = certified_model()
    alpha, report = bounds.optimize_alpha(decomp, model.lipschitz_constant, "rfde")
    cert = bounds.squeezing_certificate(decomp, model.lipschitz_constant, alpha, "rfde")
    assert cert.Lambda == 1
    assert abs(cert.lambda0 - (model.lipschitz_constant * decomp.K0 - decomp.gamma)) < 1e-12
    assert cert.lambda1 == decomp.rho_m
    assert cert.M2 == decomp.K
    assert abs(cert.M1 - (decomp.K0 + decomp.K)) < 1e-12
    assert cert.M1_literal == 2.0
    assert 0 < cert.zeta < 1
    assert abs(cert.recompute_zeta() - cert.zeta) < 1e-15
    assert math.isfinite(report.bound) and report.bound > 0
    assert report.corollary is not None
    with_rrd = bounds.squeezing_certificate(decomp, model.lipschitz_constant, alpha, "rrd")
    assert abs(with_rrd.lambda0 - (model.lipschitz_constant + decomp.rho_1)) < 1e-12


def test_empirical_checks_on_certified_model():
    config = get_config()
    bounds = BoundsModule(config)
    model = certified_model()
    decomp = certified_decomposition(config)
    alpha, _ = bounds.optimize_alpha(decomp, model.lipschitz_constant, "rfde")
    cert = bounds.squeezing_certificate(decomp, model.lipschitz_constant, alpha, "rfde")
    B = bounds.absorbing_set(decomp.K0, decomp.gamma, model.lipschitz_constant, model.nonlinearity_at_zero_norm)
    t_grid = [model.delay * j / 2 for j in range(1, 11)]
    squeezing = bounds.verify_squeezing(model, decomp, cert, B, 100, t_grid, seed=1, h=1e-3)
    assert squeezing.passed
    assert len(squeezing.rows) == 1000
    absorption = bounds.verify_absorbing_set(model, B, 50, seed=2, h=1e-3)
    assert absorption.passed
    assert sum(row["check"] == "entry" for row in absorption.rows) == 50
    segments = bounds.sample_attractor(model, B, 3, 4, seed=3, h=1e-3)
    assert len(segments) == 12
    assert all(segment.norm() <= B.radius for segment in segments)


def main():
    """Run the bounds module tests"""
    print("\n=== Testing BoundsModule ===")
    tests = [test_closed_forms, test_general_formula_matches_single_root_form, test_absorbing_set_hypotheses,
             test_absorption_time, test_alpha_optimization, test_certificate_from_decomposition,
             test_empirical_checks_on_certified_model]
    for test in tests:
        print(f"\nRunning {test.__name__}")
        test()
        print("  ok")
    print("\n=== All bounds tests passed ===")


if __name__ == "__main__":
    main()
