#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys
import math
import logging

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attractorkit.errors import BMinusAHypothesisError, ConfigError, DegenerateDissipativityError
from attractorkit.modules.dde_core import BuiltinNonlinearity, HistorySegment, random_smooth_segments
from attractorkit.modules.rds_app import PARSEVAL_SCALE, RdModel, RdsAppModule
from config.settings import get_config

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')


def certified_model(n_modes=8):
    return RdModel(2.0, 0.5, 0.05, BuiltinNonlinearity("scaled_sin", {"k": 0.1, "offset": 0.05}), 0.1,
                   n_modes=n_modes)


def test_model_validation():
    model = certified_model()
    assert model.stability_hypothesis
    assert abs(model.c1 - math.sqrt(math.pi) * 0.05) < 1e-15
    assert not RdModel(1.0, 2.5, 0.1).stability_hypothesis
    assert not RdModel(1.0, 0.0, 0.1).stability_hypothesis
    for kwargs, path in (({"a": 0.0, "b": 0.5, "r": 0.1}, "a"),
                         ({"a": 1.0, "b": -0.5, "r": 0.1}, "b"),
                         ({"a": 1.0, "b": 0.5, "r": 0.0}, "r")):
        try:
            RdModel(**kwargs)
        except ConfigError as e:
            assert e.field_path == path
        else:
            raise AssertionError(f"{kwargs} must be rejected")


def test_mode_roots_without_delay_feedback():
    rds = RdsAppModule(get_config())
    model = RdModel(1.0, 0.0, 1.0, n_modes=5)
    spectrum = rds.mode_spectrum(model, 3)
    expected = [-k * k - 1.0 for k in range(1, 6)]
    assert len(spectrum.rhos) == 5
    for rho, value in zip(spectrum.rhos, expected):
        assert abs(rho - value) < 1e-12
    assert spectrum.k_m == 3
    assert abs(spectrum.rho_m + 10.0) < 1e-12
    assert not spectrum.stability["hypothesis"]
    assert spectrum.truncation["sound"]


def test_mode_spectrum_of_certified_model():
    rds = RdsAppModule(get_config())
    model = certified_model()
    spectrum = rds.mode_spectrum(model, 1)
    # leading root of lambda + 1 + a + b e^{-lambda r} is real
    rho = spectrum.rho_1
    assert abs(rho + 1.0 + model.a + model.b * math.exp(-rho * model.r)) < 1e-9
    assert spectrum.stability["certified"]
    assert all(w == 0 for w in spectrum.stability["windings"].values())
    table = spectrum.root_table()
    assert table[0]["mode"] == 1
    assert spectrum.to_dict()["n_modes"] == model.n_modes


def test_galerkin_reduction_and_parseval():
    rds = RdsAppModule(get_config())
    model = certified_model()
    reduced = rds.galerkin_reduce(model)
    assert reduced.dimension == model.n_modes
    assert np.allclose(np.diag(reduced.dense_instantaneous_matrix), -np.arange(1, 9) ** 2 - model.a)
    assert reduced.delay_coefficient == -model.b
    assert reduced.norm == "euclidean" and reduced.norm_scale == PARSEVAL_SCALE

    history = rds.field_history(reduced, lambda x: np.sin(x) + 0.5 * np.sin(3 * x), 1e-3)
    coefficients = history.values[-1]
    assert abs(coefficients[0] - 1.0) < 1e-12 and abs(coefficients[2] - 0.5) < 1e-12
    assert np.max(np.abs(np.delete(coefficients, [0, 2]))) < 1e-12
    # ||sin x + 0.5 sin 3x||_L2^2 = (pi / 2) (1 + 0.25)
    assert abs(history.norm() - math.sqrt(math.pi / 2 * 1.25)) < 1e-12

    x = np.linspace(0.0, math.pi, 7)
    field = rds.field_values(reduced, coefficients, x)[0]
    assert np.allclose(field, np.sin(x) + 0.5 * np.sin(3 * x))


def test_galerkin_matches_finite_differences():
    rds = RdsAppModule(get_config())
    model = certified_model(16)
    reduced = rds.galerkin_reduce(model)
    galerkin = rds.dde.integrate(reduced, rds.field_history(reduced, np.sin, 1e-3), 1.0, 1e-3)
    coefficients = galerkin.state_at(1.0)

    fd, x = rds.finite_difference_model(model, 400)
    h = rds.finite_difference_step(fd)
    assert abs(round(fd.delay / h) * h - fd.delay) < 1e-12
    start = HistorySegment.constant(np.sin(x), fd.delay, h, fd.norm, fd.norm_scale)
    oracle = rds.dde.integrate(fd, start, 1.0, h).state_at(1.0)

    difference = rds.field_values(reduced, coefficients, x)[0] - oracle
    l2_error = math.sqrt(math.pi / (len(x) + 1)) * np.linalg.norm(difference)
    assert l2_error < 1e-3


def test_dissipativity_estimate_holds():
    rds = RdsAppModule(get_config())
    model = certified_model()
    reduced = rds.galerkin_reduce(model)
    rng = np.random.default_rng(5)
    phi = random_smooth_segments(rng, model.r, 1e-3, reduced.dimension, 1, 3.0, norm_kind=reduced.norm,
                                 norm_scale=reduced.norm_scale, exact_norm=True)[0]
    gamma = 1.1 * model.a
    report = rds.dissipativity_check(model, phi, gamma, 2.0, 1e-3)
    assert report.passed
    assert report.summary["gamma_exceeds_a"]
    assert report.summary["attractor_condition"]
    assert report.summary["violations"] == 0

    B = rds.absorbing_set(model, gamma)
    e_gr = math.exp(gamma * model.r)
    assert abs(B.radius - (e_gr * model.c1 / (model.a - model.lipschitz * e_gr) + 1.0)) < 1e-12

    degenerate = RdModel(1.0, 0.5, 1.0, BuiltinNonlinearity("scaled_sin", {"k": math.exp(-1.0)}), math.exp(-1.0))
    try:
        rds.dissipativity_check(degenerate, phi, 1.0, 1.0, 1e-3)
    except DegenerateDissipativityError:
        pass
    else:
        raise AssertionError("a = L e^(gamma r) leaves the estimate undefined")


def test_dimension_bound_and_hypothesis_gate():
    rds = RdsAppModule(get_config())
    model = certified_model()
    report = rds.rd_dimension_bound(model, 1, seed=0, t_grid=[1.0, 2.0, 3.0], h=1e-3)
    assert report.admissible
    assert 0 < report.zeta < 1
    assert report.provenance["lambda0"].startswith("L_f + rho_1")
    assert report.provenance["truncation_sound"] == "True"

    try:
        rds.decomposition(RdModel(1.0, 2.5, 0.1, n_modes=4))
    except BMinusAHypothesisError as e:
        assert e.code == "HYPOTHESIS_B_MINUS_A"
        assert e.exit_status == 1
    else:
        raise AssertionError("b - a >= 1 must be rejected")

    # no delay feedback: every mode root is -k^2 - a
    undelayed = RdModel(1.0, 0.0, 0.1, BuiltinNonlinearity("scaled_sin", {"k": 0.1}), 0.1, n_modes=4)
    decomp, spectrum = rds.decomposition(undelayed, 1, t_grid=[0.5, 1.0], h=1e-3)
    assert abs(spectrum.rho_1 + 2.0) < 1e-12
    assert not spectrum.stability["hypothesis"]
    assert decomp.k_m == 1 and decomp.K > 0


def test_attractor_samples_settle():
    rds = RdsAppModule(get_config())
    model = certified_model(4)
    segments = rds.sample_attractor(model, 2, 3, seed=0, h=1e-3)
    assert len(segments) == 6
    values = np.array([segment.values[-1] for segment in segments])
    # every run ends at the same stable equilibrium
    assert np.max(np.abs(values - values[0])) < 1e-5


def main():
    """Run the reaction-diffusion application tests"""
    print("\n=== Testing RdsAppModule ===")
    tests = [test_model_validation, test_mode_roots_without_delay_feedback, test_mode_spectrum_of_certified_model,
             test_galerkin_reduction_and_parseval, test_galerkin_matches_finite_differences,
             test_dissipativity_estimate_holds, test_dimension_bound_and_hypothesis_gate,
             test_attractor_samples_settle]
    for test in tests:
        print(f"\nRunning {test.__name__}")
        test()
        print("  ok")
    print("\n=== All reaction-diffusion tests passed ===")


if __name__ == "__main__":
    main()
