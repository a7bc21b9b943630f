#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys
import logging

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attractorkit.controller import PipelineController, PipelineState
from attractorkit.errors import BMinusAHypothesisError, ConfigError
from config.settings import get_config

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures")


def loaded(name, **run):
    controller = PipelineController(get_config(), seed=0)
    controller.load(os.path.join(FIXTURES, name))
    controller.run.update(run)
    return controller


def test_load_merges_model_run_settings():
    controller = loaded("rfde_certified.json")
    assert controller.kind == "rfde"
    assert controller.h == 0.001
    assert controller.run["decay_t_grid"] == [1.0, 2.0, 3.0, 4.0, 5.0]
    assert controller.run["n_pairs"] == 100
    controller.set_overrides(cut_m=2, eps_ladder=[0.4, 0.2, 0.1, 0.05])
    assert controller.cut_m == 2
    assert controller.run["eps_ladder"] == [0.4, 0.2, 0.1, 0.05]
    assert abs(controller.default_t_grid()[-1] - 5 * controller.delay) < 1e-15
    assert controller.echo()["model"]["kind"] == "rfde"
    assert controller.echo()["model_file"].endswith("rfde_certified.json")

    try:
        PipelineController(get_config()).load(os.path.join(FIXTURES, "missing.json"))
    except ConfigError as e:
        assert e.field_path == "model"
    else:
        raise AssertionError("a missing model file is a usage error")


def test_rfde_certification():
    controller = loaded("rfde_certified.json")
    roots = controller.roots()
    assert roots["rightmost"]["re"] < 0
    assert roots["roots"] and "search" in roots["certificate"]

    result = controller.certificate()
    cert = result["certificate"]
    assert result["alpha_optimized"]
    assert cert.admissible and 0 < cert.zeta < 1
    assert result["bound"].bound > 0
    assert result["absorbing_set"].valid
    # stages are computed once
    assert controller.certificate() is result
    assert "certificate" in controller.memory.stages()

    summary = controller.certification_summary()
    assert summary["model"]["kind"] == "rfde"
    assert summary["zeta"] == cert.zeta
    assert summary["dimension_bound"]["bound"] == result["bound"].bound

    controller.load(os.path.join(FIXTURES, "roots_scalar.json"))
    assert controller.memory.stages() == []
    assert controller.memory.get_context("model").endswith("roots_scalar.json")


def test_rfde_empirical_checks():
    controller = loaded("rfde_certified.json", n_pairs=5, n_absorption_samples=5, attractor_samples=24,
                       attractor_trajectories=4, cover_samples=30, covering_levels=3, horizon=1.0)
    squeezing = controller.squeezing_verification()
    assert squeezing.passed
    assert len(squeezing.rows) == 5 * 10
    assert controller.absorption_verification().passed

    box = controller.box_dimension()
    bound = controller.certificate()["bound"].bound
    assert 0.0 <= box.estimate <= bound

    covering = controller.covering_experiment()
    tree = covering["tree"]
    assert len(tree.W) == 3
    assert all(row["ok"] for row in covering["attraction"].rows)

    report = controller.certification_report()
    assert controller.state == PipelineState.DONE
    assert report["verification"]["box_counting_within_bound"]
    assert report["verification"]["absorption"]["passed"]

    frame = controller.simulate()
    assert list(frame.columns) == ["t", "x1"]
    assert abs(frame["t"].iloc[0]) < 1e-12
    assert abs(frame["t"].iloc[-1] - 1.0) < 1e-12


def test_rrd_certification_and_dissipativity():
    controller = loaded("rrd_certified.json", n_pairs=5, n_absorption_samples=3, horizon=0.5,
                        attractor_samples=20, attractor_trajectories=4)
    assert controller.kind == "rrd"
    assert controller.dynamics().dimension == 8
    result = controller.certificate()
    assert result["certificate"].application == "rrd"
    assert 0 < result["certificate"].zeta < 1
    assert "mode_spectrum" in controller.certification_summary()["spectral"]

    squeezing = controller.squeezing_verification()
    assert squeezing.passed
    assert len(squeezing.rows) == 50

    report = controller.absorption_verification()
    assert report.name == "dissipativity"
    assert report.passed
    assert len(report.rows) == 3

    box = controller.box_dimension()
    assert 0.0 <= box.estimate <= result["bound"].bound

    frame = controller.simulate()
    assert "l2_norm" in frame.columns
    assert frame["l2_norm"].iloc[-1] < frame["l2_norm"].iloc[0]


def test_hypothesis_violation_sets_error_state():
    controller = loaded("rrd_violating.json")
    try:
        controller.decomposition()
    except BMinusAHypothesisError:
        assert controller.state == PipelineState.ERROR
    else:
        raise AssertionError("b - a >= 1 must be rejected")


def main():
    """Run the pipeline controller tests"""
    print("\n=== Testing PipelineController ===")
    tests = [test_load_merges_model_run_settings, test_rfde_certification, test_rfde_empirical_checks,
             test_rrd_certification_and_dissipativity, test_hypothesis_violation_sets_error_state]
    for test in tests:
        print(f"\nRunning {test.__name__}")
        test()
        print("  ok")
    print("\n=== All controller tests passed ===")


if __name__ == "__main__":
    main()
