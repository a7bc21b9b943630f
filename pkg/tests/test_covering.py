#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
import sys
import math
import logging
from itertools import product

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attractorkit.errors import CoveringConstructionError, DomainError
from attractorkit.modules.bounds import BoundsModule
from attractorkit.modules.covering import (
    AffineMap,
    CoveringModule,
    Metric,
    PointCloud,
    covering_bound,
    greedy_cover,
)
from config.settings import get_config

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')


def make_modules():
    config = get_config()
    return CoveringModule(config), BoundsModule(config)


def contraction_fixture(bounds):
    """Contraction by 1/2 along P = span(e1) and 1/5 along Q, with squeezing constants to match."""
    mapping = AffineMap(np.diag([0.5, 0.2]), np.diag([1.0, 0.0]))
    cert = bounds.assemble_certificate(1, 1.0, 1.0, 0.0, math.log(0.5), math.log(0.2), 0.5)
    axis = np.linspace(-1.0, 1.0, 41)
    cloud = PointCloud.in_space(np.array(list(product(axis, axis))), "sup")
    return mapping, cert, cloud


def test_cover_ball_respects_lemma():
    covering, _ = make_modules()
    centers = covering.cover_ball(1, "sup", 1.0, 0.5)
    assert len(centers) == 3
    assert np.allclose(centers[0], 0.0)
    for dim, ratio, norm in product((1, 2, 3), (1.0, 2.0, 4.0, 8.0), ("sup", "euclidean")):
        centers = covering.cover_ball(dim, norm, 1.0, 1.0 / ratio)
        assert 1 <= len(centers) <= covering_bound(dim, 1.0, 1.0 / ratio)
        sample = covering.ball_sample(dim, norm, 1.0)
        distance, _ = Metric(norm).nearest(sample, centers)
        assert distance.max() <= 1.0 / ratio * (1 + 1e-12)
    try:
        covering.cover_ball(2, "sup", 1.0, 0.0)
    except DomainError:
        pass
    else:
        raise AssertionError("zero covering radius must be rejected")


def test_greedy_cover_assignment():
    metric = Metric("euclidean")
    points = np.random.default_rng(0).uniform(-1, 1, size=(300, 2))
    centers, assignment = greedy_cover(points, 0.3, metric)
    assert centers[0] == 0
    distance = np.linalg.norm(points - points[centers][assignment], axis=1)
    assert distance.max() <= 0.3 * (1 + 1e-12)


def test_covering_tree_on_affine_contraction():
    covering, bounds = make_modules()
    mapping, cert, cloud = contraction_fixture(bounds)
    assert abs(cert.zeta - 0.45) < 1e-12
    tree = covering.build_covering_tree(mapping, cert, 1.0, 6, cloud)
    assert np.allclose(tree.root, 0.0)
    assert len(tree.W) == 6
    lemma = tree.lemma_count
    for level, centers in enumerate(tree.W, start=1):
        assert len(centers) <= lemma ** level
        image = cloud.points
        for _ in range(level):
            image = mapping(image)
        distance, _ = cloud.metric.nearest(image, centers)
        assert distance.max() <= cert.zeta ** level * (1 + 1e-9)
    cumulative = tree.cumulative_cardinalities
    for level, count in enumerate(cumulative, start=1):
        assert count <= sum(lemma ** i for i in range(level + 1))

    report = covering.verify_exponential_attraction(mapping, tree, cloud, 6)
    assert all(row["ok"] for row in report.rows)
    assert abs(report.fitted_rate - report.target_rate) <= 0.1 * report.target_rate
    assert report.passed
    assert abs(report.target_rate + math.log(cert.zeta)) < 1e-12
    frame = report.to_frame()
    assert list(frame.columns) == ["n", "semidistance", "bound", "ok"]


def test_covering_tree_on_quartering_map():
    covering, bounds = make_modules()
    cert = bounds.assemble_certificate(1, 1.0, 0.0, 0.0, math.log(0.25), math.log(0.25), 1.0)
    assert abs(cert.zeta - 0.25) < 1e-15
    cloud = PointCloud.in_space(np.linspace(-1.0, 1.0, 81)[:, None], "sup")
    quarter = AffineMap([[0.25]], [[1.0]])
    tree = covering.build_covering_tree(quarter, cert, 1.0, 6, cloud)
    assert tree.cardinalities == [1] * 6
    assert tree.cumulative_cardinalities == [1, 2, 3, 4, 5, 6]
    image = cloud.points
    for level, centers in enumerate(tree.W, start=1):
        image = quarter(image)
        distance, _ = cloud.metric.nearest(image, centers)
        assert distance.max() <= 0.25 ** level * (1 + 1e-9)
    report = covering.verify_exponential_attraction(quarter, tree, cloud, 6)
    assert abs(report.fitted_rate - math.log(4.0)) <= 0.1 * math.log(4.0)
    assert report.passed

    # everything lands on the origin after one step
    collapse = AffineMap([[0.0]], [[1.0]])
    tree = covering.build_covering_tree(collapse, cert, 1.0, 6, cloud)
    assert all(np.allclose(centers, 0.0) and len(centers) == 1 for centers in tree.W)
    report = covering.verify_exponential_attraction(collapse, tree, cloud, 6)
    assert all(row["semidistance"] == 0.0 for row in report.rows)
    assert report.passed


def test_covering_tree_needs_a_central_point():
    covering, bounds = make_modules()
    mapping, cert, cloud = contraction_fixture(bounds)
    try:
        covering.build_covering_tree(mapping, cert, 0.5, 2, cloud)
    except CoveringConstructionError as e:
        assert e.level == 0
    else:
        raise AssertionError("no sample point has the cloud within 0.5")


def test_hausdorff_semidistance():
    covering, _ = make_modules()
    A = PointCloud.in_space([[0.0, 0.0], [1.0, 0.0]], "euclidean")
    B = PointCloud.in_space([[0.0, 0.0]], "euclidean")
    assert covering.hausdorff_semidist(A, B) == 1.0
    assert covering.hausdorff_semidist(B, A) == 0.0


def test_box_counting_calibration():
    covering, _ = make_modules()
    ladder = [0.1, 0.05, 0.025, 0.0125, 0.00625]

    t = np.linspace(0.0, 1.0, 4001)
    segment = PointCloud.in_space(np.column_stack([t, 0.5 * t]), "sup")
    assert abs(covering.box_counting_dimension(segment, ladder).estimate - 1.0) < 0.1

    axis = np.linspace(0.0, 1.0, 801)
    grid_x, grid_y = np.meshgrid(axis, axis, indexing="ij")
    square = PointCloud.in_space(np.column_stack([grid_x.ravel(), grid_y.ravel()]), "sup")
    estimate = covering.box_counting_dimension(square, [0.1, 0.05, 0.025, 0.0125]).estimate
    assert abs(estimate - 2.0) < 0.2

    cantor = np.array([0.0])
    for _ in range(8):
        cantor = np.concatenate([cantor / 3.0, 2.0 / 3.0 + cantor / 3.0])
    cloud = PointCloud.in_space(cantor[:, None], "sup")
    result = covering.box_counting_dimension(cloud, [3.0 ** -k for k in range(2, 7)])
    assert abs(result.estimate - math.log(2) / math.log(3)) < 0.05
    assert result.counts == sorted(result.counts)


def test_box_counting_edge_cases():
    covering, _ = make_modules()
    point = PointCloud.in_space(np.zeros((10, 3)), "sup")
    result = covering.box_counting_dimension(point, [0.1, 0.05, 0.025, 0.0125])
    assert result.estimate == 0.0
    assert result.used[:2] == [False, False]
    try:
        covering.box_counting_dimension(point, [0.1, 0.2, 0.05, 0.01])
    except DomainError:
        pass
    else:
        raise AssertionError("ladder must decrease")


def main():
    """Run the covering module tests"""
    print("\n=== Testing CoveringModule ===")
    tests = [test_cover_ball_respects_lemma, test_greedy_cover_assignment,
             test_covering_tree_on_affine_contraction, test_covering_tree_on_quartering_map,
             test_covering_tree_needs_a_central_point,
             test_hausdorff_semidistance, test_box_counting_calibration, test_box_counting_edge_cases]
    for test in tests:
        print(f"\nRunning {test.__name__}")
        test()
        print("  ok")
    print("\n=== All covering tests passed ===")


if __name__ == "__main__":
    main()
