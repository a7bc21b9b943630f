#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Covering module for AttractorKit.

Greedy ball coverings, the level-by-level covering tree of a squeezing map on
a sampled absorbing set, Hausdorff semidistances and box-counting estimates.
"""

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from attractorkit.errors import (
    AttractionError,
    CoveringConstructionError,
    CoveringLemmaError,
    DomainError,
)
from attractorkit.modules.base import BaseModule
from attractorkit.modules.bounds import SqueezingCertificate
from attractorkit.modules.dde_core import DdeCoreModule, DelayModel, HistorySegment
from attractorkit.modules.spectral import SpectralDecomposition
from attractorkit.utils.parallel import parallel_map

METRICS = ("sup", "euclidean", "segment")


def covering_bound(dim: int, r_ball: float, r_cover: float) -> float:
    """dim 2^dim (1 + r_ball / r_cover)^dim."""
    return dim * 2 ** dim * (1.0 + r_ball / r_cover) ** dim


@dataclass
class Metric:
    """
    Distance on flattened points.

    ``segment`` is the sup over grid points of the Euclidean norm of an
    n-vector; ``shape`` gives (grid points, n) for it.
    """

    kind: str = "sup"
    scale: float = 1.0
    shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.kind == "max":
            self.kind = "sup"
        if self.kind not in METRICS:
            raise DomainError(f"unknown metric {self.kind!r}; expected one of {METRICS}")
        if self.kind == "segment" and self.shape is None:
            raise DomainError("segment metric needs the segment shape")

    @property
    def minkowski_p(self) -> Optional[float]:
        return {"sup": np.inf, "euclidean": 2.0}.get(self.kind)

    def to_point(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        diff = X - y
        if self.kind == "sup":
            return self.scale * np.max(np.abs(diff), axis=1)
        if self.kind == "euclidean":
            return self.scale * np.linalg.norm(diff, axis=1)
        diff = diff.reshape(len(X), *self.shape)
        return self.scale * np.max(np.linalg.norm(diff, axis=2), axis=1)

    def pairwise(self, X: np.ndarray, Y: np.ndarray, block: int = 256) -> np.ndarray:
        if self.kind == "sup":
            return self.scale * cdist(X, Y, "chebyshev")
        if self.kind == "euclidean":
            return self.scale * cdist(X, Y, "euclidean")
        out = np.empty((len(X), len(Y)))
        for start in range(0, len(X), block):
            chunk = X[start:start + block]
            for j, y in enumerate(Y):
                out[start:start + block, j] = self.to_point(chunk, y)
        return out

    def nearest(self, X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Distance from each row of X to its nearest row of Y, and that row's index."""
        p = self.minkowski_p
        if p is not None:
            distance, index = cKDTree(Y).query(X, k=1, p=p)
            return self.scale * np.asarray(distance), np.asarray(index)
        D = self.pairwise(X, Y)
        index = np.argmin(D, axis=1)
        return D[np.arange(len(X)), index], index


@dataclass
class PointCloud:
    points: np.ndarray
    metric: Metric = field(default_factory=Metric)
    labels: Optional[List[Any]] = None
    ambient: str = "R^d"

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.size and not np.all(np.isfinite(self.points)):
            raise DomainError("point cloud contains non-finite points")

    def __len__(self) -> int:
        return 0 if self.points.size == 0 else self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @classmethod
    def in_space(cls, points, norm: str = "sup", labels=None) -> "PointCloud":
        return cls(points, Metric(norm), labels)

    @classmethod
    def from_segments(cls, segments: Sequence[HistorySegment], labels=None) -> "PointCloud":
        """Flattened segments with the segments' own norm."""
        first = segments[0]
        kind = "sup" if first.norm_kind == "max" else "segment"
        metric = Metric(kind, first.norm_scale, first.values.shape)
        points = np.array([segment.as_vector() for segment in segments])
        return cls(points, metric, labels, ambient="C([-r,0], R^n)")


class AffineMap:
    """x -> x L^T + offset with a fixed projection P"""

    def __init__(self, matrix, projection, offset=None):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.projection = np.atleast_2d(np.asarray(projection, dtype=float))
        d = self.matrix.shape[0]
        self.offset = np.zeros(d) if offset is None else np.asarray(offset, dtype=float)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(points) @ self.matrix.T + self.offset

    def project(self, points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(points) @ self.projection.T


class SegmentMap:
    """Time-t map of a delay model acting on flattened history segments"""

    def __init__(self, model: DelayModel, dde: DdeCoreModule, decomp: SpectralDecomposition,
                 h: float, time: float = 1.0):
        self.model = model
        self.dde = dde
        self.decomp = decomp
        self.h = h
        self.time = time
        self.grid = HistorySegment.uniform_grid(model.delay, h)
        self.shape = (len(self.grid), model.dimension)

    def segments(self, points: np.ndarray) -> List[HistorySegment]:
        return [HistorySegment(self.model.delay, self.grid, point.reshape(self.shape), 3, None, None,
                               self.model.norm, self.model.norm_scale) for point in np.atleast_2d(points)]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        images = self.dde.semigroup_apply_batch(self.model, self.segments(points), self.time, self.h)
        return np.array([segment.as_vector() for segment in images])

    def project(self, points: np.ndarray) -> np.ndarray:
        return np.array([self.decomp.project(segment).as_vector() for segment in self.segments(points)])


def greedy_cover(points: np.ndarray, radius: float, metric: Metric,
                 start: int = 0) -> Tuple[List[int], np.ndarray]:
    """
    Farthest-point covering of a finite set.

    Returns:
        (indices of the chosen centers, index into that list of each point's nearest center)
    """
    distance = metric.to_point(points, points[start])
    assignment = np.zeros(len(points), dtype=int)
    centers = [start]
    limit = radius * (1.0 + 1e-12)
    while True:
        far = int(np.argmax(distance))
        if distance[far] <= limit:
            break
        centers.append(far)
        candidate = metric.to_point(points, points[far])
        closer = candidate < distance
        assignment[closer] = len(centers) - 1
        distance = np.minimum(distance, candidate)
    return centers, assignment


@dataclass
class CoveringTree:
    W: List[np.ndarray]
    E: List[np.ndarray]
    radii: List[float]
    zeta: float
    R_B: float
    lemma_count: float
    root: np.ndarray

    @property
    def cardinalities(self) -> List[int]:
        return [len(level) for level in self.W]

    @property
    def cumulative_cardinalities(self) -> List[int]:
        return [len(level) for level in self.E]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "zeta": self.zeta,
            "R_B": self.R_B,
            "lemma_count": self.lemma_count,
            "root": self.root.tolist(),
            "levels": [{"level": i + 1, "radius": radius, "cardinality": len(W), "cumulative": len(E),
                        "centers": W.tolist()}
                       for i, (W, E, radius) in enumerate(zip(self.W, self.E, self.radii))],
        }


@dataclass
class BoxCountingResult:
    estimate: float
    eps: List[float]
    counts: List[int]
    used: List[bool]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"eps": self.eps, "count": self.counts, "used": self.used})

    def to_dict(self) -> Dict[str, Any]:
        return {"estimate": self.estimate, "eps": self.eps, "counts": self.counts, "used": self.used}


@dataclass
class AttractionReport:
    rows: List[Dict[str, float]]
    fitted_rate: float
    target_rate: float
    passed: bool
    slack: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["n", "semidistance", "bound", "ok"])

    def to_dict(self) -> Dict[str, Any]:
        rate = self.fitted_rate if math.isfinite(self.fitted_rate) else None
        return {"fitted_rate": rate, "target_rate": self.target_rate, "passed": self.passed,
                "slack": self.slack, "steps": len(self.rows)}


class CoveringModule(BaseModule):
    """Module for coverings, covering trees and box counting"""

    section = "covering"

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the covering module.

        Args:
            config: Configuration dictionary
        """
        super().__init__(config)
        self.ball_samples = int(self.setting("ball_samples", 4000))
        self.grid_resolution = {int(k): int(v) for k, v in
                                self.setting("grid_resolution", {"1": 801, "2": 81, "3": 25}).items()}
        self.max_levels = int(self.setting("max_levels", 12))
        self.max_dim = int(self.setting("max_dim", 8))
        self.attraction_slack = float(self.setting("attraction_slack", 0.1))
        self.threads = int(config.get("threads", 1) or 1)
        self.logger.info("Covering module initialized")

    def ball_sample(self, dim: int, norm: str, radius: float, seed: int = 0) -> np.ndarray:
        """Dense sample of the closed ball: a grid up to dimension 3, random points above."""
        metric = Metric(norm)
        if dim in self.grid_resolution:
            axis = np.linspace(-radius, radius, self.grid_resolution[dim])
            points = np.array(list(product(axis, repeat=dim)))
        else:
            rng = np.random.default_rng(seed)
            if metric.kind == "sup":
                points = rng.uniform(-radius, radius, size=(self.ball_samples, dim))
            else:
                directions = rng.standard_normal((self.ball_samples, dim))
                directions /= np.linalg.norm(directions, axis=1)[:, None]
                points = directions * radius * rng.uniform(0, 1, self.ball_samples)[:, None] ** (1.0 / dim)
            points = np.vstack([np.zeros(dim), points])
        inside = metric.to_point(points, np.zeros(dim)) <= radius * (1.0 + 1e-12)
        return points[inside]

    def cover_ball(self, dim: int, norm: str, r_ball: float, r_cover: float) -> np.ndarray:
        """
        Greedy covering of the ball of radius r_ball by balls of radius r_cover.

        Args:
            dim: Dimension (<= max_dim)
            norm: ``sup`` or ``euclidean``
            r_ball: Radius of the covered ball
            r_cover: Radius of the covering balls

        Returns:
            Array of centers, starting with the origin
        """
        if not (r_ball > 0 and r_cover > 0):
            raise DomainError("radii must be positive")
        if not 1 <= dim <= self.max_dim:
            raise DomainError(f"dimension {dim} outside [1, {self.max_dim}]")
        if Metric(norm).kind == "segment":
            raise DomainError("cover_ball works in R^d with the sup or Euclidean norm")
        points = self.ball_sample(dim, norm, r_ball)
        origin = int(np.argmin(Metric(norm).to_point(points, np.zeros(dim))))
        centers, _ = greedy_cover(points, r_cover, Metric(norm), start=origin)
        bound = covering_bound(dim, r_ball, r_cover)
        if len(centers) > bound:
            raise CoveringLemmaError(f"{len(centers)} balls used, lemma allows {bound:.6g}",
                                     context={"dim": dim, "norm": norm, "count": len(centers)})
        self.logger.debug(f"Covered {dim}-ball (ratio {r_ball / r_cover:g}) with {len(centers)} balls")
        return points[centers]

    def build_covering_tree(self, mapping: Callable, cert: SqueezingCertificate, R_B: float, levels: int,
                            cloud: PointCloud) -> CoveringTree:
        """
        Centers W^l covering the l-fold image of the sampled absorbing set at radius zeta^l R_B.

        Each center's cluster is mapped forward, its P-part is covered at radius
        alpha e^{lambda0} zeta^(l-1) R_B and the center's Q-part is added back.

        Args:
            mapping: Map with ``__call__`` and ``project`` on flattened points
            cert: Squeezing certificate of the map
            R_B: Radius of the absorbing ball
            levels: Number of levels (<= max_levels)
            cloud: Sample of the absorbing set

        Returns:
            CoveringTree satisfying the cardinality and covering checks
        """
        if not 1 <= levels <= self.max_levels:
            raise DomainError(f"levels must lie in [1, {self.max_levels}], got {levels}")
        if not cert.admissible:
            raise DomainError(f"covering tree needs zeta < 1, got {cert.zeta}")
        if len(cloud) == 0:
            raise DomainError("empty sample cloud")
        metric = cloud.metric
        X = cloud.points
        eccentricity = metric.pairwise(X, X).max(axis=1)
        root_index = int(np.argmin(eccentricity))
        if eccentricity[root_index] > R_B * (1.0 + 1e-9):
            raise CoveringConstructionError(
                f"no sample point has the whole sample within R_B = {R_B} "
                f"(best {eccentricity[root_index]:.6g})", level=0, point_index=root_index)
        lemma = cert.Lambda * 2 ** cert.Lambda * (1.0 + cert.M1 / cert.alpha) ** cert.Lambda

        centers = X[[root_index]]
        assignment = np.zeros(len(X), dtype=int)
        W, E, radii = [], [], []
        for level in range(1, levels + 1):
            radius_p = cert.alpha * math.exp(cert.lambda0) * cert.zeta ** (level - 1) * R_B
            radius = cert.zeta ** level * R_B
            image = mapping(X)
            projected = mapping.project(image)
            center_images = mapping(centers)
            center_projected = mapping.project(center_images)

            new_centers = []
            new_assignment = np.empty(len(X), dtype=int)
            for ci in range(len(centers)):
                members = np.nonzero(assignment == ci)[0]
                if len(members) == 0:
                    continue
                start = int(np.argmin(metric.to_point(projected[members], center_projected[ci])))
                chosen, local = greedy_cover(projected[members], radius_p, metric, start=start)
                offset = len(new_centers)
                q_part = center_images[ci] - center_projected[ci]
                new_centers.extend(projected[members[j]] + q_part for j in chosen)
                new_assignment[members] = offset + local
            centers = np.array(new_centers)

            distance = metric.to_point(image, centers[0]) if len(centers) == 1 else None
            if distance is None:
                distance = np.array([metric.to_point(image[i:i + 1], centers[new_assignment[i]])[0]
                                     for i in range(len(image))])
            bad = np.nonzero(distance > radius * (1.0 + 1e-9))[0]
            if len(bad):
                nearest, _ = metric.nearest(image[bad], centers)
                still = bad[nearest > radius * (1.0 + 1e-9)]
                if len(still):
                    i = int(still[0])
                    raise CoveringConstructionError(
                        f"level {level}: image of sample point {i} is farther than "
                        f"zeta^{level} R_B = {radius:.6g} from every center", level=level, point_index=i)
            if len(centers) > lemma ** level:
                raise CoveringLemmaError(f"level {level}: {len(centers)} centers exceed the bound "
                                         f"{lemma ** level:.6g}", context={"level": level})

            cumulative = centers if not E else np.vstack([centers, mapping(E[-1])])
            if len(cumulative) > sum(lemma ** i for i in range(level + 1)):
                raise CoveringLemmaError(f"level {level}: {len(cumulative)} cumulative centers exceed "
                                         f"the bound", context={"level": level})
            W.append(centers)
            E.append(cumulative)
            radii.append(radius)
            X, assignment = image, new_assignment
            self.logger.info(f"Covering level {level}: {len(centers)} centers, radius {radius:.4g}")
        return CoveringTree(W, E, radii, cert.zeta, R_B, lemma, cloud.points[root_index])

    def hausdorff_semidist(self, A: PointCloud, B: PointCloud) -> float:
        """sup over a in A of the distance from a to B."""
        if len(A) == 0 or len(B) == 0:
            raise DomainError("Hausdorff semidistance needs nonempty clouds")
        distance, _ = A.metric.nearest(A.points, B.points)
        return float(np.max(distance))

    def _count(self, points: np.ndarray, metric: Metric, eps: float, tree: Optional[cKDTree]) -> int:
        covered = np.zeros(len(points), dtype=bool)
        count = 0
        for i in range(len(points)):
            if covered[i]:
                continue
            count += 1
            if tree is not None:
                covered[tree.query_ball_point(points[i], eps / metric.scale, p=metric.minkowski_p)] = True
            else:
                covered |= metric.to_point(points, points[i]) <= eps
        return count

    def box_counting_dimension(self, cloud: PointCloud, eps_ladder: Sequence[float]) -> BoxCountingResult:
        """
        Slope of ln N_eps against ln(1/eps), N_eps from a greedy eps-covering.

        Counts are made monotone along the ladder; up to two leading rungs
        saturated at one ball are left out of the fit.

        Args:
            cloud: Point cloud
            eps_ladder: Strictly decreasing positive radii, at least four

        Returns:
            BoxCountingResult
        """
        eps = [float(e) for e in eps_ladder]
        if len(eps) < 4 or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise DomainError("eps ladder must be strictly decreasing, positive and have at least 4 rungs")
        if len(cloud) == 0:
            raise DomainError("box counting needs a nonempty cloud")
        points = cloud.points[np.lexsort(cloud.points.T[::-1])]
        metric = cloud.metric
        tree = cKDTree(points) if metric.minkowski_p is not None else None
        counts = parallel_map(lambda e: self._count(points, metric, e, tree), eps, self.threads)
        counts = list(np.maximum.accumulate(counts).astype(int))

        used = [True] * len(eps)
        for i in range(min(2, len(eps))):
            if counts[i] == 1:
                used[i] = False
            else:
                break
        x = np.log(1.0 / np.array(eps))[used]
        y = np.log(np.array(counts, dtype=float))[used]
        if np.all(y == y[0]):
            estimate = 0.0
        else:
            estimate = float(np.polyfit(x, y, 1)[0])
        self.logger.info(f"Box-counting estimate {estimate:.4f} from counts {counts}")
        return BoxCountingResult(estimate, eps, [int(c) for c in counts], used)

    def verify_exponential_attraction(self, mapping: Callable, tree: CoveringTree, D: PointCloud,
                                      horizon: int) -> AttractionReport:
        """
        dist(S^n D, E^n) for n = 1..horizon and its fitted exponential decay rate.

        Args:
            mapping: The map the tree was built for
            tree: Covering tree
            D: Bounded set of starting points
            horizon: Number of steps (<= tree levels)

        Returns:
            AttractionReport; raises when a semidistance exceeds zeta^n times the radius
        """
        if not 1 <= horizon <= len(tree.E):
            raise DomainError(f"horizon must lie in [1, {len(tree.E)}]")
        if len(D) == 0:
            raise DomainError("empty set D")
        scale = max(tree.R_B, float(np.max(D.metric.to_point(D.points, tree.root))))
        points = D.points
        rows = []
        for n in range(1, horizon + 1):
            points = mapping(points)
            distance = self.hausdorff_semidist(PointCloud(points, D.metric), PointCloud(tree.E[n - 1], D.metric))
            bound = tree.zeta ** n * scale
            rows.append({"n": n, "semidistance": distance, "bound": bound,
                         "ok": bool(distance <= bound * (1.0 + 1e-9))})
        target = -math.log(tree.zeta)
        values = np.array([row["semidistance"] for row in rows])
        positive = values > 1e-14 * scale
        if positive.sum() < 2:
            rate = math.inf
        else:
            n = np.array([row["n"] for row in rows])[positive]
            rate = float(-np.polyfit(n, np.log(values[positive]), 1)[0])
        bad = [row for row in rows if not row["ok"]]
        if bad:
            raise AttractionError(f"step {bad[0]['n']}: semidistance {bad[0]['semidistance']:.4g} exceeds "
                                  f"zeta^n times the radius, {bad[0]['bound']:.4g}",
                                  context={"fitted_rate": rate, "target_rate": target})
        passed = rate >= target * (1.0 - self.attraction_slack)
        report = AttractionReport(rows, rate, target, passed, self.attraction_slack)
        if not passed:
            self.logger.warning(f"semidistance decays at rate {rate:.4g}, below "
                                f"{target * (1 - self.attraction_slack):.4g}")
        self.logger.info(f"Exponential attraction: fitted rate {rate:.4g} vs -ln zeta = {target:.4g}")
        return report
