#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Delay-model core for AttractorKit.

This module represents delay models and history segments and evaluates the
nonlinear solution semigroup Phi(t)phi = u_t by method-of-steps integration:
a classical four-stage Runge-Kutta step whose length divides the delay, with
delayed values read from a cubic Hermite interpolant of the stored history.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.interpolate import CubicSpline

from attractorkit.errors import BlowUpError, ConfigError, DelayAlignmentError, DomainError
from attractorkit.modules.base import BaseModule

logger = logging.getLogger(__name__)

NORMS = ("max", "euclidean")
BUILTIN_NONLINEARITIES = ("zero", "scaled_tanh", "scaled_sin", "clipped_cubic")


def state_norm(values: np.ndarray, kind: str = "max", scale: float = 1.0) -> np.ndarray:
    """
    Norm of state vectors along the last axis.

    Args:
        values: Array of shape (..., n)
        kind: ``max`` or ``euclidean``
        scale: Constant factor (e.g. the L2 normalization of a sine basis)

    Returns:
        Array of shape (...)
    """
    if kind == "max":
        return scale * np.max(np.abs(values), axis=-1)
    if kind == "euclidean":
        return scale * np.linalg.norm(values, axis=-1)
    raise ValueError(f"Unknown norm {kind!r}; expected one of {NORMS}")


def hermite_eval(grid: np.ndarray, values: np.ndarray, right_slopes: np.ndarray,
                 left_slopes: np.ndarray, x: np.ndarray, derivative: bool = False) -> np.ndarray:
    """
    Piecewise cubic Hermite evaluation with one-sided slopes.

    Interval [grid[i], grid[i+1]] uses ``right_slopes[i]`` and
    ``left_slopes[i+1]``, so a kink at a grid point is represented exactly.

    Args:
        grid: Strictly increasing nodes, shape (m,)
        values: Node values, shape (m, n)
        right_slopes: Right derivatives at the nodes, shape (m, n)
        left_slopes: Left derivatives at the nodes, shape (m, n)
        x: Evaluation points inside [grid[0], grid[-1]], shape (k,)
        derivative: Return the first derivative instead of the value

    Returns:
        Array of shape (k, n)
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    idx = np.clip(np.searchsorted(grid, x, side="right") - 1, 0, len(grid) - 2)
    x0 = grid[idx]
    width = grid[idx + 1] - x0
    s = ((x - x0) / width)[:, None]
    y0 = values[idx]
    y1 = values[idx + 1]
    m0 = right_slopes[idx] * width[:, None]
    m1 = left_slopes[idx + 1] * width[:, None]
    if not derivative:
        s2 = s * s
        s3 = s2 * s
        return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0
                + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1)
    s2 = s * s
    return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0
            + (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * m1) / width[:, None]


@dataclass
class HistorySegment:
    """A discretized element of C([-r, 0], R^n)"""

    delay_span: float
    grid: np.ndarray
    values: np.ndarray
    interpolation_order: int = 3
    derivatives: Optional[np.ndarray] = None
    left_derivatives: Optional[np.ndarray] = None
    norm_kind: str = "max"
    norm_scale: float = 1.0

    def __post_init__(self):
        self.delay_span = float(self.delay_span)
        if not self.delay_span > 0:
            raise DomainError(f"delay span must be positive, got {self.delay_span}")
        self.grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        self.values = values
        if self.grid.ndim != 1 or len(self.grid) < 2:
            raise DomainError("segment grid needs at least two points")
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("segment grid must be strictly increasing")
        tol = 1e-9 * self.delay_span
        if abs(self.grid[0] + self.delay_span) > tol or abs(self.grid[-1]) > tol:
            raise DomainError(
                f"segment grid must span [-r, 0] = [{-self.delay_span}, 0], "
                f"got [{self.grid[0]}, {self.grid[-1]}]")
        self.grid[0] = -self.delay_span
        self.grid[-1] = 0.0
        if self.values.shape[0] != len(self.grid):
            raise DomainError(
                f"values count {self.values.shape[0]} does not match grid count {len(self.grid)}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("segment values must be finite")
        if self.interpolation_order not in (1, 3):
            raise DomainError(f"interpolation order must be 1 or 3, got {self.interpolation_order}")
        if self.norm_kind not in NORMS:
            raise DomainError(f"unknown norm {self.norm_kind!r}")
        for name in ("derivatives", "left_derivatives"):
            slopes = getattr(self, name)
            if slopes is not None:
                slopes = np.asarray(slopes, dtype=float).reshape(self.values.shape)
                setattr(self, name, slopes)
        if self.left_derivatives is not None and self.derivatives is None:
            raise DomainError("left derivatives require right derivatives")

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    @property
    def n_points(self) -> int:
        return len(self.grid)

    def norm(self, kind: Optional[str] = None) -> float:
        """Sup over the grid of the pointwise state norm."""
        return float(np.max(state_norm(self.values, kind or self.norm_kind, self.norm_scale)))

    def slopes(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Right and left derivatives at the grid points.

        Stored derivatives are returned as-is; otherwise they come from a
        not-a-knot cubic spline through the values.
        """
        if self.derivatives is not None:
            left = self.left_derivatives if self.left_derivatives is not None else self.derivatives
            return self.derivatives, left
        if self.n_points >= 3:
            spline = CubicSpline(self.grid, self.values, axis=0)
            slopes = spline(self.grid, 1)
        else:
            slopes = np.gradient(self.values, self.grid, axis=0)
        return slopes, slopes

    def evaluate(self, theta: Union[float, Sequence[float], np.ndarray],
                 derivative: bool = False) -> np.ndarray:
        """
        Interpolated state at delays theta in [-r, 0].

        Returns:
            Array of shape (k, n)
        """
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        tol = 1e-9 * self.delay_span
        if np.any(theta < -self.delay_span - tol) or np.any(theta > tol):
            raise DomainError("evaluation point outside [-r, 0]")
        theta = np.clip(theta, -self.delay_span, 0.0)
        if self.interpolation_order == 1:
            idx = np.clip(np.searchsorted(self.grid, theta, side="right") - 1, 0, self.n_points - 2)
            width = self.grid[idx + 1] - self.grid[idx]
            slope = (self.values[idx + 1] - self.values[idx]) / width[:, None]
            if derivative:
                return slope
            return self.values[idx] + slope * (theta - self.grid[idx])[:, None]
        right, left = self.slopes()
        return hermite_eval(self.grid, self.values, right, left, theta, derivative)

    def resample(self, grid: np.ndarray) -> "HistorySegment":
        """Interpolate onto another grid spanning [-r, 0]."""
        grid = np.asarray(grid, dtype=float)
        values = self.evaluate(grid)
        slopes = self.evaluate(grid, derivative=True) if self.interpolation_order == 3 else None
        return self._like(grid, values, slopes)

    def as_vector(self) -> np.ndarray:
        """Flattened values (point-major), used by point clouds."""
        return self.values.reshape(-1).copy()

    def _like(self, grid, values, derivatives=None, left_derivatives=None) -> "HistorySegment":
        return HistorySegment(self.delay_span, grid, values, self.interpolation_order,
                              derivatives, left_derivatives, self.norm_kind, self.norm_scale)

    def _combine(self, other: "HistorySegment", sign: float) -> "HistorySegment":
        if other.n_points != self.n_points or not np.allclose(other.grid, self.grid, rtol=0, atol=1e-12):
            other = other.resample(self.grid)
        values = self.values + sign * other.values
        if self.derivatives is None or other.derivatives is None:
            return self._like(self.grid, values)
        r1, l1 = self.slopes()
        r2, l2 = other.slopes()
        return self._like(self.grid, values, r1 + sign * r2, l1 + sign * l2)

    def __add__(self, other: "HistorySegment") -> "HistorySegment":
        return self._combine(other, 1.0)

    def __sub__(self, other: "HistorySegment") -> "HistorySegment":
        return self._combine(other, -1.0)

    def scaled(self, factor: float) -> "HistorySegment":
        derivatives = None if self.derivatives is None else self.derivatives * factor
        left = None if self.left_derivatives is None else self.left_derivatives * factor
        return self._like(self.grid, self.values * factor, derivatives, left)

    @classmethod
    def uniform_grid(cls, delay_span: float, h: float) -> np.ndarray:
        steps = int(round(delay_span / h))
        return np.linspace(-delay_span, 0.0, steps + 1)

    @classmethod
    def from_function(cls, fn, delay_span: float, h: float, derivative=None,
                      norm_kind: str = "max", norm_scale: float = 1.0) -> "HistorySegment":
        """
        Sample a history function on the uniform grid of step h.

        Args:
            fn: Callable theta -> state (vectorized over a 1-D theta array)
            delay_span: r
            h: Grid step
            derivative: Optional exact derivative of fn
        """
        grid = cls.uniform_grid(delay_span, h)
        values = np.asarray(fn(grid), dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        slopes = None
        if derivative is not None:
            slopes = np.asarray(derivative(grid), dtype=float).reshape(values.shape)
        return cls(delay_span, grid, values, 3, slopes, None, norm_kind, norm_scale)

    @classmethod
    def constant(cls, value, delay_span: float, h: float, norm_kind: str = "max",
                 norm_scale: float = 1.0) -> "HistorySegment":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        grid = cls.uniform_grid(delay_span, h)
        values = np.tile(value, (len(grid), 1))
        return cls(delay_span, grid, values, 3, np.zeros_like(values), None, norm_kind, norm_scale)


class Nonlinearity:
    """Interface for the nonlinear term f acting on the current and delayed state"""

    name = "abstract"

    def __call__(self, current: np.ndarray, delayed: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Subclasses must implement __call__")

    def lipschitz_bound(self) -> float:
        raise NotImplementedError("Subclasses must implement lipschitz_bound")

    def value_at_zero(self, dimension: int) -> np.ndarray:
        zero = np.zeros((1, dimension))
        return self(zero, zero)[0]

    @property
    def is_zero(self) -> bool:
        return False

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name}


@dataclass
class BuiltinNonlinearity(Nonlinearity):
    """
    Catalog nonlinearity applied componentwise to one sample of the segment.

    params:
        k: scale; cap: clip level of clipped_cubic; offset: constant added
        (scalar or vector); argument: ``delayed`` (phi(-tau), default) or
        ``current`` (phi(0)).
    """

    name: str = "zero"
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in BUILTIN_NONLINEARITIES:
            raise ConfigError(f"unknown nonlinearity {self.name!r}; expected one of "
                              f"{BUILTIN_NONLINEARITIES}", field_path="nonlinearity.name")
        self.params = dict(self.params or {})
        self.k = float(self.params.get("k", 0.0 if self.name == "zero" else 1.0))
        self.cap = float(self.params.get("cap", 1.0))
        self.offset = np.asarray(self.params.get("offset", 0.0), dtype=float)
        self.argument = self.params.get("argument", "delayed")
        if self.argument not in ("delayed", "current"):
            raise ConfigError(f"nonlinearity argument must be 'delayed' or 'current', got {self.argument!r}",
                              field_path="nonlinearity.params.argument")
        if self.name == "clipped_cubic" and not self.cap > 0:
            raise ConfigError("clipped_cubic needs cap > 0", field_path="nonlinearity.params.cap")

    def __call__(self, current: np.ndarray, delayed: np.ndarray) -> np.ndarray:
        x = delayed if self.argument == "delayed" else current
        if self.name == "zero":
            out = np.zeros_like(x)
        elif self.name == "scaled_tanh":
            out = self.k * np.tanh(x)
        elif self.name == "scaled_sin":
            out = self.k * np.sin(x)
        else:
            out = self.k * np.clip(x ** 3, -self.cap, self.cap)
        return out + self.offset

    def lipschitz_bound(self) -> float:
        if self.name == "zero":
            return 0.0
        if self.name in ("scaled_tanh", "scaled_sin"):
            return abs(self.k)
        # x^3 is clipped where |x| exceeds cap^(1/3); steepest slope there
        return 3.0 * abs(self.k) * self.cap ** (2.0 / 3.0)

    @property
    def is_zero(self) -> bool:
        return self.name == "zero" and not np.any(self.offset)

    def describe(self) -> Dict[str, Any]:
        params = dict(self.params)
        if "offset" in params:
            params["offset"] = np.asarray(params["offset"], dtype=float).tolist()
        return {"name": self.name, "params": params}


@dataclass
class DelayModel:
    """
    Linear part x' = A x(t) + B x(t - tau) plus a Lipschitz nonlinearity f(x_t).

    ``delay_coefficient`` is a scalar (meaning b * I) or an n x n matrix.
    """

    dimension: int
    instantaneous_matrix: Any
    delay_coefficient: Any
    delay: float
    nonlinearity: Nonlinearity = field(default_factory=BuiltinNonlinearity)
    lipschitz_constant: float = 0.0
    nonlinearity_at_zero_norm: Optional[float] = None
    norm: str = "max"
    norm_scale: float = 1.0
    kind: str = "rfde"
    label: str = ""

    def __post_init__(self):
        self.dimension = int(self.dimension)
        if self.dimension < 1:
            raise ConfigError("dimension must be a positive integer", field_path="n")
        self.delay = float(self.delay)
        if not self.delay > 0:
            raise ConfigError(f"delay must be positive, got {self.delay}", field_path="tau")
        if sparse.issparse(self.instantaneous_matrix):
            self.instantaneous_matrix = sparse.csr_matrix(self.instantaneous_matrix, dtype=float)
        else:
            self.instantaneous_matrix = np.atleast_2d(np.asarray(self.instantaneous_matrix, dtype=float))
        if self.instantaneous_matrix.shape != (self.dimension, self.dimension):
            raise ConfigError(f"A must be {self.dimension}x{self.dimension}, "
                              f"got {self.instantaneous_matrix.shape}", field_path="A")
        b = np.asarray(self.delay_coefficient, dtype=float)
        if b.ndim == 0:
            self.delay_coefficient_kind = "scalar"
            self.delay_coefficient = float(b)
        else:
            b = np.atleast_2d(b)
            if b.shape != (self.dimension, self.dimension):
                raise ConfigError(f"b must be a scalar or {self.dimension}x{self.dimension}, "
                                  f"got {b.shape}", field_path="b")
            self.delay_coefficient_kind = "matrix"
            self.delay_coefficient = b
        if self.norm not in NORMS:
            raise ConfigError(f"unknown norm {self.norm!r}", field_path="norm")
        self.lipschitz_constant = float(self.lipschitz_constant)
        if self.lipschitz_constant < 0:
            raise ConfigError("lipschitz constant must be >= 0", field_path="lipschitz")
        bound = self.nonlinearity.lipschitz_bound()
        if self.lipschitz_constant < bound * (1 - 1e-12):
            raise ConfigError(
                f"declared lipschitz constant {self.lipschitz_constant} is below the "
                f"nonlinearity's global bound {bound}", field_path="lipschitz")
        c1 = float(state_norm(self.nonlinearity.value_at_zero(self.dimension), self.norm, self.norm_scale))
        if self.nonlinearity_at_zero_norm is None:
            self.nonlinearity_at_zero_norm = c1
        elif abs(float(self.nonlinearity_at_zero_norm) - c1) > 1e-9 * max(1.0, c1):
            raise ConfigError(f"declared c1 = {self.nonlinearity_at_zero_norm} but ||f(0)|| = {c1}",
                              field_path="c1")
        else:
            self.nonlinearity_at_zero_norm = float(self.nonlinearity_at_zero_norm)

    @property
    def delay_matrix(self) -> np.ndarray:
        if self.delay_coefficient_kind == "scalar":
            return self.delay_coefficient * np.eye(self.dimension)
        return self.delay_coefficient

    @property
    def dense_instantaneous_matrix(self) -> np.ndarray:
        if sparse.issparse(self.instantaneous_matrix):
            return self.instantaneous_matrix.toarray()
        return self.instantaneous_matrix

    def linear_part(self) -> "DelayModel":
        """The same model with f = 0."""
        return DelayModel(self.dimension, self.instantaneous_matrix, self.delay_coefficient,
                          self.delay, BuiltinNonlinearity("zero"), 0.0, 0.0, self.norm,
                          self.norm_scale, self.kind, f"{self.label} (linear part)".strip())

    def rhs(self, current: np.ndarray, delayed: np.ndarray) -> np.ndarray:
        """Right-hand side for a batch of states of shape (batch, n)."""
        A = self.instantaneous_matrix
        out = (A @ current.T).T if sparse.issparse(A) else current @ A.T
        if self.delay_coefficient_kind == "scalar":
            if self.delay_coefficient != 0.0:
                out = out + self.delay_coefficient * delayed
        else:
            out = out + delayed @ self.delay_coefficient.T
        if not self.nonlinearity.is_zero:
            out = out + self.nonlinearity(current, delayed)
        return out

    def nonlinearity_on_segment(self, phi: HistorySegment) -> np.ndarray:
        """f(phi) for a segment: the catalog reads phi(0) and phi(-tau)."""
        return self.nonlinearity(phi.values[-1:], phi.values[:1])[0]

    def describe(self) -> Dict[str, Any]:
        b = self.delay_coefficient
        return {
            "kind": self.kind,
            "label": self.label,
            "n": self.dimension,
            "A": self.dense_instantaneous_matrix.tolist(),
            "b": b if self.delay_coefficient_kind == "scalar" else b.tolist(),
            "b_kind": self.delay_coefficient_kind,
            "tau": self.delay,
            "nonlinearity": self.nonlinearity.describe(),
            "lipschitz": self.lipschitz_constant,
            "c1": self.nonlinearity_at_zero_norm,
            "norm": self.norm,
            "norm_scale": self.norm_scale,
        }


@dataclass
class Trajectory:
    """
    Stored solution samples on [-r, T] at spacing h.

    Index ``history_points - 1`` is t = 0; right and left slopes differ only at
    t = 0, where the solution has a derivative jump.
    """

    model: DelayModel
    start: HistorySegment
    h: float
    T: float
    times: np.ndarray
    states: np.ndarray
    right_slopes: np.ndarray
    left_slopes: np.ndarray
    history_points: int

    @property
    def steps(self) -> int:
        return len(self.times) - self.history_points

    def state_at(self, t: float) -> np.ndarray:
        return hermite_eval(self.times, self.states, self.right_slopes, self.left_slopes,
                            np.array([t]))[0]

    def to_frame(self) -> pd.DataFrame:
        """Solution on [0, T] as a table with columns t, x1..xn."""
        zero = self.history_points - 1
        frame = pd.DataFrame(self.states[zero:], columns=[f"x{i + 1}" for i in range(self.model.dimension)])
        frame.insert(0, "t", self.times[zero:])
        return frame

    def delay_residual(self) -> np.ndarray:
        """
        max-norm of x'(t) - A x(t) - B x(t - tau) - f(x_t) at interior grid points.

        The derivative comes from a five-point central difference, so the
        residual carries the combined integration and differencing error.
        """
        M = self.history_points - 1
        x = self.states
        idx = np.arange(M + 2, len(self.times) - 2)
        if len(idx) == 0:
            return np.zeros(0)
        deriv = (-x[idx + 2] + 8 * x[idx + 1] - 8 * x[idx - 1] + x[idx - 2]) / (12 * self.h)
        rhs = self.model.rhs(x[idx], x[idx - M])
        return np.max(np.abs(deriv - rhs), axis=-1)


def random_smooth_segments(rng: np.random.Generator, delay_span: float, h: float, dimension: int,
                           count: int, radius: float = 1.0, modes: int = 4,
                           norm_kind: str = "max", norm_scale: float = 1.0,
                           exact_norm: bool = False) -> List[HistorySegment]:
    """
    Random trigonometric histories with exact derivatives.

    Each segment is rescaled to a norm drawn uniformly from
    [0.05 * radius, radius], or exactly ``radius`` when ``exact_norm``.
    """
    grid = HistorySegment.uniform_grid(delay_span, h)
    s = (grid + delay_span) / delay_span
    segments = []
    for _ in range(count):
        c0 = rng.standard_normal(dimension)
        a = rng.standard_normal((modes, dimension))
        b = rng.standard_normal((modes, dimension))
        values = np.tile(c0, (len(grid), 1))
        slopes = np.zeros_like(values)
        for j in range(1, modes + 1):
            cos_j = np.cos(j * np.pi * s)[:, None]
            sin_j = np.sin(j * np.pi * s)[:, None]
            values += (a[j - 1] * cos_j + b[j - 1] * sin_j) / j
            slopes += (-a[j - 1] * sin_j + b[j - 1] * cos_j) * np.pi / delay_span
        norm = float(np.max(state_norm(values, norm_kind, norm_scale)))
        target = radius if exact_norm else radius * rng.uniform(0.05, 1.0)
        factor = target / norm
        segments.append(HistorySegment(delay_span, grid, values * factor, 3, slopes * factor,
                                       None, norm_kind, norm_scale))
    return segments


def probe_segments(delay_span: float, h: float, dimension: int, harmonics: int = 3,
                   norm_kind: str = "max", norm_scale: float = 1.0) -> List[HistorySegment]:
    """Deterministic probes: constants and low harmonics along each axis."""
    grid = HistorySegment.uniform_grid(delay_span, h)
    s = (grid + delay_span) / delay_span
    probes = []
    for axis in range(dimension):
        unit = np.zeros(dimension)
        unit[axis] = 1.0
        shapes = [(np.ones_like(s), np.zeros_like(s))]
        for j in range(1, harmonics + 1):
            w = j * np.pi / delay_span
            shapes.append((np.cos(j * np.pi * s), -w * np.sin(j * np.pi * s)))
            shapes.append((np.sin(j * np.pi * s), w * np.cos(j * np.pi * s)))
        for profile, slope in shapes:
            values = profile[:, None] * unit
            slopes = slope[:, None] * unit
            norm = float(np.max(state_norm(values, norm_kind, norm_scale)))
            probes.append(HistorySegment(delay_span, grid, values / norm, 3, slopes / norm,
                                         None, norm_kind, norm_scale))
    return probes


class DdeCoreModule(BaseModule):
    """Module for integrating delay models and evaluating their solution semigroup"""

    section = "integrator"

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the delay-model core.

        Args:
            config: Configuration dictionary
        """
        super().__init__(config)
        self.default_h = float(self.setting("h", 1e-3))
        self.alignment_tolerance = float(self.setting("alignment_tolerance", 1e-9))
        self.logger.debug(f"DDE core initialized with default step {self.default_h}")

    def steps_per_delay(self, delay: float, h: float) -> int:
        """Number of steps per delay interval; raises when h does not divide r."""
        if not h > 0:
            raise DelayAlignmentError(f"step must be positive, got {h}")
        ratio = delay / h
        steps = int(round(ratio))
        if steps < 1 or abs(steps * h - delay) > self.alignment_tolerance * delay:
            raise DelayAlignmentError(
                f"step h = {h} does not divide the delay r = {delay} (r/h = {ratio:.12g})",
                context={"h": h, "delay": delay})
        return steps

    def _history_arrays(self, phi: HistorySegment, grid: np.ndarray):
        if phi.n_points == len(grid) and np.allclose(phi.grid, grid, rtol=0, atol=1e-12 * phi.delay_span):
            right, left = phi.slopes()
            return phi.values, right, left
        values = phi.evaluate(grid)
        slopes = phi.evaluate(grid, derivative=True)
        return values, slopes, slopes

    def integrate(self, model: DelayModel, phi: HistorySegment, T: float,
                  h: Optional[float] = None) -> Trajectory:
        """
        Integrate one history by the method of steps.

        Args:
            model: Delay model
            phi: Initial history on [-r, 0]
            T: Final time (>= 0)
            h: Step dividing the delay; defaults to the configured step

        Returns:
            Trajectory on [-r, T]
        """
        return self.integrate_batch(model, [phi], T, h)[0]

    def integrate_batch(self, model: DelayModel, phis: Sequence[HistorySegment], T: float,
                        h: Optional[float] = None) -> List[Trajectory]:
        """
        Integrate several histories of one model in lock step.

        Every trajectory is computed with exactly the arithmetic of a single
        integration, so batching never changes results.
        """
        h = float(h if h is not None else self.default_h)
        T = float(T)
        if not T >= 0:
            raise DomainError(f"final time must be >= 0, got {T}")
        if not phis:
            return []
        for phi in phis:
            if abs(phi.delay_span - model.delay) > 1e-12 * max(1.0, model.delay):
                raise DomainError(f"history span {phi.delay_span} does not match model delay {model.delay}")
            if phi.dimension != model.dimension:
                raise DomainError(f"history dimension {phi.dimension} does not match model dimension "
                                  f"{model.dimension}")
        M = self.steps_per_delay(model.delay, h)
        N = int(math.ceil(T / h - 1e-9)) if T > 0 else 0
        n = model.dimension
        batch = len(phis)
        order = phis[0].interpolation_order

        grid = np.linspace(-model.delay, 0.0, M + 1)
        times = np.concatenate([grid, h * np.arange(1, N + 1)])
        X = np.empty((batch, M + N + 1, n))
        DR = np.empty_like(X)
        DL = np.empty_like(X)
        for i, phi in enumerate(phis):
            values, right, left = self._history_arrays(phi, grid)
            X[i, :M + 1] = values
            DR[i, :M + 1] = right
            DL[i, :M + 1] = left

        # right slope at t = 0 comes from the equation, the left one from the history
        DR[:, M] = model.rhs(X[:, M], X[:, 0])

        half = 0.5 * h
        for k in range(N):
            i = M + k
            x = X[:, i]
            delayed_start = X[:, k]
            delayed_end = X[:, k + 1]
            if order == 3:
                delayed_mid = (0.5 * (delayed_start + delayed_end)
                               + 0.125 * h * (DR[:, k] - DL[:, k + 1]))
            else:
                delayed_mid = 0.5 * (delayed_start + delayed_end)
            k1 = DR[:, i]
            k2 = model.rhs(x + half * k1, delayed_mid)
            k3 = model.rhs(x + half * k2, delayed_mid)
            k4 = model.rhs(x + h * k3, delayed_end)
            x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(x_new)):
                bad_time = float(times[i + 1])
                raise BlowUpError(f"non-finite state at t = {bad_time:.6g}", time=bad_time)
            X[:, i + 1] = x_new
            slope = model.rhs(x_new, delayed_end)
            DR[:, i + 1] = slope
            DL[:, i + 1] = slope

        self.logger.debug(f"Integrated {batch} histories over [0, {T}] with h = {h} ({N} steps)")
        return [Trajectory(model, phi, h, T, times, X[i], DR[i], DL[i], M + 1)
                for i, phi in enumerate(phis)]

    def segment_at(self, traj: Trajectory, t: float) -> HistorySegment:
        """
        The segment u_t(theta) = u(t + theta), theta in [-r, 0].

        Args:
            traj: Integrated trajectory
            t: Time in [0, T]

        Returns:
            HistorySegment on the integrator's grid
        """
        tol = 1e-9 * max(1.0, traj.T)
        if t < -tol or t > traj.T + tol:
            raise DomainError(f"segment time {t} outside [0, {traj.T}]")
        t = min(max(float(t), 0.0), traj.T)
        M = traj.history_points - 1
        grid = np.linspace(-traj.model.delay, 0.0, M + 1)
        model = traj.model
        steps = t / traj.h
        j0 = int(round(steps))
        if abs(j0 - steps) < 1e-9 and j0 + M < len(traj.times):
            sl = slice(j0, j0 + M + 1)
            return HistorySegment(model.delay, grid, traj.states[sl].copy(), traj.start.interpolation_order,
                                  traj.right_slopes[sl].copy(), traj.left_slopes[sl].copy(),
                                  model.norm, model.norm_scale)
        points = t + grid
        values = hermite_eval(traj.times, traj.states, traj.right_slopes, traj.left_slopes, points)
        slopes = hermite_eval(traj.times, traj.states, traj.right_slopes, traj.left_slopes, points,
                              derivative=True)
        return HistorySegment(model.delay, grid, values, traj.start.interpolation_order, slopes, None,
                              model.norm, model.norm_scale)

    def semigroup_apply(self, model: DelayModel, phi: HistorySegment, t: float,
                        h: Optional[float] = None) -> HistorySegment:
        """Phi(t)phi = u_t^phi."""
        return self.segment_at(self.integrate(model, phi, t, h), t)

    def semigroup_apply_batch(self, model: DelayModel, phis: Sequence[HistorySegment], t: float,
                              h: Optional[float] = None) -> List[HistorySegment]:
        return [self.segment_at(traj, t) for traj in self.integrate_batch(model, phis, t, h)]

    def evolve_segments(self, model: DelayModel, phis: Sequence[HistorySegment],
                        t_grid: Sequence[float], h: Optional[float] = None) -> List[List[HistorySegment]]:
        """
        Segments u_t for every history and every t in t_grid, from one integration each.

        Returns:
            Nested list indexed [history][time]
        """
        t_grid = [float(t) for t in t_grid]
        horizon = max(t_grid) if t_grid else 0.0
        trajectories = self.integrate_batch(model, phis, horizon, h)
        return [[self.segment_at(traj, t) for t in t_grid] for traj in trajectories]
