#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Spectral module for AttractorKit.

This module solves the characteristic equation det(lambda I - A - B e^{-lambda tau}) = 0,
orders its roots, builds the finite-dimensional spectral projection of the
linear delay semigroup and estimates the dichotomy constants K, K0, gamma.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg

from attractorkit.errors import (
    ContourError,
    CutIndexError,
    DecompositionError,
    DomainError,
    IncompleteEnumerationError,
    StabilityError,
    WindowTooSmallError,
)
from attractorkit.modules.base import BaseModule
from attractorkit.modules.dde_core import (
    DdeCoreModule,
    DelayModel,
    HistorySegment,
    probe_segments,
    random_smooth_segments,
)

# non-midpoint splits keep subdivision lines off the real axis and off each other
SPLIT_RATIOS = (0.4917, 0.4471, 0.5389, 0.4203, 0.5712, 0.3819)
JITTER_STEPS = (0.0, 1.3e-3, -2.1e-3, 3.7e-3, -5.3e-3, 8.9e-3, -1.27e-2, 1.9e-2)
# e^{-lambda tau} overflows past this exponent
EXPONENT_CAP = 600.0


@dataclass
class CharacteristicFunction:
    """
    det Delta(lambda) with Delta(lambda) = lambda I - (A - k^2 I) - B e^{-lambda tau}.

    ``mode_offset`` is k^2 for one sine mode of the reaction-diffusion problem
    and 0 for a plain delay model.
    """

    instantaneous_matrix: np.ndarray
    delay_matrix: np.ndarray
    delay: float
    mode_offset: float = 0.0
    norm: str = "max"
    norm_scale: float = 1.0
    label: str = ""

    def __post_init__(self):
        self.instantaneous_matrix = np.atleast_2d(np.asarray(self.instantaneous_matrix, dtype=float))
        self.delay_matrix = np.atleast_2d(np.asarray(self.delay_matrix, dtype=float))
        n = self.instantaneous_matrix.shape[0]
        if self.instantaneous_matrix.shape != (n, n) or self.delay_matrix.shape != (n, n):
            raise DomainError("characteristic matrices must be square and of equal size")
        self.delay = float(self.delay)
        if not self.delay > 0:
            raise DomainError(f"delay must be positive, got {self.delay}")
        self.mode_offset = float(self.mode_offset)
        self.effective_matrix = self.instantaneous_matrix - self.mode_offset * np.eye(n)

    @classmethod
    def from_model(cls, model: DelayModel, mode_offset: float = 0.0) -> "CharacteristicFunction":
        return cls(model.dense_instantaneous_matrix, model.delay_matrix, model.delay, mode_offset,
                   model.norm, model.norm_scale, model.label)

    @classmethod
    def reaction_diffusion_mode(cls, a: float, b: float, r: float, k: int) -> "CharacteristicFunction":
        """lambda + k^2 + a + b e^{-lambda r} for sine mode k."""
        return cls([[-a]], [[-b]], r, float(k * k), label=f"mode {k}")

    @property
    def dimension(self) -> int:
        return self.instantaneous_matrix.shape[0]

    def matrix(self, lam: complex) -> np.ndarray:
        n = self.dimension
        return lam * np.eye(n) - self.effective_matrix - self.delay_matrix * np.exp(-lam * self.delay)

    def derivative_matrix(self, lam: complex) -> np.ndarray:
        n = self.dimension
        return np.eye(n) + self.delay * self.delay_matrix * np.exp(-lam * self.delay)

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        decay = np.exp(-lam * self.delay)
        if self.dimension == 1:
            return lam - self.effective_matrix[0, 0] - self.delay_matrix[0, 0] * decay
        flat = lam.reshape(-1)
        eye = np.eye(self.dimension)
        stack = (flat[:, None, None] * eye - self.effective_matrix
                 - self.delay_matrix * decay.reshape(-1)[:, None, None])
        return np.linalg.det(stack).reshape(lam.shape)

    def log_derivative(self, lam) -> np.ndarray:
        """f'/f = tr(Delta^{-1} Delta')."""
        lam = np.asarray(lam, dtype=complex)
        decay = np.exp(-lam * self.delay)
        if self.dimension == 1:
            b = self.delay_matrix[0, 0]
            return (1.0 + self.delay * b * decay) / (lam - self.effective_matrix[0, 0] - b * decay)
        flat = lam.reshape(-1)
        d = decay.reshape(-1)[:, None, None]
        eye = np.eye(self.dimension)
        stack = flat[:, None, None] * eye - self.effective_matrix - self.delay_matrix * d
        deriv = eye + self.delay * self.delay_matrix * d
        return np.trace(np.linalg.solve(stack, deriv), axis1=1, axis2=2).reshape(lam.shape)

    def matrix_norms(self) -> Tuple[float, float]:
        return (float(np.linalg.norm(self.effective_matrix, 2)),
                float(np.linalg.norm(self.delay_matrix, 2)))

    def linear_model(self) -> DelayModel:
        """The linear delay model whose semigroup this function describes."""
        return DelayModel(self.dimension, self.effective_matrix, self.delay_matrix, self.delay,
                          norm=self.norm, norm_scale=self.norm_scale, label=self.label)

    def describe(self) -> Dict[str, Any]:
        return {
            "A": self.instantaneous_matrix.tolist(),
            "B": self.delay_matrix.tolist(),
            "tau": self.delay,
            "mode_offset": self.mode_offset,
        }


@dataclass
class CharacteristicRoot:
    value: complex
    multiplicity: int = 1
    residual: float = 0.0
    certificate: Optional[Dict[str, Any]] = None

    @property
    def re(self) -> float:
        return float(self.value.real)

    @property
    def im(self) -> float:
        return float(self.value.imag)

    def to_dict(self) -> Dict[str, Any]:
        return {"re": self.re, "im": self.im, "multiplicity": int(self.multiplicity),
                "residual": float(self.residual)}


@dataclass
class EigenMode:
    """Right/left null bases and pairing data of one root in the leading set"""

    value: complex
    multiplicity: int
    right: np.ndarray  # n x k
    left: np.ndarray  # k x n
    gram_inverse: np.ndarray  # (left Delta' right)^{-1}
    kernel_weights: np.ndarray  # e^{-lambda (s_q + tau)} w_q at quadrature nodes


@dataclass
class SpectralDecomposition:
    """Leading real parts, multiplicities and the projection P onto their eigenspaces"""

    chi: CharacteristicFunction
    roots: List[CharacteristicRoot]
    leading: List[CharacteristicRoot]
    rhos: List[float]
    multiplicities: List[int]
    cut_index: int
    k_m: int
    modes: List[EigenMode]
    quadrature_nodes: np.ndarray
    quadrature_size: int
    rho_next: Optional[float] = None
    K: Optional[float] = None
    K0: Optional[float] = None
    gamma: Optional[float] = None
    safety_factor: Optional[float] = None
    decay_provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def rho_1(self) -> float:
        return self.rhos[0]

    @property
    def rho_m(self) -> float:
        return self.rhos[self.cut_index - 1]

    def coordinates(self, phi: HistorySegment) -> List[np.ndarray]:
        """Complex pairing coefficients of phi against each leading root."""
        B = self.chi.delay_matrix
        at_nodes = phi.evaluate(self.quadrature_nodes) @ B.T
        head = phi.values[-1]
        coords = []
        for mode in self.modes:
            inner = head + mode.kernel_weights @ at_nodes
            coords.append(mode.gram_inverse @ (mode.left @ inner))
        return coords

    def _synthesize(self, theta: np.ndarray, coords: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
        values = np.zeros((len(theta), self.chi.dimension), dtype=complex)
        slopes = np.zeros_like(values)
        for mode, c in zip(self.modes, coords):
            wave = np.exp(mode.value * theta)[:, None] * (mode.right @ c)
            values += wave
            slopes += mode.value * wave
        return values.real, slopes.real

    def project(self, phi: HistorySegment) -> HistorySegment:
        """P phi on the segment's own grid, with exact derivatives."""
        values, slopes = self._synthesize(phi.grid, self.coordinates(phi))
        return HistorySegment(phi.delay_span, phi.grid, values, 3, slopes, None,
                              phi.norm_kind, phi.norm_scale)

    def complement(self, phi: HistorySegment) -> HistorySegment:
        """(I - P) phi."""
        return phi - self.project(phi)

    def eigenfunction(self, index: int, column: int = 0, grid: Optional[np.ndarray] = None,
                      h: float = 1e-3) -> HistorySegment:
        """Real part of e^{lambda theta} xi for the index-th leading root, sup-normalized."""
        mode = self.modes[index]
        xi = mode.right[:, column]
        xi = xi / xi[np.argmax(np.abs(xi))]
        if grid is None:
            grid = HistorySegment.uniform_grid(self.chi.delay, h)
        wave = np.exp(mode.value * grid)[:, None] * xi
        values, slopes = wave.real, (mode.value * wave).real
        segment = HistorySegment(self.chi.delay, grid, values, 3, slopes, None,
                                 self.chi.norm, self.chi.norm_scale)
        return segment.scaled(1.0 / segment.norm())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rhos": [float(r) for r in self.rhos],
            "multiplicities": [int(k) for k in self.multiplicities],
            "cut_index": self.cut_index,
            "k_m": self.k_m,
            "rho_next": self.rho_next,
            "K": self.K,
            "K0": self.K0,
            "gamma": self.gamma,
            "quadrature_nodes": self.quadrature_size,
            "safety_factor": self.safety_factor,
            "leading_roots": [root.to_dict() for root in self.leading],
            "provenance": dict(self.decay_provenance),
        }


@dataclass
class DecayConstants:
    K: float
    K0: float
    gamma: float
    t_grid: List[float]
    sample_count: int
    seed: int
    safety_factor: float
    provenance: str = "sampled-estimate"

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.K, self.K0, self.gamma

    def to_dict(self) -> Dict[str, Any]:
        return {"K": self.K, "K0": self.K0, "gamma": self.gamma, "t_grid": self.t_grid,
                "sample_count": self.sample_count, "seed": self.seed,
                "safety_factor": self.safety_factor, "provenance": self.provenance}


@dataclass
class GeneratorSpectrum:
    """Chebyshev collocation of the delay generator"""

    nodes: np.ndarray  # theta values, nodes[0] = 0
    eigenvalues: np.ndarray
    right: np.ndarray  # columns, point-major (node, component)
    left: np.ndarray  # columns, left eigenvectors
    dimension: int

    def leading_projection_at_zero(self, phi: HistorySegment, index: int = 0) -> np.ndarray:
        """(P phi)(0) for the index-th eigenvalue computed from the discrete eigenvectors."""
        v = self.right[:, index]
        w = self.left[:, index]
        sample = phi.evaluate(self.nodes).reshape(-1)
        coefficient = (w.conj() @ sample) / (w.conj() @ v)
        return (coefficient * v[:self.dimension]).real


class SpectralModule(BaseModule):
    """Module for characteristic roots, spectral projections and dichotomy constants"""

    section = "spectral"

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the spectral module.

        Args:
            config: Configuration dictionary
        """
        super().__init__(config)
        self.root_tolerance = float(self.setting("root_tolerance", 1e-10))
        self.newton_max_iter = int(self.setting("newton_max_iter", 60))
        self.max_depth = int(self.setting("max_depth", 60))
        self.max_jitter = int(self.setting("max_jitter", 6))
        self.edge_samples = int(self.setting("edge_samples", 64))
        self.max_edge_samples = int(self.setting("max_edge_samples", 65536))
        self.multiple_root_diameter = float(self.setting("multiple_root_diameter", 1e-6))
        self.cluster_diameter = float(self.setting("cluster_diameter", 1e-3))
        self.contour_floor = float(self.setting("contour_floor", 1e-9))
        self.window_enlargements = int(self.setting("window_enlargements", 3))
        self.max_im_extent = float(self.setting("max_im_extent", 2000.0))
        self.realpart_tolerance = float(self.setting("realpart_tolerance", 1e-8))
        self.quadrature_size = int(self.setting("quadrature_nodes", 64))
        self.gamma_fraction = float(self.setting("gamma_fraction", 0.9))
        self.safety_factor = float(self.setting("safety_factor", 1.1))
        self.decay_sample_count = int(self.setting("decay_sample_count", 50))
        self.generator_nodes = int(self.setting("generator_nodes", 32))
        self.dde = DdeCoreModule(config)
        self.logger.info("Spectral module initialized")

    # ------------------------------------------------------------------
    # argument principle
    # ------------------------------------------------------------------

    @staticmethod
    def _contour(rect: Tuple[float, float, float, float], samples: int) -> np.ndarray:
        re0, re1, im0, im1 = rect
        t = np.arange(samples) / samples
        bottom = re0 + (re1 - re0) * t + 1j * im0
        right = re1 + 1j * (im0 + (im1 - im0) * t)
        top = re1 - (re1 - re0) * t + 1j * im1
        left = re0 + 1j * (im1 - (im1 - im0) * t)
        return np.concatenate([bottom, right, top, left, bottom[:1]])

    def winding_number(self, chi: CharacteristicFunction, rect: Tuple[float, float, float, float]) -> int:
        """
        Number of roots (with multiplicity) inside a rectangle by phase unwrapping.

        Edge sampling doubles until every phase increment is below half a
        radian, so no full turn can be missed.

        Args:
            chi: Characteristic function
            rect: (re_min, re_max, im_min, im_max)

        Returns:
            Winding number of det Delta around the rectangle boundary
        """
        samples = self.edge_samples
        while samples <= self.max_edge_samples:
            z = self._contour(rect, samples)
            with np.errstate(all="ignore"):
                f = chi(z)
            if not np.all(np.isfinite(f)):
                raise ContourError(f"non-finite characteristic value on contour {rect}")
            magnitude = np.abs(f)
            if magnitude.min() <= self.contour_floor * np.median(magnitude):
                raise ContourError(f"contour {rect} passes through or next to a root")
            steps = np.angle(f[1:] / f[:-1])
            if np.max(np.abs(steps)) < 0.5:
                total = steps.sum() / (2.0 * math.pi)
                count = int(round(total))
                if abs(total - count) > 1e-3:
                    raise ContourError(f"non-integral winding {total:.6f} on contour {rect}")
                return count
            samples *= 2
        raise ContourError(f"phase along contour {rect} not resolved with {self.max_edge_samples} samples per edge")

    def _jittered(self, rect, attempt):
        re0, re1, im0, im1 = rect
        step = JITTER_STEPS[attempt % len(JITTER_STEPS)]
        d_re = abs(step) * (re1 - re0)
        d_im = abs(step) * (im1 - im0)
        return (re0 - d_re, re1 + d_re, im0 - 0.1 * d_im if im0 < 0 else im0, im1 + d_im)

    def _winding_jittered(self, chi, rect):
        for attempt in range(self.max_jitter + 1):
            candidate = rect if attempt == 0 else self._jittered(rect, attempt)
            try:
                return self.winding_number(chi, candidate), candidate
            except ContourError as e:
                self.logger.warning(f"Contour attempt {attempt} failed: {e}")
        raise ContourError(f"contour {rect} still hits a root after {self.max_jitter} jitter attempts",
                           context={"rect": list(rect)})

    # ------------------------------------------------------------------
    # root isolation and polishing
    # ------------------------------------------------------------------

    def _newton(self, chi: CharacteristicFunction, z0: complex, multiplicity: int = 1,
                keep_real: bool = False) -> Optional[complex]:
        z = complex(z0)
        for _ in range(self.newton_max_iter):
            with np.errstate(all="ignore"):
                value = chi(np.array([z]))[0]
                if value == 0:
                    break
                ld = chi.log_derivative(np.array([z]))[0]
            if not np.isfinite(ld) or ld == 0:
                return None
            step = multiplicity / ld
            if keep_real:
                step = complex(step.real, 0.0)
            z -= step
            if not np.isfinite(z):
                return None
            if abs(step) <= 4e-16 * max(1.0, abs(z)):
                break
        with np.errstate(all="ignore"):
            residual = abs(chi(np.array([z]))[0])
        if not residual < self.root_tolerance:
            return None
        return z

    @staticmethod
    def _inside(z: complex, rect, slack: float = 1e-9) -> bool:
        re0, re1, im0, im1 = rect
        pad = slack * max(1.0, abs(z))
        return re0 - pad <= z.real <= re1 + pad and im0 - pad <= z.imag <= im1 + pad

    @staticmethod
    def _split(rect, ratio):
        re0, re1, im0, im1 = rect
        if (re1 - re0) >= (im1 - im0):
            cut = re0 + ratio * (re1 - re0)
            return (re0, cut, im0, im1), (cut, re1, im0, im1)
        cut = im0 + ratio * (im1 - im0)
        return (re0, re1, im0, cut), (re0, re1, cut, im1)

    def _contour_moments(self, chi, rect, center, count):
        x, w = leggauss(self.quadrature_size)
        re0, re1, im0, im1 = rect
        corners = [complex(re0, im0), complex(re1, im0), complex(re1, im1), complex(re0, im1)]
        moments = np.zeros(count + 1, dtype=complex)
        for a, b in zip(corners, corners[1:] + corners[:1]):
            z = a + (b - a) * (x + 1) / 2
            g = chi.log_derivative(z) * (b - a) / 2 * w
            for k in range(count + 1):
                moments[k] += np.sum(g * (z - center) ** k)
        return moments / (2j * math.pi)

    def _resolve_cluster(self, chi, rect, count) -> Optional[List[Tuple[complex, int]]]:
        """Several roots in a tiny rectangle: power sums of the roots give their polynomial."""
        re0, re1, im0, im1 = rect
        center = complex((re0 + re1) / 2, (im0 + im1) / 2)
        s = self._contour_moments(chi, rect, center, count)
        elementary = [1.0 + 0j]
        for k in range(1, count + 1):
            total = sum((-1) ** (i - 1) * elementary[k - i] * s[i] for i in range(1, k + 1))
            elementary.append(total / k)
        coefficients = [(-1) ** k * elementary[k] for k in range(count + 1)]
        guesses = np.roots(coefficients) + center

        merged = self._newton(chi, complex(np.mean(guesses)), count)
        if merged is not None and self._inside(merged, rect, 1e-6):
            half = 0.5 * self.multiple_root_diameter * max(1.0, abs(merged))
            box = (merged.real - half, merged.real + half, merged.imag - half, merged.imag + half)
            try:
                if self.winding_number(chi, box) == count:
                    self.logger.info(f"Multiple root of multiplicity {count} at {merged:.12g}")
                    return [(merged, count)]
            except ContourError:
                pass

        distinct: List[complex] = []
        for guess in guesses:
            z = self._newton(chi, guess, 1)
            if z is None or not self._inside(z, rect, 1e-6):
                return None
            if all(abs(z - other) > 1e-9 * max(1.0, abs(z)) for other in distinct):
                distinct.append(z)
        if len(distinct) != count:
            return None
        return [(z, 1) for z in distinct]

    def _isolate(self, chi, rect, count, depth, out):
        if count == 0:
            return
        re0, re1, im0, im1 = rect
        center = complex((re0 + re1) / 2, (im0 + im1) / 2)
        diameter = math.hypot(re1 - re0, im1 - im0)
        if count == 1:
            z = self._newton(chi, center, 1)
            if z is not None and self._inside(z, rect):
                out.append((z, 1))
                return
        elif diameter <= self.cluster_diameter * max(1.0, abs(center)):
            found = self._resolve_cluster(chi, rect, count)
            if found is not None:
                out.extend(found)
                return
        if depth >= self.max_depth:
            raise IncompleteEnumerationError(
                f"{count} root(s) in {rect} not isolated after {self.max_depth} subdivisions",
                context={"rect": list(rect), "count": count})
        for ratio in SPLIT_RATIOS:
            halves = self._split(rect, ratio)
            try:
                counts = [self.winding_number(chi, half) for half in halves]
            except ContourError:
                continue
            if sum(counts) == count:
                break
        else:
            raise IncompleteEnumerationError(
                f"no split of {rect} reproduces its winding number {count}",
                context={"rect": list(rect), "count": count})
        for half, part in zip(halves, counts):
            self._isolate(chi, half, part, depth + 1, out)

    def _residual(self, chi, z) -> float:
        return float(abs(chi(np.array([z]))[0]))

    def _search(self, chi: CharacteristicFunction, re_min: float, re_max: float,
                im_max: float) -> Tuple[List[CharacteristicRoot], Dict[str, Any]]:
        if not re_min < re_max:
            raise DomainError(f"empty real range [{re_min}, {re_max}]")
        if not im_max > 0:
            raise DomainError(f"im_max must be positive, got {im_max}")
        floor = -EXPONENT_CAP / chi.delay
        if re_min < floor:
            self.logger.warning(f"Raising re_min from {re_min} to {floor} to keep e^(-lambda tau) finite")
            re_min = floor
        below = min(0.0173, 0.01 * im_max)
        upper, searched = self._winding_jittered(chi, (re_min, re_max, -below, im_max))
        found: List[Tuple[complex, int]] = []
        self._isolate(chi, searched, upper, 0, found)

        roots: List[CharacteristicRoot] = []
        for z, multiplicity in found:
            if abs(z.imag) <= 1e-9 * max(1.0, abs(z)):
                real = self._newton(chi, complex(z.real, 0.0), multiplicity, keep_real=True)
                z = complex(real.real if real is not None else z.real, 0.0)
                roots.append(CharacteristicRoot(z, multiplicity, self._residual(chi, z)))
            elif z.imag > 0:
                roots.append(CharacteristicRoot(z, multiplicity, self._residual(chi, z)))
                zc = z.conjugate()
                roots.append(CharacteristicRoot(zc, multiplicity, self._residual(chi, zc)))
            # roots just below the axis are the conjugates of roots found above it

        full = (searched[0], searched[1], -searched[3], searched[3])
        total = self.winding_number(chi, full)
        enumerated = sum(root.multiplicity for root in roots)
        if total != enumerated:
            raise IncompleteEnumerationError(
                f"winding number {total} over {full} but {enumerated} roots enumerated",
                context={"region": list(full), "winding": total, "enumerated": enumerated})
        bad = [root for root in roots if not root.residual < self.root_tolerance]
        if bad:
            raise IncompleteEnumerationError(f"root {bad[0].value} has residual {bad[0].residual:.3e}")
        roots.sort(key=lambda root: (-root.re, -root.im))
        info = {"region": [float(v) for v in full], "winding": int(total)}
        return roots, info

    def char_roots(self, chi: CharacteristicFunction, re_min: float, re_max: float,
                   im_max: float) -> List[CharacteristicRoot]:
        """
        All roots in [re_min, re_max] x [-im_max, im_max].

        The upper half (plus a thin strip below the real axis) is searched by
        recursive subdivision; conjugates complete the set and the total is
        checked against the winding number of the full region.

        Args:
            chi: Characteristic function
            re_min: Left edge
            re_max: Right edge
            im_max: Imaginary extent

        Returns:
            Roots sorted by decreasing real part
        """
        roots, info = self._search(chi, re_min, re_max, im_max)
        self.logger.info(f"Found {len(roots)} characteristic roots in {info['region']} "
                         f"(winding {info['winding']})")
        return roots

    def default_window(self, chi: CharacteristicFunction) -> Dict[str, float]:
        a_norm, b_norm = chi.matrix_norms()
        return {
            "re_min": min(-10.0, -5.0 * (a_norm + b_norm)),
            # any root with Re >= 0 has |lambda| <= ||A|| + ||B||
            "re_max": max(1.0, a_norm + b_norm + 0.5),
            "im_max": max(20.0, 4.0 * math.pi / chi.delay),
        }

    def _merge(self, roots, extra):
        merged = list(roots)
        for root in extra:
            if all(abs(root.value - other.value) > 1e-8 * max(1.0, abs(root.value)) for other in merged):
                merged.append(root)
        merged.sort(key=lambda root: (-root.re, -root.im))
        return merged

    def enumerate_roots(self, chi: CharacteristicFunction, window: Optional[Dict[str, float]] = None,
                        floor: Optional[float] = None) -> Tuple[List[CharacteristicRoot], Dict[str, Any]]:
        """
        Roots in the default window, made complete for Re lambda >= floor.

        A root with Re lambda >= rho satisfies |lambda| <= ||A|| + ||B|| e^{-rho tau};
        when that bound exceeds the window height the strip above it is searched
        as well.

        Args:
            chi: Characteristic function
            window: Optional explicit window (re_min, re_max, im_max)
            floor: Real part down to which completeness is certified; defaults
                to the rightmost root found

        Returns:
            (roots sorted by decreasing real part, certificate)
        """
        window = dict(window or self.default_window(chi))
        for attempt in range(self.window_enlargements + 1):
            roots, info = self._search(chi, window["re_min"], window["re_max"], window["im_max"])
            if not roots:
                self.logger.warning(f"No roots in {window}; extending the window to the left")
                window["re_min"] *= 2.0
                continue
            margin = 0.02 * (window["re_max"] - window["re_min"])
            if roots[0].re > window["re_max"] - margin:
                self.logger.warning(f"Rightmost root {roots[0].value} near the right edge; enlarging window")
                window["re_max"] = 2.0 * window["re_max"] + 1.0
                continue
            break
        else:
            raise WindowTooSmallError(f"root search window {window} still too small after "
                                      f"{self.window_enlargements} enlargements", suggested=window)

        target = roots[0].re if floor is None else float(floor)
        a_norm, b_norm = chi.matrix_norms()
        im_bound = a_norm + b_norm * math.exp(min(-target * chi.delay, EXPONENT_CAP))
        certificate = {"window": window, "search": info, "floor": target, "im_bound": im_bound,
                       "strip": None}
        if im_bound > window["im_max"]:
            if im_bound > self.max_im_extent:
                suggested = dict(window, im_max=im_bound)
                raise WindowTooSmallError(
                    f"roots right of {target} may reach |Im| = {im_bound:.4g}, beyond {self.max_im_extent}",
                    suggested=suggested)
            pad = 0.01 * (1.0 + abs(target))
            strip_roots, strip_info = self._search(chi, target - pad, window["re_max"], im_bound * 1.01)
            roots = self._merge(roots, [root for root in strip_roots if root.re >= target - pad])
            certificate["strip"] = strip_info
        return roots, certificate

    def rightmost_root(self, chi: CharacteristicFunction,
                       window: Optional[Dict[str, float]] = None) -> CharacteristicRoot:
        """
        The root with maximal real part, with a record of the searched regions.

        Args:
            chi: Characteristic function
            window: Optional explicit window

        Returns:
            CharacteristicRoot carrying a ``certificate`` dict
        """
        roots, certificate = self.enumerate_roots(chi, window)
        best = max(roots, key=lambda root: (root.re, root.im))
        best.certificate = certificate
        self.logger.info(f"Rightmost root {best.value:.12g}")
        return best

    # ------------------------------------------------------------------
    # decomposition
    # ------------------------------------------------------------------

    def _group_real_parts(self, roots: Sequence[CharacteristicRoot]) -> List[List[CharacteristicRoot]]:
        groups: List[List[CharacteristicRoot]] = []
        for root in sorted(roots, key=lambda r: (-r.re, -r.im)):
            if groups:
                anchor = groups[-1][0].re
                if abs(root.re - anchor) <= self.realpart_tolerance * max(1.0, abs(anchor)):
                    groups[-1].append(root)
                    continue
            groups.append([root])
        return groups

    def _eigen_mode(self, chi, root, nodes, weights) -> EigenMode:
        lam = root.value
        U, S, Vh = linalg.svd(chi.matrix(lam))
        tol = 1e-7 * max(1.0, S[0])
        null_dim = int(np.sum(S <= tol))
        if null_dim != root.multiplicity:
            raise DecompositionError(
                f"root {lam:.10g} has multiplicity {root.multiplicity} but a "
                f"{null_dim}-dimensional null space (defective)",
                context={"root": [lam.real, lam.imag]})
        right = Vh[-null_dim:].conj().T
        left = U[:, -null_dim:].conj().T
        gram = left @ chi.derivative_matrix(lam) @ right
        if np.linalg.cond(gram) > 1e12:
            raise DecompositionError(f"pairing at root {lam:.10g} is singular")
        kernel = np.exp(-lam * (nodes + chi.delay)) * weights
        return EigenMode(lam, null_dim, right, left, np.linalg.inv(gram), kernel)

    def decompose(self, chi: CharacteristicFunction, m: int,
                  roots: Optional[Sequence[CharacteristicRoot]] = None) -> SpectralDecomposition:
        """
        Spectral decomposition of the phase space by the cut rho_m.

        Args:
            chi: Characteristic function
            m: Cut index (number of leading distinct real parts)
            roots: Optional pre-computed roots; enumerated when omitted

        Returns:
            SpectralDecomposition with the projection onto the leading k_m eigenfunctions
        """
        if m < 1:
            raise CutIndexError(f"cut index must be >= 1, got {m}")
        if roots is None:
            roots, _ = self.enumerate_roots(chi)
            groups = self._group_real_parts(roots)
            if m <= len(groups):
                roots, _ = self.enumerate_roots(chi, floor=groups[m - 1][0].re)
        roots = list(roots)
        groups = self._group_real_parts(roots)
        if m > len(groups):
            raise CutIndexError(f"cut index {m} exceeds the {len(groups)} distinct real parts enumerated",
                                context={"available": len(groups)})

        x, w = leggauss(self.quadrature_size)
        nodes = chi.delay * (x - 1.0) / 2.0
        weights = w * chi.delay / 2.0

        leading = [root for group in groups[:m] for root in group]
        modes = [self._eigen_mode(chi, root, nodes, weights) for root in leading]
        rhos = [float(np.mean([root.re for root in group])) for group in groups[:m]]
        multiplicities = [sum(root.multiplicity for root in group) for group in groups[:m]]
        k_m = sum(multiplicities)
        rho_next = float(groups[m][0].re) if m < len(groups) else None
        decomp = SpectralDecomposition(chi, roots, leading, rhos, multiplicities, m, k_m, modes,
                                       nodes, self.quadrature_size, rho_next)

        # rank of the projected basis, sampled at the quadrature nodes and theta = 0
        theta = np.concatenate([[0.0], nodes])
        columns = []
        for mode in modes:
            for j in range(mode.multiplicity):
                columns.append((np.exp(mode.value * theta)[:, None] * mode.right[:, j]).reshape(-1))
        rank = np.linalg.matrix_rank(np.array(columns).T, tol=1e-9)
        if rank != k_m:
            raise DecompositionError(f"projected basis has rank {rank}, expected k_m = {k_m}")
        self.logger.info(f"Decomposition with m = {m}: rhos = {rhos}, k_m = {k_m}")
        return decomp

    # ------------------------------------------------------------------
    # dichotomy constants
    # ------------------------------------------------------------------

    def default_decay_grid(self, delay: float) -> List[float]:
        """Decay sampling times on [1, 1 + 10 r] in time-1 units."""
        return [float(t) for t in np.linspace(1.0, 1.0 + 10.0 * delay, 41)]

    def estimate_decay_constants(self, chi: CharacteristicFunction, decomp: SpectralDecomposition,
                                 sample_count: Optional[int] = None,
                                 t_grid: Optional[Sequence[float]] = None, seed: int = 0,
                                 h: Optional[float] = None,
                                 gamma_fraction: Optional[float] = None) -> DecayConstants:
        """
        Sampled dichotomy constants of the linear semigroup S(t).

        gamma is a fraction of -rho_1. K0 is the largest ||S(t)phi|| e^{gamma t} / ||phi||
        over the samples and t_grid. K is the largest ||S(t)(I-P)phi|| e^{-rho_m t} over
        {0} and t_grid, relative to min(||phi||, ||(I-P)phi||). Both carry the
        safety factor.

        Args:
            chi: Characteristic function
            decomp: Decomposition supplying P and rho_m
            sample_count: Number of random smooth histories
            t_grid: Positive sampling times for K0; defaults to [1, 1 + 10 r]
            seed: Random seed
            h: Integration step (must divide tau)
            gamma_fraction: Override of the configured fraction

        Returns:
            DecayConstants, also stored on ``decomp``
        """
        rho_1 = decomp.rho_1
        if rho_1 >= 0:
            raise StabilityError(f"rho_1 = {rho_1:.6g} >= 0: the linear semigroup does not decay",
                                 context={"rho_1": rho_1})
        fraction = self.gamma_fraction if gamma_fraction is None else float(gamma_fraction)
        gamma = fraction * (-rho_1)
        count = self.decay_sample_count if sample_count is None else int(sample_count)
        times = sorted({float(t) for t in (t_grid if t_grid is not None else self.default_decay_grid(chi.delay))})
        if not times or times[0] <= 0:
            raise DomainError("decay sampling times must be positive")
        h = float(h if h is not None else self.dde.default_h)
        rng = np.random.default_rng(seed)
        tau = chi.delay
        n = chi.dimension
        model = chi.linear_model()

        samples = probe_segments(tau, h, n, norm_kind=chi.norm, norm_scale=chi.norm_scale)
        grid = HistorySegment.uniform_grid(tau, h)
        for index in range(len(decomp.modes)):
            samples.append(decomp.eigenfunction(index, grid=grid))
        samples.extend(random_smooth_segments(rng, tau, h, n, count, norm_kind=chi.norm,
                                              norm_scale=chi.norm_scale))

        rate = np.exp(gamma * np.array(times))
        K0 = 0.0
        for phi, evolved in zip(samples, self.dde.evolve_segments(model, samples, times, h)):
            norm = phi.norm()
            K0 = max(K0, max(seg.norm() * g / norm for seg, g in zip(evolved, rate)))

        complements, denominators = [], []
        for phi in samples:
            rest = decomp.complement(phi)
            rest_norm = rest.norm()
            if rest_norm > 1e-9 * phi.norm():
                complements.append(rest)
                denominators.append(min(phi.norm(), rest_norm))
        stable_times = [0.0] + times
        stable_rate = np.exp(-decomp.rho_m * np.array(stable_times))
        K = 1.0
        for denom, evolved in zip(denominators,
                                  self.dde.evolve_segments(model, complements, stable_times, h)):
            K = max(K, max(seg.norm() * g / denom for seg, g in zip(evolved, stable_rate)))

        constants = DecayConstants(self.safety_factor * K, self.safety_factor * K0, gamma, times,
                                   len(samples), seed, self.safety_factor)
        decomp.K, decomp.K0, decomp.gamma = constants.K, constants.K0, constants.gamma
        decomp.safety_factor = self.safety_factor
        decomp.decay_provenance = {"K": "sampled-estimate", "K0": "sampled-estimate",
                                   "gamma": "analytic", "seed": seed, "samples": len(samples)}
        self.logger.info(f"Decay constants: K = {constants.K:.6g}, K0 = {constants.K0:.6g}, "
                         f"gamma = {gamma:.6g} from {len(samples)} samples")
        return constants

    # ------------------------------------------------------------------
    # generator discretization
    # ------------------------------------------------------------------

    @staticmethod
    def chebyshev_differentiation(N: int) -> Tuple[np.ndarray, np.ndarray]:
        """Chebyshev points cos(pi j / N) and the differentiation matrix on [-1, 1]."""
        x = np.cos(np.pi * np.arange(N + 1) / N)
        c = np.hstack([2.0, np.ones(N - 1), 2.0]) * (-1.0) ** np.arange(N + 1)
        X = np.tile(x, (N + 1, 1)).T
        dX = X - X.T
        D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
        D = D - np.diag(D.sum(axis=1))
        return x, D

    def generator_eigenvalues(self, chi: CharacteristicFunction,
                              n_nodes: Optional[int] = None) -> GeneratorSpectrum:
        """
        Eigenvalues of the collocated generator phi -> phi' with
        phi'(0) = A phi(0) + B phi(-tau).

        Args:
            chi: Characteristic function
            n_nodes: Chebyshev degree

        Returns:
            GeneratorSpectrum sorted by decreasing real part
        """
        N = int(n_nodes or self.generator_nodes)
        n = chi.dimension
        x, D = self.chebyshev_differentiation(N)
        theta = chi.delay * (x - 1.0) / 2.0
        generator = np.kron(D * (2.0 / chi.delay), np.eye(n))
        generator[:n, :] = 0.0
        generator[:n, :n] = chi.effective_matrix
        generator[:n, N * n:] = chi.delay_matrix
        values, left, right = linalg.eig(generator, left=True, right=True)
        order = np.lexsort((-values.imag, -values.real))
        return GeneratorSpectrum(theta, values[order], right[:, order], left[:, order], n)
