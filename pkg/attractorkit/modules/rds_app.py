#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Reaction-diffusion application for AttractorKit.

The retarded reaction-diffusion equation

    u_t = u_xx - a u(t, x) - b u(t - r, x) + f(u(t - r, x)),  x in (0, pi),

with Dirichlet boundary conditions is reduced to a delay system for its sine
coefficients. Each sine mode k has its own characteristic function
lambda + k^2 + a + b e^{-lambda r}, so the root analysis runs mode by mode and
the global ordering is assembled from the per-mode lists.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import sparse

from attractorkit.errors import (
    BMinusAHypothesisError,
    ConfigError,
    CutIndexError,
    DegenerateDissipativityError,
    DomainError,
    InfeasibleAlphaError,
    NoAbsorptionError,
    StabilityError,
)
from attractorkit.modules.base import BaseModule
from attractorkit.modules.bounds import AbsorbingSet, BoundsModule, DimensionBoundReport, VerificationReport
from attractorkit.modules.dde_core import (
    BuiltinNonlinearity,
    DdeCoreModule,
    DelayModel,
    HistorySegment,
    Nonlinearity,
    random_smooth_segments,
    state_norm,
)
from attractorkit.modules.spectral import (
    CharacteristicFunction,
    CharacteristicRoot,
    SpectralDecomposition,
    SpectralModule,
)
from attractorkit.utils.parallel import parallel_map

# L2(0, pi) norm of sum c_k sin(kx) is this factor times |c|
PARSEVAL_SCALE = math.sqrt(math.pi / 2.0)


@dataclass
class RdModel:
    """Coefficients, delay and nonlinearity of the retarded reaction-diffusion equation"""

    a: float
    b: float
    r: float
    nonlinearity: BuiltinNonlinearity = field(default_factory=BuiltinNonlinearity)
    lipschitz: float = 0.0
    c1: Optional[float] = None
    n_modes: int = 16
    label: str = ""

    def __post_init__(self):
        self.a, self.b, self.r = float(self.a), float(self.b), float(self.r)
        if not self.a > 0:
            raise ConfigError(f"a must be positive, got {self.a}", field_path="a")
        if self.b < 0:
            raise ConfigError(f"b must be non-negative, got {self.b}", field_path="b")
        if not self.r > 0:
            raise ConfigError(f"delay r must be positive, got {self.r}", field_path="r")
        self.n_modes = int(self.n_modes)
        if self.n_modes < 1:
            raise ConfigError("n_modes must be a positive integer", field_path="n_modes")
        if np.ndim(self.nonlinearity.offset) != 0:
            raise ConfigError("reaction-diffusion nonlinearities act on scalars; offset must be a scalar",
                              field_path="nonlinearity.params.offset")
        self.lipschitz = float(self.lipschitz)
        bound = self.nonlinearity.lipschitz_bound()
        if self.lipschitz < bound * (1 - 1e-12):
            raise ConfigError(f"declared lipschitz constant {self.lipschitz} is below the "
                              f"nonlinearity's global bound {bound}", field_path="lipschitz")
        zero = np.zeros((1, 1))
        c1 = math.sqrt(math.pi) * abs(float(self.nonlinearity(zero, zero)[0, 0]))
        if self.c1 is None:
            self.c1 = c1
        elif abs(float(self.c1) - c1) > 1e-9 * max(1.0, c1):
            raise ConfigError(f"declared c1 = {self.c1} but ||f(0)||_L2 = {c1}", field_path="c1")
        else:
            self.c1 = float(self.c1)

    @property
    def stability_hypothesis(self) -> bool:
        """a > 0, b > 0 and b - a < 1."""
        return self.a > 0 and self.b > 0 and self.b - self.a < 1

    def describe(self) -> Dict[str, Any]:
        return {"kind": "rrd", "label": self.label, "a": self.a, "b": self.b, "r": self.r,
                "nonlinearity": self.nonlinearity.describe(), "lipschitz": self.lipschitz,
                "c1": self.c1, "n_modes": self.n_modes}


class GalerkinNonlinearity(Nonlinearity):
    """
    Sine coefficients of f(u), u = sum c_k sin(kx), by quadrature at
    x_j = j pi / (M + 1), j = 1..M.

    The discrete sine basis is orthogonal on these nodes, so the map keeps the
    pointwise Lipschitz constant in the scaled Euclidean norm.
    """

    name = "galerkin"

    def __init__(self, base: BuiltinNonlinearity, n_modes: int, quadrature_points: int):
        if quadrature_points < n_modes:
            raise DomainError("quadrature needs at least as many points as modes")
        self.base = base
        self.n_modes = n_modes
        self.quadrature_points = quadrature_points
        self.nodes = np.pi * np.arange(1, quadrature_points + 1) / (quadrature_points + 1)
        self.basis = np.sin(np.outer(self.nodes, np.arange(1, n_modes + 1)))
        self.analysis_weight = 2.0 / (quadrature_points + 1)

    def synthesize(self, coefficients: np.ndarray) -> np.ndarray:
        return np.atleast_2d(coefficients) @ self.basis.T

    def analyze(self, values: np.ndarray) -> np.ndarray:
        return self.analysis_weight * (np.atleast_2d(values) @ self.basis)

    def __call__(self, current: np.ndarray, delayed: np.ndarray) -> np.ndarray:
        return self.analyze(self.base(self.synthesize(current), self.synthesize(delayed)))

    def lipschitz_bound(self) -> float:
        return self.base.lipschitz_bound()

    @property
    def is_zero(self) -> bool:
        return self.base.is_zero

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "base": self.base.describe(), "n_modes": self.n_modes,
                "quadrature_points": self.quadrature_points}


@dataclass
class ModeSpectrum:
    """Per-mode characteristic roots and the global ordering of their real parts"""

    per_mode: Dict[int, List[CharacteristicRoot]]
    rhos: List[float]
    multiplicities: List[int]
    cut_index: int
    stability: Dict[str, Any]
    truncation: Dict[str, Any]

    @property
    def rho_1(self) -> float:
        return self.rhos[0]

    @property
    def rho_m(self) -> float:
        return self.rhos[self.cut_index - 1]

    @property
    def k_m(self) -> int:
        return sum(self.multiplicities[:self.cut_index])

    @property
    def roots(self) -> List[CharacteristicRoot]:
        merged = [root for roots in self.per_mode.values() for root in roots]
        merged.sort(key=lambda root: (-root.re, -root.im))
        return merged

    def root_table(self) -> List[Dict[str, Any]]:
        rows = []
        for k in sorted(self.per_mode):
            for root in self.per_mode[k]:
                row = root.to_dict()
                row["mode"] = k
                rows.append(row)
        rows.sort(key=lambda row: (-row["re"], -row["im"], row["mode"]))
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rho_1": self.rho_1,
            "rho_m": self.rho_m,
            "rhos": [float(r) for r in self.rhos],
            "multiplicities": [int(k) for k in self.multiplicities],
            "cut_index": self.cut_index,
            "k_m": self.k_m,
            "n_modes": len(self.per_mode),
            "stability": dict(self.stability),
            "truncation": dict(self.truncation),
            "roots": self.root_table(),
        }


class RdsAppModule(BaseModule):
    """Module running the certification pipeline on the reaction-diffusion equation"""

    section = "rds"

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the reaction-diffusion application.

        Args:
            config: Configuration dictionary
        """
        super().__init__(config)
        self.default_modes = int(self.setting("n_modes", 16))
        self.quadrature_factor = int(self.setting("quadrature_factor", 4))
        self.fd_points = int(self.setting("fd_points", 400))
        self.fd_stability = float(self.setting("fd_stability", 2.5))
        self.dissipativity_slack = float(self.setting("dissipativity_slack", 0.05))
        self.gamma_excess = float(self.setting("gamma_excess", 0.1))
        self.threads = int(config.get("threads", 1) or 1)
        self.dde = DdeCoreModule(config)
        self.spectral = SpectralModule(config)
        self.bounds = BoundsModule(config)
        self.logger.info("Reaction-diffusion module initialized")

    # ------------------------------------------------------------------
    # reduction
    # ------------------------------------------------------------------

    def galerkin_reduce(self, model: RdModel) -> DelayModel:
        """
        Sine-Galerkin reduction to an N-dimensional delay system.

        Args:
            model: Reaction-diffusion model

        Returns:
            DelayModel with A = diag(-k^2 - a), delay matrix -b I and the
            quadrature transform of f; its norm is the L2 norm of the field
        """
        N = model.n_modes
        k = np.arange(1, N + 1, dtype=float)
        nonlinearity = GalerkinNonlinearity(model.nonlinearity, N, self.quadrature_factor * N)
        reduced = DelayModel(N, np.diag(-k ** 2 - model.a), -model.b, model.r, nonlinearity,
                             model.lipschitz, None, "euclidean", PARSEVAL_SCALE, "rrd",
                             f"{model.label} (Galerkin, {N} modes)".strip())
        self.logger.info(f"Galerkin reduction with {N} modes and {nonlinearity.quadrature_points} "
                         f"quadrature points")
        return reduced

    def field_values(self, reduced: DelayModel, coefficients: np.ndarray, x: np.ndarray) -> np.ndarray:
        """u(x) = sum c_k sin(kx) at arbitrary points, one row per coefficient vector."""
        k = np.arange(1, reduced.dimension + 1)
        return np.atleast_2d(coefficients) @ np.sin(np.outer(x, k)).T

    def field_history(self, reduced: DelayModel, profile: Callable[[np.ndarray], np.ndarray],
                      h: Optional[float] = None) -> HistorySegment:
        """Constant-in-time history whose field is the given profile u0(x)."""
        h = float(h if h is not None else self.dde.default_h)
        galerkin = reduced.nonlinearity
        coefficients = galerkin.analyze(np.asarray(profile(galerkin.nodes), dtype=float))[0]
        return HistorySegment.constant(coefficients, reduced.delay, h, reduced.norm, reduced.norm_scale)

    def finite_difference_model(self, model: RdModel,
                                n_points: Optional[int] = None) -> Tuple[DelayModel, np.ndarray]:
        """
        Method-of-lines model on n interior points of (0, pi).

        Args:
            model: Reaction-diffusion model
            n_points: Interior grid points

        Returns:
            (DelayModel with a sparse Laplacian, interior grid)
        """
        n = int(n_points or self.fd_points)
        dx = math.pi / (n + 1)
        x = dx * np.arange(1, n + 1)
        laplacian = sparse.diags([np.ones(n - 1), -2.0 * np.ones(n), np.ones(n - 1)], [-1, 0, 1]) / dx ** 2
        A = (laplacian - model.a * sparse.identity(n)).tocsr()
        fd = DelayModel(n, A, -model.b, model.r, model.nonlinearity, model.lipschitz, None,
                        "euclidean", math.sqrt(dx), "rrd", f"{model.label} (finite differences, {n} points)")
        return fd, x

    def finite_difference_step(self, fd: DelayModel) -> float:
        """Largest step dividing r that keeps RK4 inside its stability region."""
        n = fd.dimension
        dx = math.pi / (n + 1)
        spectral_radius = 4.0 / dx ** 2 + abs(fd.instantaneous_matrix[0, 0] + 2.0 / dx ** 2) + abs(fd.delay_coefficient)
        steps = math.ceil(fd.delay * spectral_radius / self.fd_stability)
        return fd.delay / steps

    # ------------------------------------------------------------------
    # spectrum
    # ------------------------------------------------------------------

    def _mode_roots(self, model: RdModel, k: int, floor: Optional[float] = None) -> List[CharacteristicRoot]:
        chi = CharacteristicFunction.reaction_diffusion_mode(model.a, model.b, model.r, k)
        window = self.spectral.default_window(chi)
        if floor is not None:
            window["re_min"] = min(window["re_min"], floor - 1.0 - 0.1 * abs(floor))
        roots, _ = self.spectral.enumerate_roots(chi, window, floor)
        return roots

    @staticmethod
    def _may_reach(model: RdModel, k: int, level: float) -> bool:
        """Whether mode k can have a root with real part >= level."""
        return -k * k - model.a + model.b * math.exp(-level * model.r) >= level

    def _stability_certificate(self, model: RdModel) -> Dict[str, Any]:
        """Winding counts in Re lambda >= 0 up to the tail, then the tail inequality."""
        last = max(model.n_modes, int(math.floor(math.sqrt(model.a + model.b))))
        windings = {}
        for k in range(1, last + 1):
            chi = CharacteristicFunction.reaction_diffusion_mode(model.a, model.b, model.r, k)
            R = k * k + model.a + model.b + 1.0
            windings[k], _ = self.spectral._winding_jittered(chi, (0.0, R, -R, R))
        tail_from = last + 1
        tail_ok = -tail_from ** 2 + abs(model.a) + abs(model.b) < 0
        return {
            "hypothesis": model.stability_hypothesis,
            "windings": windings,
            "tail_from_mode": tail_from,
            "tail_inequality": tail_ok,
            "certified": tail_ok and all(w == 0 for w in windings.values()),
        }

    def mode_spectrum(self, model: RdModel, m: int = 1) -> ModeSpectrum:
        """
        Per-mode roots of lambda + k^2 + a + b e^{-lambda r} and the global ordering.

        Under a > 0, b > 0, b - a < 1 the global rho_1 must be negative; a
        contradiction raises. The stability flag is withheld otherwise.

        Args:
            model: Reaction-diffusion model
            m: Number of leading distinct real parts to certify

        Returns:
            ModeSpectrum
        """
        if m < 1:
            raise CutIndexError(f"cut index must be >= 1, got {m}")
        modes = list(range(1, model.n_modes + 1))
        found = parallel_map(lambda k: self._mode_roots(model, k), modes, self.threads)
        per_mode = dict(zip(modes, found))

        groups = self.spectral._group_real_parts([root for roots in found for root in roots])
        floor = groups[min(m, len(groups)) - 1][0].re
        refine = [k for k in modes if self._may_reach(model, k, floor)]
        refined = parallel_map(lambda k: self._mode_roots(model, k, floor), refine, self.threads)
        per_mode.update(zip(refine, refined))

        merged = [root for roots in per_mode.values() for root in roots]
        groups = self.spectral._group_real_parts(merged)
        if m > len(groups):
            raise CutIndexError(f"cut index {m} exceeds the {len(groups)} distinct real parts found",
                                context={"available": len(groups)})
        rhos = [float(np.mean([root.re for root in group])) for group in groups]
        multiplicities = [sum(root.multiplicity for root in group) for group in groups]

        stability = self._stability_certificate(model)
        stability["claimed"] = stability["hypothesis"]
        stability["rho_1_negative"] = rhos[0] < 0
        if stability["hypothesis"] and rhos[0] >= 0:
            raise StabilityError(f"a > 0, b > 0, b - a < 1 but the global rho_1 = {rhos[0]:.6g} >= 0",
                                 context={"rho_1": rhos[0]})
        if not stability["hypothesis"]:
            self.logger.warning(f"b - a = {model.b - model.a:.6g} or signs of a, b outside the stable "
                                f"regime; stability flag withheld")

        rho_m = rhos[m - 1]
        next_bound = -(model.n_modes + 1) ** 2 - model.a + model.b * math.exp(-rho_m * model.r)
        truncation = {"n_modes": model.n_modes, "next_mode_bound": next_bound,
                      "sound": next_bound < rho_m}
        if not truncation["sound"]:
            self.logger.warning(f"mode {model.n_modes + 1} may carry roots right of rho_m = {rho_m:.6g}; "
                                f"increase n_modes")
        spectrum = ModeSpectrum(per_mode, rhos, multiplicities, m, stability, truncation)
        self.logger.info(f"Mode spectrum: rho_1 = {rhos[0]:.6g}, rho_m = {rho_m:.6g}, k_m = {spectrum.k_m}")
        return spectrum

    # ------------------------------------------------------------------
    # dissipativity
    # ------------------------------------------------------------------

    def dissipativity_check(self, model: RdModel, phi: HistorySegment, gamma: float, horizon: float,
                            h: Optional[float] = None) -> VerificationReport:
        """
        Simulated ||u_t|| against c1 e^{gr}/(a - L e^{gr})
        + e^{gr}(||phi|| - c1/(a - L e^{gr})) e^{(L e^{gr} - a) t}.

        The conditions gamma > a and a > L e^{gamma r} are reported separately.

        Args:
            model: Reaction-diffusion model
            phi: History of the Galerkin coefficients
            gamma: Exponent of the estimate
            horizon: Final time
            h: Integration step

        Returns:
            VerificationReport with one row per sampled time
        """
        reduced = self.galerkin_reduce(model)
        growth = model.lipschitz * math.exp(gamma * model.r)
        margin = model.a - growth
        if abs(margin) <= 1e-12 * max(1.0, model.a):
            raise DegenerateDissipativityError(f"a = L_f e^(gamma r) = {growth:.6g}: the estimate is undefined",
                                               context={"gamma": gamma})
        phi = HistorySegment(phi.delay_span, phi.grid, phi.values, phi.interpolation_order, phi.derivatives,
                             phi.left_derivatives, reduced.norm, reduced.norm_scale)
        traj = self.dde.integrate(reduced, phi, horizon, h)
        pointwise = state_norm(traj.states, reduced.norm, reduced.norm_scale)
        norms = sliding_window_view(pointwise, traj.history_points).max(axis=1)
        t = traj.times[traj.history_points - 1:]
        e_gr = math.exp(gamma * model.r)
        level = model.c1 / margin
        bound = model.c1 * e_gr / margin + e_gr * (phi.norm() - level) * np.exp(-margin * t)
        ok = norms <= bound * (1.0 + self.dissipativity_slack) + 1e-12

        stride = max(1, len(t) // 200)
        keep = sorted(set(range(0, len(t), stride)) | {len(t) - 1} | set(np.nonzero(~ok)[0][:20].tolist()))
        rows = [{"t": float(t[i]), "norm": float(norms[i]), "bound": float(bound[i]), "ok": bool(ok[i])}
                for i in keep]
        summary = {"gamma": gamma, "gamma_exceeds_a": gamma > model.a, "attractor_condition": margin > 0,
                   "steps_checked": int(len(t)), "violations": int((~ok).sum()), "n_modes": model.n_modes}
        report = VerificationReport("dissipativity", rows, bool(ok.all()), self.dissipativity_slack, 0, summary)
        self.logger.info(f"Dissipativity check: {summary['violations']} violations over {len(t)} steps")
        return report

    # ------------------------------------------------------------------
    # dimension bound
    # ------------------------------------------------------------------

    def decomposition(self, model: RdModel, m: int = 1, spectrum: Optional[ModeSpectrum] = None,
                      seed: int = 0, t_grid: Optional[Sequence[float]] = None,
                      h: Optional[float] = None, gamma_fraction: Optional[float] = None
                      ) -> Tuple[SpectralDecomposition, ModeSpectrum]:
        """Decomposition of the reduced linear semigroup with sampled K, K0 and gamma."""
        if model.b - model.a >= 1:
            raise BMinusAHypothesisError(f"b - a = {model.b - model.a:.6g} violates b - a < 1",
                                         context={"a": model.a, "b": model.b})
        spectrum = spectrum or self.mode_spectrum(model, m)
        if spectrum.rho_1 >= 0:
            raise StabilityError(f"the global rho_1 = {spectrum.rho_1:.6g} is not negative",
                                 context={"rho_1": spectrum.rho_1})
        reduced = self.galerkin_reduce(model)
        chi = CharacteristicFunction.from_model(reduced)
        decomp = self.spectral.decompose(chi, m, roots=spectrum.roots)
        self.spectral.estimate_decay_constants(chi, decomp, t_grid=t_grid, seed=seed, h=h,
                                               gamma_fraction=gamma_fraction)
        return decomp, spectrum

    def rd_dimension_bound(self, model: RdModel, m: int = 1, alpha: Optional[float] = None,
                           seed: int = 0, t_grid: Optional[Sequence[float]] = None,
                           h: Optional[float] = None,
                           precomputed: Optional[Tuple[SpectralDecomposition, ModeSpectrum]] = None
                           ) -> DimensionBoundReport:
        """
        Fractal-dimension bound for the reaction-diffusion attractor.

        lambda0 = L_f + rho_1 carries no K0-type prefactor; the report says so.

        Args:
            model: Reaction-diffusion model
            m: Cut index
            alpha: Free parameter; optimized when omitted
            seed: Seed of the decay-constant sampling
            t_grid: Decay sampling times
            h: Integration step
            precomputed: (decomposition, spectrum) from an earlier ``decomposition`` call

        Returns:
            DimensionBoundReport, with an infinite bound when zeta >= 1
        """
        decomp, spectrum = precomputed or self.decomposition(model, m, seed=seed, t_grid=t_grid, h=h)
        L_f = model.lipschitz
        if alpha is None:
            try:
                alpha, report = self.bounds.optimize_alpha(decomp, L_f, "rrd")
            except InfeasibleAlphaError as e:
                cert = self.bounds.squeezing_certificate(decomp, L_f, 1.0, "rrd")
                report = DimensionBoundReport(math.inf, cert.Lambda, cert.M1, cert.alpha, e.min_zeta, "rrd",
                                              None, None, dict(cert.provenance))
        else:
            cert = self.bounds.squeezing_certificate(decomp, L_f, alpha, "rrd")
            if cert.admissible:
                report = self.bounds.dimension_bound(cert)
            else:
                report = DimensionBoundReport(math.inf, cert.Lambda, cert.M1, cert.alpha, cert.zeta, "rrd",
                                              None, None, dict(cert.provenance))
        report.provenance["lambda0"] = "L_f + rho_1 (no K0 prefactor)"
        report.provenance["galerkin_modes"] = str(model.n_modes)
        report.provenance["truncation_sound"] = str(spectrum.truncation["sound"])
        self.logger.info(f"Reaction-diffusion dimension bound {report.bound:.6g} "
                         f"(k_m = {decomp.k_m}, zeta = {report.zeta:.6g})")
        return report

    # ------------------------------------------------------------------
    # absorbing ball and attractor sampling
    # ------------------------------------------------------------------

    def absorbing_set(self, model: RdModel, gamma: Optional[float] = None) -> AbsorbingSet:
        """
        Ball of radius e^{gamma r} c1 / (a - L_f e^{gamma r}) + 1 around 0.

        The first term is the limit of the dissipativity estimate.
        """
        gamma = float(gamma if gamma is not None else model.a * (1.0 + self.gamma_excess))
        e_gr = math.exp(gamma * model.r)
        margin = model.a - model.lipschitz * e_gr
        if margin <= 0:
            raise NoAbsorptionError("a <= L_f e^(gamma r): no absorbing ball from the estimate",
                                    context={"gamma": gamma})
        radius = e_gr * model.c1 / margin + 1.0
        return AbsorbingSet(radius, e_gr, gamma, model.lipschitz, model.c1, True,
                            {"R_B": "dissipativity limit + 1", "K0": "e^(gamma r)"})

    def sample_attractor(self, model: RdModel, n_trajectories: int, samples_per_trajectory: int, seed: int,
                         gamma: Optional[float] = None, spacing: Optional[float] = None,
                         h: Optional[float] = None, tolerance: float = 1e-6) -> List[HistorySegment]:
        """
        Coefficient segments from long runs, taken once the transient of the
        dissipativity estimate has dropped below ``tolerance``.

        Args:
            model: Reaction-diffusion model
            n_trajectories: Number of runs
            samples_per_trajectory: Segments kept per run
            seed: Random seed for the starting segments
            gamma: Exponent of the estimate; defaults to a (1 + gamma_excess)
            spacing: Time between kept segments (default r)
            h: Integration step

        Returns:
            List of HistorySegment of the reduced model
        """
        B = self.absorbing_set(model, gamma)
        margin = model.a - model.lipschitz * B.K0
        reduced = self.galerkin_reduce(model)
        h = float(h if h is not None else self.dde.default_h)
        spacing = float(spacing if spacing is not None else model.r)
        start_radius = B.radius
        burn_in = 10.0 * model.r + math.log(B.K0 * start_radius / tolerance) / margin
        burn_in = h * math.ceil(burn_in / h)
        rng = np.random.default_rng(seed)
        starts = random_smooth_segments(rng, model.r, h, reduced.dimension, n_trajectories, start_radius,
                                        norm_kind=reduced.norm, norm_scale=reduced.norm_scale, exact_norm=True)
        times = [burn_in + j * spacing for j in range(samples_per_trajectory)]
        segments = [s for run in self.dde.evolve_segments(reduced, starts, times, h) for s in run]
        self.logger.info(f"Sampled {len(segments)} reaction-diffusion segments after burn-in {burn_in:.4g}")
        return segments
