#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Bounds module for AttractorKit.

This module turns spectral data and Lipschitz constants into absorbing-set
radii, absorption times, squeezing certificates and explicit fractal-dimension
bounds, optimizes the free parameter alpha and checks the squeezing and
absorption inequalities against simulated trajectories.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view
from scipy.optimize import minimize_scalar

from attractorkit.errors import (
    AbsorptionHypothesisError,
    DomainError,
    InadmissibleCertificateError,
    InfeasibleAlphaError,
    NoAbsorptionError,
    ResonanceError,
    SamplingError,
)
from attractorkit.modules.base import BaseModule
from attractorkit.modules.dde_core import (
    DdeCoreModule,
    DelayModel,
    HistorySegment,
    random_smooth_segments,
    state_norm,
)
from attractorkit.modules.spectral import SpectralDecomposition
from attractorkit.utils.parallel import parallel_map

APPLICATIONS = ("general", "rfde", "rrd")
FORMULAS = ("general", "rfde", "rfde_corollary", "rrd", "rrd_corollary")
LITERAL_M1 = 2.0


def absorbing_radius(K0: float, gamma: float, lipschitz: float, c1: float) -> float:
    """R_B = (1/(1-K0)) [K0 L c1 / gamma + 1/(gamma - K0 L)]."""
    return (1.0 / (1.0 - K0)) * (K0 * lipschitz * c1 / gamma + 1.0 / (gamma - K0 * lipschitz))


def zeta_value(alpha: float, M2: float, M3: float, lambda0: float, lambda1: float) -> float:
    """zeta = alpha e^{lambda0} + M2 e^{lambda1} + M3 e^{lambda0}."""
    return alpha * math.exp(lambda0) + M2 * math.exp(lambda1) + M3 * math.exp(lambda0)


def general_bound(Lambda: int, M1: float, alpha: float, zeta: float) -> float:
    """
    Lambda [ln Lambda + ln(2 + M1/alpha)] / (-ln zeta).

    The ln Lambda term is dropped at Lambda = 1.
    """
    if not 0 < zeta < 1:
        raise InadmissibleCertificateError(f"zeta = {zeta:.6g} is not in (0, 1)", context={"zeta": zeta})
    log_lambda = math.log(Lambda) if Lambda > 1 else 0.0
    return Lambda * (log_lambda + math.log(2.0 + M1 / alpha)) / (-math.log(zeta))


def corollary_bound(M1: float, alpha: float, M2: float, M3: float, lambda0: float,
                    lambda1: float) -> float:
    """ln(2 + M1/alpha) / (-ln[(alpha + M3) e^{lambda0} + M2 e^{lambda1}]) for a single leading root."""
    zeta = (alpha + M3) * math.exp(lambda0) + M2 * math.exp(lambda1)
    if not 0 < zeta < 1:
        raise InadmissibleCertificateError(f"zeta = {zeta:.6g} is not in (0, 1)", context={"zeta": zeta})
    return math.log(2.0 + M1 / alpha) / (-math.log(zeta))


@dataclass
class AbsorbingSet:
    radius: float
    K0: float
    gamma: float
    lipschitz: float
    c1: float
    valid: bool = True
    provenance: Dict[str, str] = field(default_factory=dict)

    def recompute(self) -> float:
        return absorbing_radius(self.K0, self.gamma, self.lipschitz, self.c1)

    def to_dict(self) -> Dict[str, Any]:
        return {"R_B": self.radius, "K0": self.K0, "gamma": self.gamma, "L_f": self.lipschitz,
                "c1": self.c1, "valid": self.valid, "provenance": dict(self.provenance)}


@dataclass
class SqueezingCertificate:
    """
    Squeezing constants: ||P w_t|| <= M1 e^{lambda0 t} ||y|| and
    ||(I-P) w_t|| <= (M2 e^{lambda1 t} + M3 e^{lambda0 t}) ||y||.

    ``M1`` is the conservative K0 + K used for pass/fail; ``M1_literal`` is 2.
    """

    Lambda: int
    M1: float
    M2: float
    M3: float
    lambda0: float
    lambda1: float
    alpha: float
    zeta: float
    admissible: bool
    application: str = "general"
    M1_literal: float = LITERAL_M1
    provenance: Dict[str, str] = field(default_factory=dict)

    def zeta_at(self, alpha: float) -> float:
        return zeta_value(alpha, self.M2, self.M3, self.lambda0, self.lambda1)

    def recompute_zeta(self) -> float:
        return self.zeta_at(self.alpha)

    def with_alpha(self, alpha: float) -> "SqueezingCertificate":
        zeta = self.zeta_at(alpha)
        return SqueezingCertificate(self.Lambda, self.M1, self.M2, self.M3, self.lambda0, self.lambda1,
                                    alpha, zeta, zeta < 1.0, self.application, self.M1_literal,
                                    dict(self.provenance))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "Lambda": self.Lambda, "M1": self.M1, "M1_literal": self.M1_literal, "M2": self.M2,
            "M3": self.M3, "lambda0": self.lambda0, "lambda1": self.lambda1, "alpha": self.alpha,
            "zeta": self.zeta, "admissible": self.admissible, "application": self.application,
            "provenance": dict(self.provenance),
        }


@dataclass
class DimensionBoundReport:
    bound: float
    Lambda: int
    M1: float
    alpha: float
    zeta: float
    formula: str
    literal_bound: Optional[float] = None
    corollary: Optional[Dict[str, float]] = None
    provenance: Dict[str, str] = field(default_factory=dict)

    @property
    def admissible(self) -> bool:
        return math.isfinite(self.bound)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bound": self.bound if math.isfinite(self.bound) else None,
            "admissible": self.admissible,
            "inputs": {"Lambda": self.Lambda, "M1": self.M1, "alpha": self.alpha, "zeta": self.zeta},
            "formula": self.formula,
            "literal_bound": self.literal_bound,
            "corollary": self.corollary,
            "provenance": dict(self.provenance),
        }


@dataclass
class VerificationReport:
    """Rows of measured quantities against their theoretical bounds"""

    name: str
    rows: List[Dict[str, Any]]
    passed: bool
    slack: float
    seed: int
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def pass_rate(self) -> float:
        if not self.rows:
            return 1.0
        return sum(1 for row in self.rows if row["ok"]) / len(self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "pass_rate": self.pass_rate,
                "slack": self.slack, "seed": self.seed, "checks": len(self.rows),
                "summary": dict(self.summary)}


class BoundsModule(BaseModule):
    """Module for absorbing sets, squeezing certificates and dimension bounds"""

    section = "bounds"

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the bounds module.

        Args:
            config: Configuration dictionary
        """
        super().__init__(config)
        self.slack = float(self.setting("slack", 0.05))
        self.alpha_grid_size = int(self.setting("alpha_grid_size", 400))
        self.alpha_rel_tol = float(self.setting("alpha_rel_tol", 1e-6))
        self.escape_resamples = int(self.setting("escape_resamples", 20))
        self.threads = int(config.get("threads", 1) or 1)
        self.dde = DdeCoreModule(config)
        self.logger.info(f"Bounds module initialized (slack {self.slack})")

    # ------------------------------------------------------------------
    # absorbing set
    # ------------------------------------------------------------------

    def absorbing_set(self, K0: float, gamma: float, L_f: float, c1: float) -> AbsorbingSet:
        """
        Absorbing ball radius from the dichotomy constants.

        Args:
            K0: Decay prefactor, must lie in (0, 1)
            gamma: Decay rate (> 0)
            L_f: Lipschitz constant
            c1: ||f(0)||

        Returns:
            AbsorbingSet
        """
        if not gamma > 0:
            raise NoAbsorptionError(f"gamma = {gamma} must be positive", context={"gamma": gamma})
        if not K0 > 0:
            raise DomainError(f"K0 = {K0} must be positive")
        if K0 >= 1:
            raise AbsorptionHypothesisError(f"K0 = {K0:.6g} >= 1: the absorbing-set radius needs K0 < 1",
                                            context={"K0": K0})
        if K0 * L_f >= gamma:
            raise NoAbsorptionError(f"K0 L_f = {K0 * L_f:.6g} >= gamma = {gamma:.6g}",
                                    context={"K0": K0, "L_f": L_f, "gamma": gamma})
        radius = absorbing_radius(K0, gamma, L_f, c1)
        self.logger.info(f"Absorbing ball radius R_B = {radius:.6g}")
        return AbsorbingSet(radius, K0, gamma, L_f, c1, K0 * L_f - gamma < 0,
                            {"R_B": "analytic", "K0": "sampled-estimate",
                             "unit_inhomogeneity": "formula as printed"})

    def absorption_time(self, B: AbsorbingSet, r_D: float) -> float:
        """
        Time after which a ball of radius r_D is inside B.

        Returns 0 when the logarithm's argument does not exceed 1.
        """
        if not r_D > 0:
            raise DomainError(f"r_D must be positive, got {r_D}")
        margin = B.gamma - B.K0 * B.lipschitz
        numerator = r_D * B.gamma * (1.0 - B.K0) * margin
        denominator = B.K0 * B.lipschitz * B.c1 * margin + B.gamma
        argument = numerator / denominator
        if argument <= 1.0:
            return 0.0
        return math.log(argument) / B.gamma

    # ------------------------------------------------------------------
    # certificates and bounds
    # ------------------------------------------------------------------

    def assemble_certificate(self, Lambda: int, M1: float, M2: float, M3: float, lambda0: float,
                             lambda1: float, alpha: float, application: str = "general",
                             provenance: Optional[Dict[str, str]] = None) -> SqueezingCertificate:
        """Certificate from raw constants."""
        if not alpha > 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        if application not in APPLICATIONS:
            raise DomainError(f"unknown application {application!r}")
        zeta = zeta_value(alpha, M2, M3, lambda0, lambda1)
        cert = SqueezingCertificate(int(Lambda), M1, M2, M3, lambda0, lambda1, alpha, zeta, zeta < 1.0,
                                    application, LITERAL_M1, dict(provenance or {}))
        if not cert.admissible:
            self.logger.warning(f"Certificate inadmissible: zeta = {zeta:.6g} >= 1 at alpha = {alpha:.6g}")
        return cert

    def squeezing_certificate(self, decomp: SpectralDecomposition, L_f: float, alpha: float,
                              application: str = "rfde") -> SqueezingCertificate:
        """
        Squeezing constants read off the decomposition and the Lipschitz constant.

        rfde: lambda0 = L_f K0 - gamma, M3 = K L_f K0 / (-gamma + L_f K0 - rho_m).
        rrd: lambda0 = L_f + rho_1, M3 = K L_f / (rho_1 + L_f - rho_m).
        In both lambda1 = rho_m and M2 = K.

        Args:
            decomp: Decomposition with estimated decay constants
            L_f: Lipschitz constant
            alpha: Free parameter (> 0)
            application: ``rfde`` or ``rrd``

        Returns:
            SqueezingCertificate, flagged inadmissible when zeta >= 1
        """
        if decomp.K is None or decomp.K0 is None or decomp.gamma is None:
            raise DomainError("decay constants must be estimated before certification")
        K, K0, gamma = decomp.K, decomp.K0, decomp.gamma
        rho_m = decomp.rho_m
        if application == "rfde":
            lambda0 = L_f * K0 - gamma
            denominator = -gamma + L_f * K0 - rho_m
            numerator = K * L_f * K0
        elif application == "rrd":
            lambda0 = L_f + decomp.rho_1
            denominator = decomp.rho_1 + L_f - rho_m
            numerator = K * L_f
        else:
            raise DomainError(f"unknown application {application!r}")
        if numerator == 0.0:
            M3 = 0.0
        elif abs(denominator) <= 1e-12 * max(1.0, abs(gamma), abs(rho_m)):
            raise ResonanceError(f"M3 denominator vanishes for cut index {decomp.cut_index}; "
                                 f"try a different m", context={"cut_index": decomp.cut_index})
        else:
            M3 = numerator / denominator
        provenance = {"K": "sampled-estimate", "K0": "sampled-estimate", "gamma": "analytic",
                      "rho_m": "analytic", "M1": "conservative (K0 + K)", "M1_literal": "unit prefactors (M1 = 2)"}
        cert = self.assemble_certificate(decomp.k_m, K0 + K, K, M3, lambda0, rho_m, alpha, application,
                                         provenance)
        self.logger.info(f"Squeezing certificate ({application}): lambda0 = {lambda0:.6g}, "
                         f"M3 = {M3:.6g}, zeta = {cert.zeta:.6g}")
        return cert

    def dimension_bound(self, cert: SqueezingCertificate, formula: Optional[str] = None) -> DimensionBoundReport:
        """
        Fractal-dimension bound of the exponential attractor.

        The general formula uses the conservative M1. For a single leading root
        the corollary form is reported beside it, and the literal M1 = 2
        variants of both are carried along.

        Args:
            cert: Admissible certificate
            formula: One of general, rfde, rfde_corollary, rrd, rrd_corollary;
                defaults to the certificate's application

        Returns:
            DimensionBoundReport
        """
        formula = formula or cert.application
        if formula not in FORMULAS:
            raise DomainError(f"unknown formula {formula!r}")
        if not cert.admissible:
            raise InadmissibleCertificateError(f"certificate is inadmissible: zeta = {cert.zeta:.6g} >= 1",
                                               context={"zeta": cert.zeta})
        corollary = None
        if cert.Lambda == 1:
            corollary = {
                "formula": f"{cert.application}_corollary",
                "bound": corollary_bound(cert.M1, cert.alpha, cert.M2, cert.M3, cert.lambda0, cert.lambda1),
                "literal_bound": corollary_bound(cert.M1_literal, cert.alpha, cert.M2, cert.M3,
                                                 cert.lambda0, cert.lambda1),
            }
        if formula.endswith("_corollary"):
            if corollary is None:
                raise DomainError(f"{formula} needs a single leading root, got Lambda = {cert.Lambda}")
            bound = corollary["bound"]
        else:
            bound = general_bound(cert.Lambda, cert.M1, cert.alpha, cert.zeta)
        literal = general_bound(cert.Lambda, cert.M1_literal, cert.alpha, cert.zeta)
        provenance = dict(cert.provenance)
        provenance["bound"] = "conservative M1"
        return DimensionBoundReport(bound, cert.Lambda, cert.M1, cert.alpha, cert.zeta, formula, literal,
                                    corollary, provenance)

    def optimize_alpha_constants(self, Lambda: int, M1: float, M2: float, M3: float, lambda0: float,
                                 lambda1: float, grid_size: Optional[int] = None) -> Tuple[float, float]:
        """
        Minimize the general bound over alpha in (0, (1 - C) e^{-lambda0}),
        C = M2 e^{lambda1} + M3 e^{lambda0}.

        Returns:
            (alpha*, bound at alpha*)
        """
        size = int(grid_size or self.alpha_grid_size)
        floor = M2 * math.exp(lambda1) + M3 * math.exp(lambda0)
        upper = (1.0 - floor) * math.exp(-lambda0) if floor < 1.0 else 0.0
        if floor >= 1.0:
            alphas = np.logspace(-8, 2, size)
            zetas = [zeta_value(a, M2, M3, lambda0, lambda1) for a in alphas]
            raise InfeasibleAlphaError(f"zeta(alpha) >= {floor:.6g} for every alpha > 0",
                                       min_zeta=float(min(zetas)))
        alphas = upper * np.logspace(-8, 0, size + 1)[:-1]

        def objective(alpha):
            if not 0 < alpha < upper:
                return math.inf
            return general_bound(Lambda, M1, alpha, zeta_value(alpha, M2, M3, lambda0, lambda1))

        values = np.array([objective(a) for a in alphas])
        best = int(np.argmin(values))
        alpha, value = float(alphas[best]), float(values[best])
        if 0 < best < len(alphas) - 1:
            result = minimize_scalar(objective, bracket=(alphas[best - 1], alphas[best], alphas[best + 1]),
                                     method="golden", tol=self.alpha_rel_tol)
        else:
            low = alphas[max(best - 1, 0)] if best > 0 else alphas[0] * 1e-2
            high = alphas[min(best + 1, len(alphas) - 1)] if best < len(alphas) - 1 else upper
            result = minimize_scalar(objective, bounds=(low, high), method="bounded",
                                     options={"xatol": self.alpha_rel_tol * low})
        if np.isfinite(result.fun) and result.fun <= value:
            alpha, value = float(result.x), float(result.fun)
        return alpha, value

    def optimize_alpha(self, decomp: SpectralDecomposition, L_f: float,
                       application: str = "rfde") -> Tuple[float, DimensionBoundReport]:
        """
        Best alpha for the decomposition's certificate.

        Args:
            decomp: Decomposition with estimated decay constants
            L_f: Lipschitz constant
            application: ``rfde`` or ``rrd``

        Returns:
            (alpha*, DimensionBoundReport at alpha*)
        """
        template = self.squeezing_certificate(decomp, L_f, 1.0, application)
        alpha, value = self.optimize_alpha_constants(template.Lambda, template.M1, template.M2, template.M3,
                                                     template.lambda0, template.lambda1)
        cert = template.with_alpha(alpha)
        report = self.dimension_bound(cert)
        self.logger.info(f"Optimal alpha = {alpha:.6g} gives dimension bound {report.bound:.6g}")
        return alpha, report

    # ------------------------------------------------------------------
    # empirical checks
    # ------------------------------------------------------------------

    @staticmethod
    def _window_norms(trajectory, model: DelayModel) -> np.ndarray:
        """||u_t|| for t = 0, h, ..., T as sliding maxima of pointwise norms."""
        pointwise = state_norm(trajectory.states, model.norm, model.norm_scale)
        return sliding_window_view(pointwise, trajectory.history_points).max(axis=1)

    def _ball_samples(self, rng, model: DelayModel, h: float, count: int, radius: float,
                      exact: bool = False) -> List[HistorySegment]:
        return random_smooth_segments(rng, model.delay, h, model.dimension, count, radius=radius,
                                      norm_kind=model.norm, norm_scale=model.norm_scale, exact_norm=exact)

    def verify_squeezing(self, model: DelayModel, decomp: SpectralDecomposition, cert: SqueezingCertificate,
                         B: AbsorbingSet, n_pairs: int, t_grid: Sequence[float], seed: int,
                         h: Optional[float] = None) -> VerificationReport:
        """
        Check both squeezing inequalities along simulated pairs in the absorbing ball.

        Args:
            model: Nonlinear delay model
            decomp: Decomposition providing P
            cert: Squeezing certificate
            B: Absorbing set the pairs are drawn from
            n_pairs: Number of pairs
            t_grid: Positive check times
            seed: Random seed
            h: Integration step

        Returns:
            VerificationReport with one row per (pair, t)
        """
        h = float(h if h is not None else self.dde.default_h)
        times = sorted(float(t) for t in t_grid)
        if not times or times[0] <= 0:
            raise DomainError("squeezing check times must be positive")
        horizon = times[-1]
        limit = B.radius * (1.0 + self.slack)
        rng = np.random.default_rng(seed)

        pairs: List[Tuple[HistorySegment, HistorySegment]] = []
        trajectories = []
        for index in range(n_pairs):
            for attempt in range(self.escape_resamples + 1):
                phi, psi = self._ball_samples(rng, model, h, 2, B.radius)
                runs = self.dde.integrate_batch(model, [phi, psi], horizon, h)
                if all(self._window_norms(run, model).max() <= limit for run in runs):
                    break
                self.logger.warning(f"Pair {index} left the absorbing ball; resampling (attempt {attempt + 1})")
            else:
                raise SamplingError(f"pair {index} escaped the absorbing ball "
                                    f"{self.escape_resamples + 1} times", context={"pair": index})
            pairs.append((phi, psi))
            trajectories.append(runs)

        def check(index):
            (phi, psi), (run_phi, run_psi) = pairs[index], trajectories[index]
            distance = (phi - psi).norm()
            rows = []
            for t in times:
                w = self.dde.segment_at(run_phi, t) - self.dde.segment_at(run_psi, t)
                projected = decomp.project(w)
                p_measured = projected.norm()
                q_measured = (w - projected).norm()
                p_bound = cert.M1 * math.exp(cert.lambda0 * t) * distance
                p_literal = cert.M1_literal * math.exp(cert.lambda0 * t) * distance
                q_bound = (cert.M2 * math.exp(cert.lambda1 * t) + cert.M3 * math.exp(cert.lambda0 * t)) * distance
                ok = p_measured <= p_bound * (1 + self.slack) and q_measured <= q_bound * (1 + self.slack)
                rows.append({"pair": index, "t": t, "distance": distance,
                             "p_measured": p_measured, "p_bound": p_bound,
                             "p_literal_ok": bool(p_measured <= p_literal * (1 + self.slack)),
                             "q_measured": q_measured, "q_bound": q_bound, "ok": bool(ok)})
            return rows

        rows = [row for chunk in parallel_map(check, range(len(pairs)), self.threads) for row in chunk]
        passed = all(row["ok"] for row in rows)
        report = VerificationReport("squeezing", rows, passed, self.slack, seed,
                                    {"n_pairs": n_pairs, "t_grid": times, "h": h,
                                     "literal_M1_pass_rate": (sum(r["p_literal_ok"] for r in rows) / len(rows))
                                     if rows else 1.0,
                                     "constants": "sampled-estimate"})
        self.logger.info(f"Squeezing verification: pass rate {report.pass_rate:.3f} over {len(rows)} checks")
        return report

    def verify_absorbing_set(self, model: DelayModel, B: AbsorbingSet, n_samples: int, seed: int,
                             r_D: Optional[float] = None, h: Optional[float] = None,
                             invariance_horizon: Optional[float] = None) -> VerificationReport:
        """
        Entry of segments of norm r_D into B before the printed absorption time,
        and invariance of B along trajectories started inside it.

        Args:
            model: Nonlinear delay model
            B: Absorbing set
            n_samples: Segments per check
            seed: Random seed
            r_D: Initial norm, defaults to 3 R_B
            h: Integration step
            invariance_horizon: Length of the invariance runs, defaults to 10 r

        Returns:
            VerificationReport with one row per sample and check
        """
        h = float(h if h is not None else self.dde.default_h)
        r_D = float(r_D if r_D is not None else 3.0 * B.radius)
        T_D = self.absorption_time(B, r_D)
        deadline = T_D * (1.0 + self.slack)
        horizon = max(deadline, model.delay) + 10.0 * model.delay
        rng = np.random.default_rng(seed)
        rows = []

        starts = self._ball_samples(rng, model, h, n_samples, r_D, exact=True)
        for index, run in enumerate(self.dde.integrate_batch(model, starts, horizon, h)):
            norms = self._window_norms(run, model)
            inside = norms <= B.radius
            # entry time: first step after which the trajectory stays in B
            outside = np.nonzero(~inside)[0]
            entry_index = 0 if len(outside) == 0 else int(outside[-1]) + 1
            entry = entry_index * h if entry_index < len(norms) else math.inf
            rows.append({"check": "entry", "sample": index, "value": entry, "bound": deadline,
                         "ok": bool(entry <= deadline)})

        invariance_horizon = float(invariance_horizon if invariance_horizon is not None else 10.0 * model.delay)
        inner = self._ball_samples(rng, model, h, n_samples, B.radius)
        for index, run in enumerate(self.dde.integrate_batch(model, inner, invariance_horizon, h)):
            peak = float(self._window_norms(run, model).max())
            rows.append({"check": "invariance", "sample": index, "value": peak,
                         "bound": B.radius * (1.0 + self.slack), "ok": bool(peak <= B.radius * (1.0 + self.slack))})

        passed = all(row["ok"] for row in rows)
        report = VerificationReport("absorbing_set", rows, passed, self.slack, seed,
                                    {"r_D": r_D, "T_D": T_D, "R_B": B.radius, "h": h})
        self.logger.info(f"Absorbing-set verification: T_D = {T_D:.6g}, pass rate {report.pass_rate:.3f}")
        return report

    def sample_attractor(self, model: DelayModel, B: AbsorbingSet, n_trajectories: int,
                         samples_per_trajectory: int, seed: int, spacing: Optional[float] = None,
                         h: Optional[float] = None) -> List[HistorySegment]:
        """
        Post-absorption segments from trajectories started on the sphere of radius R_B.

        Sampling starts after the absorption time of that sphere plus ten delays.
        """
        h = float(h if h is not None else self.dde.default_h)
        spacing = float(spacing if spacing is not None else model.delay)
        burn_in = self.absorption_time(B, B.radius) + 10.0 * model.delay
        burn_in = h * math.ceil(burn_in / h)
        horizon = burn_in + spacing * (samples_per_trajectory - 1)
        rng = np.random.default_rng(seed)
        starts = self._ball_samples(rng, model, h, n_trajectories, B.radius, exact=True)
        times = [burn_in + j * spacing for j in range(samples_per_trajectory)]
        segments = [segment for run in self.dde.evolve_segments(model, starts, times, h) for segment in run]
        self.logger.info(f"Sampled {len(segments)} attractor segments after burn-in {burn_in:.4g}")
        return segments
