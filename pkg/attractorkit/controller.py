"""
Controller module for AttractorKit.
This module orchestrates the certification pipeline: model loading, spectral
analysis, decay constants, certificates, empirical checks and covering
experiments.
"""

import math
from datetime import datetime
from enum import Enum, auto
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from attractorkit import __version__
from attractorkit.errors import AttractorKitError, InadmissibleCertificateError
from attractorkit.memory.short_term import ShortTermMemory
from attractorkit.modules.bounds import AbsorbingSet, BoundsModule, VerificationReport
from attractorkit.modules.covering import CoveringModule, PointCloud, SegmentMap
from attractorkit.modules.dde_core import DdeCoreModule, DelayModel, HistorySegment
from attractorkit.modules.rds_app import PARSEVAL_SCALE, RdModel, RdsAppModule
from attractorkit.modules.spectral import CharacteristicFunction, SpectralModule
from attractorkit.schemas import ModelConfig, load_model_file
from config.settings import thread_cap
from utils.logging_utils import get_logger, log_error_with_context, log_execution_time


class PipelineState(Enum):
    INITIALIZING = auto()
    LOADING = auto()
    SPECTRAL = auto()
    DECAY = auto()
    CERTIFYING = auto()
    VERIFYING = auto()
    COVERING = auto()
    BOX_COUNTING = auto()
    SIMULATING = auto()
    DONE = auto()
    ERROR = auto()


class PipelineController:
    """
    Runs the pipeline stages for one model.

    Every stage stores its result in short-term memory, so a stage requested
    twice (for instance by ``report``) is computed once.
    """

    def __init__(self, config: Dict[str, Any], seed: int = 0):
        """
        Initialize the pipeline controller.

        Args:
            config: Configuration dictionary
            seed: Base seed of every sampled quantity
        """
        self.config = config
        self.config["threads"] = thread_cap(config)
        self.seed = int(seed)
        self.logger = get_logger("controller")

        self.dde = DdeCoreModule(config)
        self.spectral = SpectralModule(config)
        self.bounds = BoundsModule(config)
        self.covering = CoveringModule(config)
        self.rds = RdsAppModule(config)
        self.memory = ShortTermMemory()

        self.model_config: Optional[ModelConfig] = None
        self.model = None
        self.run: Dict[str, Any] = {}
        self.state = PipelineState.INITIALIZING

    def _set_state(self, state: PipelineState):
        self.logger.debug(f"State {self.state.name} -> {state.name}")
        self.state = state

    def _stage(self, name: str, state: PipelineState, compute: Callable[[], Any]) -> Any:
        if self.memory.has(name):
            return self.memory.get(name)
        self._set_state(state)
        start = datetime.now()
        try:
            result = compute()
        except AttractorKitError as e:
            self._set_state(PipelineState.ERROR)
            log_error_with_context(self.logger, e, dict(e.context, stage=name), name)
            raise
        log_execution_time(self.logger, start, name)
        self.memory.store(name, result)
        return result

    # ------------------------------------------------------------------
    # model
    # ------------------------------------------------------------------

    @property
    def kind(self) -> str:
        return self.model_config.kind

    def load(self, path) -> Any:
        """
        Load and validate a model file.

        Args:
            path: Path of the JSON model file

        Returns:
            DelayModel (rfde) or RdModel (rrd)
        """
        self._set_state(PipelineState.LOADING)
        self.model_config = load_model_file(path)
        if self.model_config.kind == "rfde":
            self.model = self.model_config.to_model()
        else:
            self.model = self.model_config.to_model(self.rds.default_modes)
        self.run = dict(self.config.get("run", {}))
        self.run.update({k: v for k, v in self.model_config.run.model_dump().items() if v is not None})
        self.memory.clear()
        self.memory.update_context("model", path)
        self.logger.info(f"Loaded {self.kind} model from {path}")
        return self.model

    def set_overrides(self, cut_m: Optional[int] = None, eps_ladder: Optional[Sequence[float]] = None):
        if cut_m is not None:
            self.run["cut_m"] = int(cut_m)
        if eps_ladder is not None:
            self.run["eps_ladder"] = [float(e) for e in eps_ladder]

    @property
    def h(self) -> float:
        return float(self.run.get("h") or self.dde.default_h)

    @property
    def cut_m(self) -> int:
        return int(self.run.get("cut_m") or 1)

    @property
    def delay(self) -> float:
        return self.model.delay if self.kind == "rfde" else self.model.r

    def dynamics(self) -> DelayModel:
        """The delay model that is integrated: the model itself or its Galerkin reduction."""
        if self.kind == "rfde":
            return self.model
        return self._stage("reduction", PipelineState.SPECTRAL, lambda: self.rds.galerkin_reduce(self.model))

    def echo(self) -> Dict[str, Any]:
        """Everything needed to reproduce this run."""
        return {
            "model": self.model_config.model_dump(),
            "model_file": str(self.memory.get_context("model")),
            "seed": self.seed,
            "run": self.run,
            "sections": {k: self.config.get(k) for k in ("integrator", "spectral", "bounds", "covering", "rds")},
        }

    # ------------------------------------------------------------------
    # spectral stages
    # ------------------------------------------------------------------

    def roots(self) -> Dict[str, Any]:
        def compute():
            if self.kind == "rrd":
                spectrum = self.rds.mode_spectrum(self.model, self.cut_m)
                self.memory.store("mode_spectrum", spectrum)
                return {"kind": "rrd", "spectrum": spectrum.to_dict()}
            chi = CharacteristicFunction.from_model(self.model)
            roots, certificate = self.spectral.enumerate_roots(chi)
            generator = self.spectral.generator_eigenvalues(chi)
            shown = generator.eigenvalues[:min(len(roots), len(generator.eigenvalues))]
            return {
                "kind": "rfde",
                "roots": [root.to_dict() for root in roots],
                "rightmost": roots[0].to_dict(),
                "certificate": certificate,
                "generator_check": [{"re": float(v.real), "im": float(v.imag)} for v in shown],
            }
        return self._stage("roots", PipelineState.SPECTRAL, compute)

    def decomposition(self):
        def compute():
            t_grid = self.run.get("decay_t_grid")
            fraction = self.run.get("gamma_fraction")
            if self.kind == "rrd":
                decomp, spectrum = self.rds.decomposition(self.model, self.cut_m, self.memory.get("mode_spectrum"),
                                                          self.seed, t_grid, self.h, fraction)
                self.memory.store("mode_spectrum", spectrum)
                return decomp
            chi = CharacteristicFunction.from_model(self.model)
            decomp = self.spectral.decompose(chi, self.cut_m)
            self.spectral.estimate_decay_constants(chi, decomp, t_grid=t_grid, seed=self.seed, h=self.h,
                                                   gamma_fraction=fraction)
            return decomp
        return self._stage("decomposition", PipelineState.DECAY, compute)

    # ------------------------------------------------------------------
    # certification
    # ------------------------------------------------------------------

    def certificate(self, alpha: Optional[float] = None) -> Dict[str, Any]:
        """
        Squeezing certificate, dimension bound and absorbing set.

        Raises InadmissibleCertificateError when no admissible alpha exists.
        """
        def compute():
            decomp = self.decomposition()
            L_f = self.model.lipschitz_constant if self.kind == "rfde" else self.model.lipschitz
            if self.kind == "rrd":
                report = self.rds.rd_dimension_bound(self.model, self.cut_m, alpha,
                                                     precomputed=(decomp, self.memory.get("mode_spectrum")))
                if not report.admissible:
                    raise InadmissibleCertificateError(f"zeta = {report.zeta:.6g} >= 1 for every admissible "
                                                       f"choice", context={"zeta": report.zeta})
                chosen = report.alpha
            elif alpha is None:
                chosen, report = self.bounds.optimize_alpha(decomp, L_f, "rfde")
            else:
                chosen = alpha
                report = self.bounds.dimension_bound(self.bounds.squeezing_certificate(decomp, L_f, alpha, "rfde"))
            cert = self.bounds.squeezing_certificate(decomp, L_f, chosen, self.kind)
            B = self.absorbing_set()
            return {"certificate": cert, "bound": report, "alpha": chosen, "alpha_optimized": alpha is None,
                    "absorbing_set": B}
        return self._stage("certificate", PipelineState.CERTIFYING, compute)

    def absorbing_set(self) -> AbsorbingSet:
        def compute():
            if self.kind == "rrd":
                return self.rds.absorbing_set(self.model, self.run.get("gamma"))
            decomp = self.decomposition()
            return self.bounds.absorbing_set(decomp.K0, decomp.gamma, self.model.lipschitz_constant,
                                             self.model.nonlinearity_at_zero_norm)
        return self._stage("absorbing_set", PipelineState.CERTIFYING, compute)

    def certification_summary(self) -> Dict[str, Any]:
        decomp = self.decomposition()
        result = self.certificate()
        spectral = {"rho_1": decomp.rho_1, "rho_m": decomp.rho_m, "k_m": decomp.k_m,
                    "multiplicities": decomp.multiplicities}
        if self.kind == "rrd":
            spectral["mode_spectrum"] = self.memory.get("mode_spectrum").to_dict()
        return {
            "model": self.model.describe(),
            "spectral": spectral,
            "decomposition": decomp.to_dict(),
            "constants": result["certificate"].to_dict(),
            "zeta": result["certificate"].zeta,
            "alpha": result["alpha"],
            "alpha_optimized": result["alpha_optimized"],
            "dimension_bound": result["bound"].to_dict(),
            "absorbing_set": result["absorbing_set"].to_dict(),
        }

    # ------------------------------------------------------------------
    # empirical checks
    # ------------------------------------------------------------------

    def default_t_grid(self) -> List[float]:
        """t = r j / 2 for j = 1..10, i.e. (0, 5r]."""
        return [self.delay * j / 2.0 for j in range(1, 11)]

    def squeezing_verification(self) -> VerificationReport:
        def compute():
            result = self.certificate()
            t_grid = self.run.get("t_grid") or self.default_t_grid()
            return self.bounds.verify_squeezing(self.dynamics(), self.decomposition(), result["certificate"],
                                                result["absorbing_set"], int(self.run.get("n_pairs", 100)),
                                                t_grid, self.seed, self.h)
        return self._stage("squeezing", PipelineState.VERIFYING, compute)

    def absorption_verification(self) -> VerificationReport:
        def compute():
            n = int(self.run.get("n_absorption_samples", 50))
            if self.kind == "rfde":
                return self.bounds.verify_absorbing_set(self.model, self.absorbing_set(), n, self.seed, h=self.h)
            return self._dissipativity(n)
        return self._stage("absorption", PipelineState.VERIFYING, compute)

    def _dissipativity(self, n: int) -> VerificationReport:
        reduced = self.dynamics()
        gamma = float(self.run.get("gamma") or self.model.a * (1.0 + self.rds.gamma_excess))
        horizon = 10.0 * self.model.r + 3.0 / self.model.a
        rng = np.random.default_rng(self.seed)
        starts = self.bounds._ball_samples(rng, reduced, self.h, n, self.absorbing_set().radius)
        rows, reports = [], []
        for index, phi in enumerate(starts):
            report = self.rds.dissipativity_check(self.model, phi, gamma, horizon, self.h)
            reports.append(report)
            worst = max(report.rows, key=lambda row: row["norm"] / row["bound"] if row["bound"] > 0 else math.inf)
            rows.append({"sample": index, "t": worst["t"], "norm": worst["norm"], "bound": worst["bound"],
                         "ok": report.passed})
        summary = dict(reports[0].summary) if reports else {}
        summary.update({"samples": n, "horizon": horizon})
        return VerificationReport("dissipativity", rows, all(r.passed for r in reports),
                                  self.rds.dissipativity_slack, self.seed, summary)

    def attractor_segments(self) -> List[HistorySegment]:
        def compute():
            total = int(self.run.get("attractor_samples", 400))
            trajectories = min(int(self.run.get("attractor_trajectories", 20)), total)
            per = int(math.ceil(total / trajectories))
            if self.kind == "rfde":
                segments = self.bounds.sample_attractor(self.model, self.absorbing_set(), trajectories, per,
                                                        self.seed, h=self.h)
            else:
                segments = self.rds.sample_attractor(self.model, trajectories, per, self.seed,
                                                     self.run.get("gamma"), h=self.h)
            return segments[:total]
        return self._stage("attractor", PipelineState.BOX_COUNTING, compute)

    def box_dimension(self):
        def compute():
            cloud = PointCloud.from_segments(self.attractor_segments())
            return self.covering.box_counting_dimension(cloud, self.run["eps_ladder"])
        return self._stage("box_dimension", PipelineState.BOX_COUNTING, compute)

    def covering_experiment(self) -> Dict[str, Any]:
        """Covering tree of the time-1 map on a sample of the absorbing ball, then the attraction check."""
        def compute():
            result = self.certificate()
            B = result["absorbing_set"]
            dynamics = self.dynamics()
            mapping = SegmentMap(dynamics, self.dde, self.decomposition(), self.h, 1.0)
            rng = np.random.default_rng(self.seed)
            count = int(self.run.get("cover_samples", 200))
            samples = [HistorySegment.constant(np.zeros(dynamics.dimension), dynamics.delay, self.h,
                                               dynamics.norm, dynamics.norm_scale)]
            samples += self.bounds._ball_samples(rng, dynamics, self.h, count, B.radius)
            cloud = PointCloud.from_segments(samples)
            levels = int(self.run.get("covering_levels", 6))
            tree = self.covering.build_covering_tree(mapping, result["certificate"], B.radius, levels, cloud)
            attraction = self.covering.verify_exponential_attraction(mapping, tree, cloud, levels)
            return {"tree": tree, "attraction": attraction}
        return self._stage("covering", PipelineState.COVERING, compute)

    # ------------------------------------------------------------------
    # simulation
    # ------------------------------------------------------------------

    def simulate(self) -> pd.DataFrame:
        """Trajectory from the default history: constant 1, or sin(x) for the reaction-diffusion model."""
        def compute():
            horizon = float(self.run.get("horizon", 5.0))
            dynamics = self.dynamics()
            if self.kind == "rfde":
                phi = HistorySegment.constant(np.ones(dynamics.dimension), dynamics.delay, self.h,
                                              dynamics.norm, dynamics.norm_scale)
                return self.dde.integrate(dynamics, phi, horizon, self.h).to_frame()
            phi = self.rds.field_history(dynamics, np.sin, self.h)
            frame = self.dde.integrate(dynamics, phi, horizon, self.h).to_frame()
            coefficients = frame[[f"x{i + 1}" for i in range(dynamics.dimension)]].to_numpy()
            frame["l2_norm"] = PARSEVAL_SCALE * np.linalg.norm(coefficients, axis=1)
            return frame
        return self._stage("simulation", PipelineState.SIMULATING, compute)

    # ------------------------------------------------------------------
    # full report
    # ------------------------------------------------------------------

    def certification_report(self) -> Dict[str, Any]:
        """Certification plus every empirical check, and the box-counting comparison."""
        summary = self.certification_summary()
        squeezing = self.squeezing_verification()
        absorption = self.absorption_verification()
        box = self.box_dimension()
        bound = summary["dimension_bound"]["bound"]
        consistent = bound is not None and box.estimate <= bound
        if not consistent:
            self.logger.warning(f"Box-counting estimate {box.estimate:.4g} exceeds the bound {bound}")
        self._set_state(PipelineState.DONE)
        summary.update({
            "verification": {
                "squeezing": squeezing.to_dict(),
                "absorption" if self.kind == "rfde" else "dissipativity": absorption.to_dict(),
                "box_counting": box.to_dict(),
                "box_counting_within_bound": consistent,
            },
            "toolkit_version": __version__,
            "config": self.echo(),
        })
        return summary
