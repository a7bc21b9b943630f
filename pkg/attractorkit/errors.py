#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exception hierarchy for AttractorKit.

Every failure carries a machine-parsable code and belongs to one of three
families, each mapped to a command-line exit status.
"""

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 3


class AttractorKitError(Exception):
    """Base class for all toolkit failures"""

    code = "ATTRACTORKIT"
    exit_status = EXIT_NUMERICAL

    def __init__(self, message: str, code: Optional[str] = None,
                 context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.message = message
        self.context = context or {}

    def failure_line(self) -> str:
        """One-line summary written to stderr by the CLI."""
        text = " ".join(self.message.split())
        return f"ATTRACTORKIT_FAILURE code={self.code} exit={self.exit_status} message={text}"


class HypothesisViolation(AttractorKitError):
    """A hypothesis behind a bound does not hold for the given constants or model"""

    code = "HYPOTHESIS"
    exit_status = EXIT_HYPOTHESIS


class NumericalFailure(AttractorKitError):
    """A numerical procedure could not deliver a trustworthy result"""

    code = "NUMERICAL"
    exit_status = EXIT_NUMERICAL


class ConfigError(AttractorKitError):
    """A configuration or model file does not match its schema"""

    code = "CONFIG"
    exit_status = EXIT_USAGE

    def __init__(self, message: str, field_path: str = "",
                 context: Optional[Dict[str, Any]] = None):
        super().__init__(message, context=context)
        self.field_path = field_path


# dde_core

class DelayAlignmentError(NumericalFailure):
    code = "DELAY_ALIGNMENT"


class BlowUpError(NumericalFailure):
    code = "BLOW_UP"

    def __init__(self, message: str, time: float):
        super().__init__(message, context={"time": time})
        self.time = time


class DomainError(NumericalFailure):
    code = "DOMAIN"


# spectral

class ContourError(NumericalFailure):
    code = "CONTOUR"


class IncompleteEnumerationError(NumericalFailure):
    code = "INCOMPLETE_ENUMERATION"


class WindowTooSmallError(NumericalFailure):
    code = "WINDOW_TOO_SMALL"

    def __init__(self, message: str, suggested: Dict[str, float]):
        super().__init__(message, context={"suggested_window": suggested})
        self.suggested = suggested


class DecompositionError(NumericalFailure):
    code = "DECOMPOSITION"


class CutIndexError(NumericalFailure):
    code = "CUT_INDEX"


class StabilityError(HypothesisViolation):
    code = "STABILITY"


# bounds

class AbsorptionHypothesisError(HypothesisViolation):
    code = "HYPOTHESIS_K0"


class NoAbsorptionError(HypothesisViolation):
    code = "NO_ABSORPTION"


class ResonanceError(HypothesisViolation):
    code = "RESONANCE"


class InadmissibleCertificateError(HypothesisViolation):
    code = "INADMISSIBLE_CERTIFICATE"


class InfeasibleAlphaError(HypothesisViolation):
    code = "INFEASIBLE_ALPHA"

    def __init__(self, message: str, min_zeta: float):
        super().__init__(message, context={"min_zeta": min_zeta})
        self.min_zeta = min_zeta


class SamplingError(NumericalFailure):
    code = "SAMPLING"


# covering

class CoveringLemmaError(NumericalFailure):
    code = "COVERING_LEMMA"


class CoveringConstructionError(NumericalFailure):
    code = "COVERING_CONSTRUCTION"

    def __init__(self, message: str, level: int, point_index: int):
        super().__init__(message, context={"level": level, "point_index": point_index})
        self.level = level
        self.point_index = point_index


class AttractionError(NumericalFailure):
    code = "ATTRACTION"


# rds_app

class BMinusAHypothesisError(HypothesisViolation):
    code = "HYPOTHESIS_B_MINUS_A"


class DegenerateDissipativityError(HypothesisViolation):
    code = "DEGENERATE_DISSIPATIVITY"
