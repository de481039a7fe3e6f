#!/usr/bin/env python3
"""
Pydantic Schema Validation for mkit JSON documents

This module provides JSON schema validation using Pydantic for:
1. Input documents (polynomials, forms, series, Lagrangian germs)
2. Command reports written to standard output (and re-read by `verify`)

Every rational travels as a string ("3", "-1/2"); floats appear only in
flux reports.
"""

import logging
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import MalformedInputError
from .rational import parse_rational


def _check_rational(value: str) -> str:
    # parse_rational raises MalformedInputError, itself a ValueError
    parse_rational(value)
    return value


class TermModel(BaseModel):
    """Schema for one monomial term."""
    e: List[int] = Field(..., min_length=2, max_length=2, description="Exponents of x and y")
    c: str = Field(..., description="Rational coefficient as a string")

    @field_validator('e')
    @classmethod
    def exponents_non_negative(cls, value: List[int]) -> List[int]:
        if any(k < 0 for k in value):
            raise ValueError("exponents must be non-negative")
        return value

    @field_validator('c')
    @classmethod
    def coefficient_rational(cls, value: str) -> str:
        return _check_rational(value)


class PolyModel(BaseModel):
    """Schema for a polynomial."""
    terms: List[TermModel] = Field(default_factory=list, description="Non-zero terms")


class OneFormModel(BaseModel):
    """Schema for P dx + Q dy."""
    dx: PolyModel = Field(default_factory=PolyModel)
    dy: PolyModel = Field(default_factory=PolyModel)


class TwoFormModel(BaseModel):
    """Schema for g dx^dy."""
    dxdy: PolyModel


class MapModel(BaseModel):
    """Schema for a plane map (x, y) -> (x', y')."""
    x: PolyModel
    y: PolyModel


class SeriesModel(BaseModel):
    """Schema for a truncated series c_0 .. c_N."""
    c: List[str] = Field(..., min_length=1)

    @field_validator('c')
    @classmethod
    def coefficients_rational(cls, value: List[str]) -> List[str]:
        return [_check_rational(v) for v in value]


class LagrangianGermModel(BaseModel):
    """Schema for the potentials (alpha, f)."""
    alpha: OneFormModel
    f: PolyModel


class EngineBlock(BaseModel):
    """Germ data echoed by every report that computes it."""
    model_config = ConfigDict(extra='allow')
    weights: Optional[List[str]] = None
    mu: Optional[int] = None
    basis: Optional[List[List[int]]] = None


class ReportBase(BaseModel):
    model_config = ConfigDict(extra='allow')
    command: str
    input: Dict[str, Any]
    engine: EngineBlock = Field(default_factory=EngineBlock)


class WeightsReport(ReportBase):
    weights: List[str] = Field(..., min_length=2, max_length=2)


class MilnorReport(ReportBase):
    mu: int = Field(..., ge=0)
    mu1: int = Field(..., ge=0)
    mu0: int = Field(..., ge=0)
    basis: List[List[int]]


class DecompositionReport(ReportBase):
    mu: int = Field(..., ge=0)
    basis: List[List[int]]
    c: List[List[str]]
    xi: PolyModel
    residual: Optional[PolyModel] = None
    iterations: int = Field(..., ge=0)


class NormalizationReport(ReportBase):
    phi: MapModel
    psi: List[str]
    w: List[str]
    v: List[str]
    c: List[str]
    sign: Literal["+1", "-1"]
    cap: int = Field(..., ge=0)


class ClassificationReportModel(ReportBase):
    class_tag: Literal["LNF0", "LNF1", "LNF2", "LNF3", "NONGENERIC"] = Field(..., alias="class")
    sign: Optional[Literal["+1", "-1"]] = None
    invariant: Optional[List[str]] = None
    modulus: Optional[str] = None
    normalizer: Optional[MapModel] = None
    conditions: Dict[str, Optional[bool]]
    reason: Optional[str] = None


class FluxSampleModel(BaseModel):
    t: float = Field(..., gt=0)
    V: float
    V0: float
    Vprime: float
    residual: float = Field(..., ge=0)
    series_residual: float = Field(..., ge=0)
    series_gap: float = Field(..., ge=0)


class FluxReport(ReportBase):
    samples: List[FluxSampleModel]
    max_residual: float = Field(..., ge=0)


REPORT_MODELS = {
    'weights': WeightsReport,
    'milnor': MilnorReport,
    'decompose': DecompositionReport,
    'normalize': NormalizationReport,
    'classify': ClassificationReportModel,
    'flux-check': FluxReport,
}

INPUT_MODELS = {
    'poly': PolyModel,
    'one_form': OneFormModel,
    'two_form': TwoFormModel,
    'series': SeriesModel,
    'germ': LagrangianGermModel,
}


def parse_input(data: Any, input_type: str, source: str = "input") -> BaseModel:
    """
    Validate an input document, raising MalformedInputError on failure.

    Args:
        data: Decoded JSON document
        input_type: Key of INPUT_MODELS
        source: Name used in the error message (usually the file path)

    Returns:
        The validated model
    """
    model = INPUT_MODELS[input_type]
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise MalformedInputError(f"{source}: not a valid {input_type}: {e.errors()[0]['msg']}") from e


def validate_report(data: dict, command: str, job_id: str) -> bool:
    """
    Validate a command report against its Pydantic schema.

    Args:
        data: Report to validate
        command: Command that produced it
        job_id: Identifier for tracking (usually the input path)

    Returns:
        True if valid, False otherwise
    """
    try:
        REPORT_MODELS[command].model_validate(data)
        return True
    except Exception as e:
        logging.error(f"Schema validation failed for {command} report {job_id}: {str(e)}")
        return False


def validate_output(data: dict, output_type: str, job_id: str) -> bool:
    """
    Main validation function that routes to the matching report schema.

    Args:
        data: Output data to validate
        output_type: Command name ('milnor', 'decompose', ...)
        job_id: Identifier for tracking

    Returns:
        True if valid, False otherwise
    """
    if output_type in REPORT_MODELS:
        return validate_report(data, output_type, job_id)
    logging.error(f"Unknown output type: {output_type}")
    return False
