from fractions import Fraction
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator
from datetime import datetime

ScalarText = Union[str, int]


def _check_scalars(values: Dict[str, ScalarText]) -> Dict[str, str]:
    checked = {}
    for label, value in values.items():
        try:
            Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"coefficient of {label!r} is not a rational number: {value!r}")
        checked[label] = str(value).strip()
    return checked


class BasisEntry(BaseModel):
    """One basis element of a pd-cdga"""
    label: str = Field(..., description="Basis label, unique across degrees")
    degree: int = Field(..., description="Cohomological degree")


class GeneratorEntry(BaseModel):
    """One generator of a Sullivan model"""
    name: str = Field(..., description="Generator name")
    degree: int = Field(..., description="Generator degree (at least 2)")


class ProductEntry(BaseModel):
    """Sparse product table entry: left · right = value"""
    left: str
    right: str
    value: Dict[str, ScalarText] = Field(..., description="Linear combination, coefficients as \"p/q\" strings")

    @field_validator("value")
    @classmethod
    def value_scalars(cls, v):
        return _check_scalars(v)


class DifferentialEntry(BaseModel):
    """Sparse differential entry: d(label) = value"""
    label: str
    value: Dict[str, ScalarText] = Field(..., description="Linear combination (pd-cdga) or polynomial (sullivan)")

    @field_validator("value")
    @classmethod
    def value_scalars(cls, v):
        return _check_scalars(v)


class ModelFile(BaseModel):
    """On-disk model description (JSON, UTF-8)"""
    name: str = Field(..., description="Model name")
    kind: Literal["pd-cdga", "sullivan"]
    basis: Optional[List[BasisEntry]] = None
    unit: Optional[str] = None
    product: List[ProductEntry] = Field(default_factory=list)
    differential: List[DifferentialEntry] = Field(default_factory=list)
    dimension: Optional[int] = Field(None, description="Formal dimension m")
    orientation: Optional[Dict[str, ScalarText]] = Field(None, description="∫ on the degree-m basis")
    generators: Optional[List[GeneratorEntry]] = None

    @field_validator("orientation")
    @classmethod
    def orientation_scalars(cls, v):
        return None if v is None else _check_scalars(v)

    @model_validator(mode="after")
    def fields_for_kind(self):
        if self.kind == "pd-cdga":
            if not self.basis:
                raise ValueError("basis required for pd-cdga")
            if self.unit is None:
                raise ValueError("unit required for pd-cdga")
            if self.dimension is None:
                raise ValueError("dimension required for pd-cdga")
            if self.orientation is None:
                raise ValueError("orientation required for pd-cdga")
        else:
            if self.generators is None:
                raise ValueError("generators required for sullivan")
            if self.product:
                raise ValueError("product table is not allowed for sullivan")
        return self


class RunRequest(BaseModel):
    """Request model for the computational endpoints"""
    builtin: Optional[str] = Field(None, description="Builtin model name, e.g. S2 or CP2")
    model: Optional[ModelFile] = Field(None, description="Inline model file")
    sullivan: Optional[ModelFile] = Field(None, description="Matching Sullivan model for an inline pd-cdga")
    max_degree: Optional[int] = Field(None, description="Degree bound N", ge=0)
    pipeline: Optional[Literal["hochschild", "sullivan", "both"]] = Field(
        None, description="Defaults to hochschild for a pd-cdga model, sullivan otherwise"
    )
    seed: int = Field(0, description="Seed for sampled checks")

    @model_validator(mode="after")
    def one_source(self):
        if (self.builtin is None) == (self.model is None):
            raise ValueError("give exactly one of builtin and model")
        return self


class ViolationItem(BaseModel):
    axiom: str
    witness: List[str]
    detail: str = ""


class ValidationResponse(BaseModel):
    """Response model for model validation"""
    model: str
    kind: str
    valid: bool
    violations: List[ViolationItem]


class BettiRow(BaseModel):
    degree: int
    hochschild: Optional[int] = None
    sullivan: Optional[int] = None
    match: Optional[bool] = None


class BettiResponse(BaseModel):
    """Response model for dim H^n(LM)"""
    model: str
    max_degree: int
    pipeline: str
    rows: List[BettiRow]


class TableEntry(BaseModel):
    left: Optional[str] = None
    right: Optional[str] = None
    label: Optional[str] = None
    value: Dict[str, str]


class LoopResponse(BaseModel):
    """Response model for the BV algebra tables"""
    model: str
    max_degree: int
    dimension: int
    basis: Dict[str, List[str]] = Field(..., description="Basis labels of ℍ_p keyed by p")
    unit: Dict[str, str]
    product: List[TableEntry]
    delta: List[TableEntry]
    bracket: List[TableEntry]


class HodgeRow(BaseModel):
    degree: int
    dims: List[int] = Field(..., description="dim H^n_[p], aligned with weights")
    sum: int
    total: int


class HodgeResponse(BaseModel):
    """Response model for the Hodge table"""
    model: str
    max_degree: int
    weights: List[int]
    rows: List[HodgeRow]


class CheckItem(BaseModel):
    name: str
    passed: bool


class FailureItem(BaseModel):
    check: str
    witness: str
    detail: str = ""


class ReportSummary(BaseModel):
    title: str
    passed: bool
    checks: List[CheckItem]
    failures: List[FailureItem]


class CheckResponse(BaseModel):
    """Response model for the verification suite"""
    model: str
    max_degree: int
    passed: bool
    reports: List[ReportSummary]


class BuiltinInfo(BaseModel):
    name: str
    dimension: int
    has_sullivan: bool


class BuiltinsResponse(BaseModel):
    builtins: List[BuiltinInfo]
    total: int


class SystemStatus(BaseModel):
    """Response model for system status"""
    status: str
    message: str
    version: str
    timestamp: datetime = Field(default_factory=datetime.now)


class ErrorResponse(BaseModel):
    """Standard error response model"""
    error: str
    message: str
    timestamp: datetime = Field(default_factory=datetime.now)
