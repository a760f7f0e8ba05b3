from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator
from typing import List, Optional, Union

from focir.services.ecm_models import BranchParams, FoEcmParams, RandlesParams
from focir.services.ident_engine import IdentifiabilityResult, RoundtripAudit
from focir.services.tf_builder import CoefficientVector, StructureTag

_OPEN = "inf"


class BranchSchema(BaseModel):
    """One R||CPE branch of a model file."""

    r: Optional[float] = Field(..., description='Branch resistance in ohms, or "inf" for an open (Warburg) branch')
    c: float = Field(..., gt=0, description="CPE constant")
    alpha: float = Field(..., gt=0, le=1, description="CPE exponent; 1 is an ideal capacitor")

    @field_validator("r", mode="before")
    @classmethod
    def _open_resistor(cls, value):
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
            return None
        if isinstance(value, float) and value == float("inf"):
            return None
        return value

    @field_validator("r")
    @classmethod
    def _positive_resistor(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not value > 0:
            raise ValueError(f"Branch resistance must be positive, got {value}")
        return value

    @field_serializer("r")
    def _serialize_r(self, value: Optional[float]) -> Union[float, str]:
        return _OPEN if value is None else value


class ModelSchema(BaseModel):
    """Circuit model file: R_inf plus R||CPE branches, sampled every ts seconds."""

    ts: float = Field(..., gt=0, description="Sample time in seconds")
    r_inf: float = Field(..., ge=0, description="Ohmic (series) resistance")
    branches: List[BranchSchema] = Field(..., min_length=1, description="Parallel R||CPE branches")

    @model_validator(mode="after")
    def _randles_is_positive(self) -> "ModelSchema":
        # A lone integer-order branch is the Randles circuit: R_inf > 0, R1 finite
        if len(self.branches) == 1 and self.branches[0].alpha == 1.0:
            if self.r_inf <= 0 or self.branches[0].r is None:
                raise ValueError("A one-branch model with alpha = 1 (Randles) needs r_inf > 0 and a finite r")
        return self

    def to_params(self) -> FoEcmParams:
        return FoEcmParams(
            r_inf=self.r_inf,
            branches=tuple(BranchParams(r=b.r, c=b.c, alpha=b.alpha) for b in self.branches),
            ts=self.ts,
        )

    @classmethod
    def from_params(cls, params: Union[FoEcmParams, RandlesParams], ts: float) -> "ModelSchema":
        if isinstance(params, RandlesParams):
            branches = [BranchSchema(r=params.r1, c=params.c1, alpha=1.0)]
        else:
            branches = [BranchSchema(r=b.r, c=b.c, alpha=b.alpha) for b in params.branches]
        return cls(ts=ts, r_inf=params.r_inf, branches=branches)


class CoefficientFileSchema(BaseModel):
    """Monic transfer-function coefficients; ``f[k]`` and ``g[k]`` multiply z^k."""

    structure: StructureTag = Field(..., description="Model structure the coefficients belong to")
    ts: float = Field(..., gt=0, description="Sample time in seconds")
    T: int = Field(..., ge=1, description="Horizon (data length)")
    f: List[float] = Field(..., min_length=2, description="Numerator coefficients by power")
    g: List[float] = Field(..., min_length=1, description="Denominator coefficients by power, leading 1 omitted")

    @model_validator(mode="after")
    def _degrees_match(self) -> "CoefficientFileSchema":
        if len(self.f) != len(self.g) + 1:
            raise ValueError(f"f must have len(g) + 1 = {len(self.g) + 1} entries, got {len(self.f)}")
        return self

    def to_vector(self) -> CoefficientVector:
        return CoefficientVector.from_powers(self.f, self.g, self.structure, self.T, self.ts)

    @classmethod
    def from_vector(cls, c: CoefficientVector) -> "CoefficientFileSchema":
        return cls(structure=c.structure, ts=c.Ts, T=c.T, f=c.f.tolist(), g=c.g.tolist())


class CoeffsRequest(BaseModel):
    """Request model for the coefficient endpoint."""

    model: ModelSchema = Field(..., description="Circuit model")
    horizon: int = Field(..., ge=2, description="Horizon T (data length)")


class IdentifyRequest(CoefficientFileSchema):
    """Coefficient file plus an optional residual tolerance."""

    tol: Optional[float] = Field(None, gt=0, description="Residual tolerance override")


class RoundtripRequest(BaseModel):
    """Request model for the round-trip audit."""

    model: ModelSchema = Field(..., description="Circuit model")
    horizon: int = Field(..., ge=2, description="Horizon T (data length)")
    tol: Optional[float] = Field(None, gt=0, description="Parameter error tolerance")


class SolutionSchema(BaseModel):
    """One recovered parameter set."""

    theta: List[Union[float, str]] = Field(
        ..., description='[R_inf, R_1..R_n, C_1..C_n, alpha_1..alpha_n] ([R_inf, R1, C1] for Randles); open resistors are "inf"'
    )
    model: ModelSchema = Field(..., description="The solution as a model file")
    residual: float = Field(..., description="max |C(theta) - c| / max |c|")

    @classmethod
    def from_params(cls, params: Union[FoEcmParams, RandlesParams], ts: float, residual: float) -> "SolutionSchema":
        theta = [_OPEN if value == float("inf") else float(value) for value in params.theta()]
        return cls(theta=theta, model=ModelSchema.from_params(params, ts), residual=residual)


def _solutions(result: IdentifiabilityResult, ts: float) -> List[SolutionSchema]:
    return [
        SolutionSchema.from_params(params, ts, residual)
        for params, residual in zip(result.solutions, result.residuals)
    ]


class IdentifyReport(BaseModel):
    """Response model for identification."""

    structure: StructureTag = Field(..., description="Inverted structure")
    T: int = Field(..., description="Horizon")
    ts: float = Field(..., description="Sample time in seconds")
    classification: str = Field(..., description="globally_identifiable, identifiable(k) or unidentifiable")
    solutions: List[SolutionSchema] = Field(..., description="Solutions sorted by alpha_1 ascending")

    @classmethod
    def from_result(cls, result: IdentifiabilityResult, c: CoefficientVector) -> "IdentifyReport":
        return cls(
            structure=result.structure,
            T=c.T,
            ts=c.Ts,
            classification=result.classification.label,
            solutions=_solutions(result, c.Ts),
        )


class RoundtripReport(BaseModel):
    """Response model for the round-trip audit."""

    structure: StructureTag = Field(..., description="Structure of the model")
    T: int = Field(..., description="Horizon")
    passed: bool = Field(..., description="True parameters recovered within tolerance")
    tol: float = Field(..., description="Tolerance applied")
    max_rel_error: float = Field(..., description="Smallest max-relative parameter error over the solutions")
    truth_in_solutions: bool = Field(..., description="Whether the true parameters are among the solutions")
    classification: str = Field(..., description="Classification of the inversion")
    solutions: List[SolutionSchema] = Field(..., description="Recovered parameter sets")

    @classmethod
    def from_audit(cls, audit: RoundtripAudit, tol: float) -> "RoundtripReport":
        c = audit.coefficients
        return cls(
            structure=c.structure,
            T=c.T,
            passed=audit.truth_in_solutions,
            tol=tol,
            max_rel_error=audit.max_rel_error,
            truth_in_solutions=audit.truth_in_solutions,
            classification=audit.result.classification.label,
            solutions=_solutions(audit.result, c.Ts),
        )


class HealthResponse(BaseModel):
    """Response model for health check endpoint."""

    status: str = Field(..., description="Health status")
    version: str = Field(..., description="Package version")
