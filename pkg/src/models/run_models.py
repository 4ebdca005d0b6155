"""
Pydantic models for a CLI run
Defines the run configuration and the reports commands print
"""

from fractions import Fraction
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class RunConfig(BaseModel):
    """Settings for one command, merged from Settings and CLI flags"""
    command: str = Field(..., description="Subcommand name")
    inputs: List[str] = Field(default_factory=list, description="Data file paths")
    order: int = Field(4, ge=1, description="Truncation order N, in units of q^(1/n) with n the group exponent")
    jet_order: Optional[int] = Field(
        None,
        ge=0,
        description="Top jet degree; defaults to the largest component dimension",
    )
    output: Literal["human", "canonical"] = Field("human", description="Rendering mode")
    normalize: bool = Field(False, description="Divide orbifold sums by |G|")
    primitive_root: int = Field(
        1,
        description="Power c of exp(2 pi i / n) used as the primitive root in phases",
    )
    prime: Optional[int] = Field(None, ge=2, description="Restrict sums to p-power pairs")
    seed: int = Field(20240607, description="Seed for randomized checks")
    threads: int = Field(1, ge=1, description="Worker threads for sector evaluation")
    inject_fault: bool = Field(
        False,
        description="Corrupt the data under verification; the command must then fail",
    )
    modulus: Optional[int] = Field(None, ge=1, description="Coefficient modulus n for h2 and weil")
    vector_a: Optional[List[int]] = Field(None, description="First element of (Z/n)^2 for weil")
    vector_b: Optional[List[int]] = Field(None, description="Second element of (Z/n)^2 for weil")
    group_orders: Optional[List[int]] = Field(None, description="Inline abelian group Z/n_1 x ... x Z/n_r")
    brute_force: bool = Field(False, description="Cross-check h2 against cochain enumeration")
    h2_max_order: int = Field(8, ge=1, description="Largest |G| accepted by h2")
    brute_force_limit: int = Field(2 ** 20, ge=1, description="Largest cochain space enumerated")

    @model_validator(mode="after")
    def _check_jet_order(self) -> "RunConfig":
        if self.jet_order is not None and self.jet_order > 12:
            raise ValueError("jet_order above 12 is not supported")
        return self

    def precision(self, n: int = 1) -> Fraction:
        """Series are exact below q^(N/n)"""
        return Fraction(self.order, n)


class CheckReport(BaseModel):
    """Outcome of one identity check"""
    name: str = Field(..., description="What was checked")
    ok: bool = Field(..., description="Whether the identity held")
    order: Optional[str] = Field(None, description="Exponent of q below which the check is exact")
    first_mismatch: Optional[str] = Field(
        None,
        description="First exponent (or case) where the two sides differ",
    )
    detail: Optional[str] = Field(None, description="Free-form diagnostic")
    subchecks: List["CheckReport"] = Field(default_factory=list)

    @field_validator("order", mode="before")
    @classmethod
    def _order_label(cls, value):
        if value is None or isinstance(value, str):
            return value
        return str(Fraction(value))

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def combine(cls, name: str, reports: List["CheckReport"], order=None) -> "CheckReport":
        failed = next((r for r in reports if not r.ok), None)
        return cls(
            name=name,
            ok=failed is None,
            order=order,
            first_mismatch=None if failed is None else f"{failed.name}: {failed.first_mismatch}",
            subchecks=reports,
        )

    def lines(self, indent: int = 0) -> List[str]:
        mark = "✅" if self.ok else "❌"
        text = f"{'  ' * indent}{mark} {self.name}"
        if not self.ok and self.first_mismatch:
            text += f" (first mismatch: {self.first_mismatch})"
        if self.detail:
            text += f" [{self.detail}]"
        out = [text]
        for sub in self.subchecks:
            out.extend(sub.lines(indent + 1))
        return out


class GenusReport(BaseModel):
    """A computed genus value, rendered"""
    command: str = Field(..., description="Subcommand that produced the value")
    value: str = Field(..., description="Human rendering of the value")
    canonical: Optional[str] = Field(None, description="Canonical line rendering")
    order: Optional[int] = Field(None, description="Truncation order")
    normalization: Literal["raw", "divide_by_G"] = Field("raw")
    sectors: int = Field(0, description="Number of commuting pairs summed")
    execution_time_ms: float = Field(..., description="Wall time of the computation")


class AlgebraReport(BaseModel):
    """Output of h2, weil and pairs"""
    command: str = Field(..., description="Subcommand that produced the report")
    value: str = Field(..., description="Main result, rendered")
    details: List[str] = Field(default_factory=list, description="Extra lines printed after the value")
    ok: bool = Field(True, description="False when a brute-force cross-check disagreed")
    execution_time_ms: float = Field(..., description="Wall time of the computation")


CheckReport.model_rebuild()
