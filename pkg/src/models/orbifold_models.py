"""
Pydantic models for orbifold data files
Group block, ambient components and per-pair sector blocks
"""

from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.group_models import GroupSpec

RationalLike = Union[int, str]


def _rational(value: RationalLike) -> RationalLike:
    try:
        Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"{value!r} is not a rational number")
    return value


class LiftSpec(BaseModel):
    """Integer representatives of a character"""
    A: int
    B: int


class NormalLineSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    root: List[RationalLike] = Field(..., description="Chern root as coefficients of the generators")
    a: int = Field(..., description="Character component along e1")
    b: int = Field(..., description="Character component along e2")
    lift: Optional[LiftSpec] = Field(
        None,
        validation_alias=AliasChoices("lift", "lifts"),
        description="Explicit lift; defaults to least non-negative residues",
    )

    @field_validator("root")
    @classmethod
    def _rational_root(cls, v: List[RationalLike]) -> List[RationalLike]:
        return [_rational(c) for c in v]


class ComponentSpec(BaseModel):
    """One connected component of a fixed-point set"""
    model_config = ConfigDict(extra="forbid")

    name: str = Field("pt", description="Label used in reports")
    dim: int = Field(0, ge=0, le=12, description="Complex dimension")
    generators: List[str] = Field(default_factory=list, description="Nilpotent degree-two generators")
    tangent_roots: List[List[RationalLike]] = Field(default_factory=list, description="Tangent Chern roots")
    normal_lines: List[NormalLineSpec] = Field(default_factory=list)
    integral: Dict[str, RationalLike] = Field(
        default_factory=lambda: {"": 1},
        description="Top-degree monomial (comma-separated exponents) -> intersection number",
    )

    @field_validator("tangent_roots")
    @classmethod
    def _rational_roots(cls, v: List[List[RationalLike]]) -> List[List[RationalLike]]:
        return [[_rational(c) for c in root] for root in v]

    @field_validator("integral")
    @classmethod
    def _monomial_keys(cls, v: Dict[str, RationalLike]) -> Dict[str, RationalLike]:
        for key, value in v.items():
            parts = [p for p in key.split(",") if p.strip()]
            if not all(p.strip().isdigit() for p in parts):
                raise ValueError(f"integral key {key!r} is not a list of exponents")
            _rational(value)
        return v

    @model_validator(mode="after")
    def _tangent_count(self) -> "ComponentSpec":
        if len(self.tangent_roots) != self.dim:
            raise ValueError(f"{len(self.tangent_roots)} tangent roots for dimension {self.dim}")
        return self

    def monomials(self) -> Dict[Tuple[int, ...], Fraction]:
        out = {}
        for key, value in self.integral.items():
            exponents = tuple(int(p) for p in key.split(",") if p.strip())
            out[exponents] = Fraction(str(value))
        return out


class SectorSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pair: Tuple[int, int] = Field(..., description="Commuting pair (g, h) as element indices")
    components: List[ComponentSpec] = Field(default_factory=list, description="Components of M^g n M^h")


class OrbifoldFile(BaseModel):
    """Fixed-point data of a global quotient M // G"""
    model_config = ConfigDict(extra="forbid")

    name: str = Field("M", description="Display name")
    group: GroupSpec = Field(default_factory=GroupSpec)
    trivial_action: bool = Field(False, description="Every sector is the ambient data without normal lines")
    ambient: List[ComponentSpec] = Field(default_factory=lambda: [ComponentSpec()])
    sectors: List[SectorSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_pairs(self) -> "OrbifoldFile":
        seen = set()
        for sector in self.sectors:
            if sector.pair in seen:
                raise ValueError(f"pair {list(sector.pair)} appears twice")
            seen.add(sector.pair)
        return self
