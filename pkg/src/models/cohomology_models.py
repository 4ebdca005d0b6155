"""
Pydantic models for cochain files
"""

from typing import List

from pydantic import BaseModel, ConfigDict, Field

from src.models.group_models import GroupSpec


class CocycleFile(BaseModel):
    """A 2-cochain G x G -> Z/n indexed by element enumeration order"""
    model_config = ConfigDict(extra="forbid")

    group: GroupSpec = Field(default_factory=GroupSpec, description="Group the cochain lives on")
    modulus: int = Field(..., ge=1, description="Coefficient modulus n")
    table: List[List[int]] = Field(..., description="table[g][h] = u(g, h) mod n")
