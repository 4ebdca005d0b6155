"""
Pydantic models for group description blocks
Abelian presentations, Cayley tables and the named families
"""

from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Entry = Union[int, str]


class CayleyTableSpec(BaseModel):
    """Element labels plus a square multiplication table"""
    model_config = ConfigDict(extra="forbid")

    elements: List[Entry] = Field(..., min_length=1, description="Element labels in enumeration order")
    mul: List[List[Entry]] = Field(..., description="mul[i][j] = elements[i] * elements[j], label or index")

    @model_validator(mode="after")
    def _check_square(self) -> "CayleyTableSpec":
        size = len(self.elements)
        if len(self.mul) != size or any(len(row) != size for row in self.mul):
            raise ValueError(f"mul must be a {size} x {size} table")
        return self


class GroupSpec(BaseModel):
    """
    Group block of a data file.
    An empty block is the trivial group.
    """
    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = Field(None, description="Display name")
    abelian: Optional[List[int]] = Field(None, description="Cyclic orders n_1, ..., n_r")
    table: Optional[CayleyTableSpec] = Field(None, description="Cayley table")
    symmetric: Optional[int] = Field(None, ge=1, le=5, description="Symmetric group on k letters")
    dihedral: Optional[int] = Field(None, ge=2, le=12, description="Dihedral group of the m-gon")

    @model_validator(mode="after")
    def _one_kind(self) -> "GroupSpec":
        given = [k for k in ("abelian", "table", "symmetric", "dihedral") if getattr(self, k) is not None]
        if len(given) > 1:
            raise ValueError(f"group block must use one description, got {', '.join(given)}")
        if self.abelian is not None and any(n < 1 for n in self.abelian):
            raise ValueError("cyclic orders must be positive")
        return self
