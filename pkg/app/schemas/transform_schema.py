from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.vocabulary_schema import FamilyId


class HintSet(BaseModel):
    """part name -> {family id -> requested target class}"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    parts: Dict[str, Dict[str, str]] = Field(default_factory=dict)

    def requested(self, part_name: str, family: FamilyId) -> Optional[str]:
        return self.parts.get(part_name, {}).get(family.value)

    def __len__(self) -> int:
        return sum(len(by_family) for by_family in self.parts.values())


class MappingPlan(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: FamilyId
    choices: Dict[str, str] = Field(default_factory=dict)
