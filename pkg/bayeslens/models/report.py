"""Law report models."""

from typing import List, Optional

from pydantic import BaseModel, Field


class CaseFailure(BaseModel):
    """A failing case and its replay index."""
    case_index: int
    residual: float
    error: Optional[str] = None


class ShrunkFailure(BaseModel):
    """Smallest failing case found while shrinking, with replay coordinates."""
    seed: int
    case_index: int
    attempt: int
    max_dim: int
    residual: float
    error: Optional[str] = None


class LawReport(BaseModel):
    """Outcome of one law over one case stream."""
    law: str
    instance: str
    cases_run: int
    failures: List[CaseFailure] = Field(default_factory=list)
    max_residual: float
    tolerance: float
    passed: bool
    smallest_failure: Optional[ShrunkFailure] = None
