"""Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it.
"""

from typing import List, Optional

from pydantic import BaseModel


class ValidationReason(BaseModel):
    """Reason a model file entry was rejected."""
    code: str
    msg: str


class BayesLensError(Exception):
    """Base class for all library errors."""
    exit_code: int = 1


class SignatureMismatch(BayesLensError):
    """Morphisms or objects do not have the required signature."""
    exit_code = 3


class DomainMismatch(SignatureMismatch):
    """Codomain of the first morphism differs from the domain of the second."""


class InstanceMismatch(SignatureMismatch):
    """Values from different Markov-category instances were combined."""


class DimMismatch(DomainMismatch):
    """Gaussian dimensions do not chain."""


class NotAProduct(SignatureMismatch):
    """A state's target carries no usable tensor factorisation."""


class ModelValidationError(BayesLensError):
    """A model file or value failed validation."""
    exit_code = 2

    def __init__(self, reasons: List[ValidationReason]):
        self.reasons = reasons
        super().__init__("; ".join(f"[{r.code}] {r.msg}" for r in reasons))


class IndexOutOfRange(BayesLensError):
    """A deterministic mapping points outside its codomain."""
    exit_code = 2


class UnknownLaw(BayesLensError):
    """The requested law is not in the catalogue."""
    exit_code = 2


class EmptySupport(BayesLensError):
    """No entry of a finite state exceeds the support threshold."""
    exit_code = 4


class UnsupportedObservation(BayesLensError):
    """An observation has no predictive support."""
    exit_code = 5

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        super().__init__(message if step is None else f"step {step}: {message}")
