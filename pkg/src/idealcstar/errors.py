"""Exception types shared across the package."""


class IdealCstarError(Exception):
    """Base class for all package errors."""


class ModelMismatchError(IdealCstarError):
    """Operands belong to different group models."""


class BudgetExceededError(IdealCstarError):
    """A requested enumeration would exceed the element budget."""

    def __init__(self, predicted: int, budget: int, what: str = "ball"):
        self.predicted = predicted
        self.budget = budget
        super().__init__(
            f"{what} would contain {predicted} elements, exceeding the budget of {budget}"
        )


class InvalidHomomorphismError(IdealCstarError):
    """A generator assignment violates a defining relation of the source."""

    def __init__(self, relator: str):
        self.relator = relator
        super().__init__(f"generator assignment does not kill the relator {relator!r}")


class HermitianStructureError(IdealCstarError):
    """A matrix that must be Hermitian is not, beyond tolerance.

    Raised by the PD checkers so a broken kernel is distinguishable from an
    indefinite one.
    """

    def __init__(self, defect: float, tol: float):
        self.defect = defect
        self.tol = tol
        super().__init__(f"Hermitian defect {defect:.3e} exceeds tolerance {tol:.3e}")


class PreconditionError(IdealCstarError):
    """An operation's stated precondition fails on the given input."""


class CertificateInconsistencyError(IdealCstarError):
    """A tail certificate contradicts an actual function evaluation."""


class GramIndefiniteError(IdealCstarError):
    """A Gram matrix required to be PSD has a negative eigenvalue."""

    def __init__(self, eigenvalue: float, tol: float):
        self.eigenvalue = eigenvalue
        self.tol = tol
        super().__init__(
            f"Gram matrix is not PSD: eigenvalue {eigenvalue:.6e} below -{tol:.1e} threshold"
        )


class UnsupportedModelError(IdealCstarError):
    """The operation is only defined for another kind of group model."""
