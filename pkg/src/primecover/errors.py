"""Exception hierarchy shared by every module."""


class PrimeCoverError(Exception):
    """Base class for all errors raised by the package."""


class LimitError(PrimeCoverError):
    """A configured size, index or memory limit would be exceeded."""


class StructuralError(PrimeCoverError):
    """Operands do not fit together (different parent groups, wrong group shape)."""


class InvariantViolation(PrimeCoverError):
    """A supplied object does not satisfy its type invariant (e.g. a non-closed subgroup)."""


class DomainError(PrimeCoverError, ValueError):
    """A numeric argument lies outside the domain of the operation."""


class UnsupportedModulus(DomainError):
    pass


class HypothesisError(PrimeCoverError):
    """The hypotheses of a lemma are not met by the supplied set."""

    def __init__(self, hypothesis, message=None):
        self.hypothesis = hypothesis
        super().__init__(message or f"hypothesis failed: {hypothesis}")


class TheoremViolation(PrimeCoverError, AssertionError):
    """A proven statement failed on concrete data.  Always an implementation bug."""

    def __init__(self, check, detail):
        self.check = check
        self.detail = detail
        super().__init__(f"{check}: {detail}")
