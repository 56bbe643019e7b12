"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ContractViolation(ValueError):
    """An input breaks a structural contract (non-unitary gate, non-bijective map)."""


class ExportError(RuntimeError):
    """A circuit cannot be written in the requested text format."""
