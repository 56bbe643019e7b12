"""Shor's factoring algorithm on an exact state-vector simulator."""

from .circuit import Circuit, Convention, Gate, GateKind
from .contfrac import check_period, convergents, expand, extract_period
from .errors import ContractViolation, DomainError, ExportError
from .modexp import MESpec, MEVersion, Permutation, order_bruteforce
from .shor import RunReport, ShorConfig, run, theoretical_histogram
from .statevec import StateVector

__all__ = [
    "Circuit",
    "ContractViolation",
    "Convention",
    "DomainError",
    "ExportError",
    "Gate",
    "GateKind",
    "MESpec",
    "MEVersion",
    "Permutation",
    "RunReport",
    "ShorConfig",
    "StateVector",
    "check_period",
    "convergents",
    "expand",
    "extract_period",
    "order_bruteforce",
    "run",
    "theoretical_histogram",
]

__version__ = "0.1.0"
