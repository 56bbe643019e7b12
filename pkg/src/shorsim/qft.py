"""Quantum Fourier transform circuits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .circuit import Circuit, Convention, Gate, cphase, h, inverse, swap
from .errors import DomainError


@dataclass(frozen=True)
class QftParams:
    """``m`` qubits; rotations ``R_n`` with ``n > angle_cutoff_k`` are dropped when a cutoff is set."""

    m: int
    convention: Convention = Convention.QISKIT
    angle_cutoff_k: int | None = None
    swaps: bool = True

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError("QFT needs m >= 1")
        if self.angle_cutoff_k is not None and self.angle_cutoff_k < 1:
            raise DomainError("angle cutoff must be >= 1")


@dataclass(frozen=True)
class PartialPhase:
    r: int
    value: Fraction


def rotation_angle(n: int) -> float:
    """Angle of ``R_n``: ``2*pi / 2**n``."""
    return 2 * math.pi / (1 << n)


def _keep(params: QftParams, n: int) -> bool:
    return params.angle_cutoff_k is None or n <= params.angle_cutoff_k


def build_qft(params: QftParams) -> Circuit:
    """QFT with matrix ``exp(2*pi*i*k*l/M)/sqrt(M)`` in the requested convention.

    The output qubit order is restored by a SWAP network unless ``params.swaps``
    is false, in which case the result is left bit-reversed.
    """
    m = params.m
    gates: list[Gate] = []
    if params.convention is Convention.QISKIT:
        for j in reversed(range(m)):
            gates.append(h(j))
            for k in reversed(range(j)):
                n = j - k + 1
                if _keep(params, n):
                    gates.append(cphase(rotation_angle(n), k, j))
    else:
        for t in range(m):
            gates.append(h(t))
            for u in range(t + 1, m):
                n = u - t + 1
                if _keep(params, n):
                    gates.append(cphase(rotation_angle(n), u, t))
    if params.swaps:
        gates.extend(swap(q, m - 1 - q) for q in range(m // 2))
    return Circuit(m, tuple(gates), params.convention)


def build_iqft(params: QftParams) -> Circuit:
    """Inverse QFT: the forward gates in reverse order with negated angles."""
    return inverse(build_qft(params))


def partial_phases(ell: int, m: int) -> list[PartialPhase]:
    """Stage phases ``Omega_r = sum_k l_{m-r+k} / 2**k`` for ``r = 1..m`` (bits numbered MSB first).

    ``Omega_r`` only sees the last ``r`` bits, so it equals ``(ell mod 2**r) / 2**r``.
    """
    if m < 1 or not 0 <= ell < (1 << m):
        raise DomainError(f"ell={ell} is not an {m}-bit index")
    return [PartialPhase(r, Fraction(ell % (1 << r), 1 << r)) for r in range(1, m + 1)]
